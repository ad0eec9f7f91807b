//! Knot expressions: parsing, normalization, canonical printing and the
//! algebraic-knot index check.
//!
//! Grammar (whitespace insignificant, integers nonzero decimals):
//!
//! ```text
//! expr := term ('#' term)*
//! term := '-' term | atom 'r'?
//! atom := 'U' | 'T(' int ',' int ')' | 'C(' int ',' int ';' expr ')' | '(' expr ')'
//! ```
//!
//! `-K` is the concordance inverse, read as `Mirror(Reverse(K))`. Every knot
//! this grammar can build is reversible, so normalization removes all
//! `Reverse` nodes.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnotExpr {
    Unknot,
    Torus {
        p: i64,
        q: i64,
    },
    /// The `(p, q)`-cable of `companion`; `p` is the winding number.
    Cable {
        p: i64,
        q: i64,
        companion: Box<KnotExpr>,
    },
    Mirror(Box<KnotExpr>),
    Reverse(Box<KnotExpr>),
    Sum(Vec<KnotExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        pos: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("arity error at {pos}: {what} takes {expected} integer arguments")]
    Arity {
        pos: usize,
        what: &'static str,
        expected: usize,
    },
    #[error("indices ({p},{q}) at {pos} are not coprime")]
    NotCoprime { pos: usize, p: i64, q: i64 },
    #[error("integer at {pos} must be nonzero")]
    Zero { pos: usize },
    #[error("integer at {pos} is out of range")]
    Overflow { pos: usize },
    #[error("torus knot T({p},{q}) at {pos} needs |p|, |q| >= 2")]
    DegenerateTorus { pos: usize, p: i64, q: i64 },
    #[error("cable C({p},{q}; ..) at {pos} needs winding number p >= 2")]
    BadWinding { pos: usize, p: i64, q: i64 },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Arity { pos, .. }
            | ParseError::NotCoprime { pos, .. }
            | ParseError::Zero { pos }
            | ParseError::Overflow { pos }
            | ParseError::DegenerateTorus { pos, .. }
            | ParseError::BadWinding { pos, .. } => *pos,
        }
    }
}

/// Parse and normalize a knot expression.
pub fn parse_knot(text: &str) -> Result<KnotExpr, ParseError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.syntax(&["'#'", "end of input"]));
    }
    Ok(e.normalize())
}

pub(crate) struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn syntax(&self, expected: &[&'static str]) -> ParseError {
        let found = match self.src.get(self.pos) {
            None => "end of input".to_string(),
            Some(&c) => format!("{:?}", c as char),
        };
        ParseError::Syntax {
            pos: self.pos,
            expected: expected.to_vec(),
            found,
        }
    }

    pub(crate) fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, name: &'static str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&[name]))
        }
    }

    pub(crate) fn expr(&mut self) -> Result<KnotExpr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.eat(b'#') {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            KnotExpr::Sum(terms)
        })
    }

    pub(crate) fn term(&mut self) -> Result<KnotExpr, ParseError> {
        if self.eat(b'-') {
            let inner = self.term()?;
            return Ok(KnotExpr::Mirror(Box::new(KnotExpr::Reverse(Box::new(inner)))));
        }
        let atom = self.atom()?;
        if self.eat(b'r') {
            Ok(KnotExpr::Reverse(Box::new(atom)))
        } else {
            Ok(atom)
        }
    }

    fn atom(&mut self) -> Result<KnotExpr, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(b'U') => {
                self.pos += 1;
                Ok(KnotExpr::Unknot)
            }
            Some(b'T') => {
                self.pos += 1;
                self.expect(b'(', "'('")?;
                let p = self.int()?;
                self.arg_sep(b',', "T", 2)?;
                let q = self.int()?;
                self.arg_close("T", 2)?;
                check_torus(start, p, q)?;
                Ok(KnotExpr::Torus { p, q })
            }
            Some(b'C') => {
                self.pos += 1;
                self.expect(b'(', "'('")?;
                let p = self.int()?;
                self.arg_sep(b',', "C", 2)?;
                let q = self.int()?;
                if self.peek() != Some(b';') {
                    return Err(match self.peek() {
                        Some(b',') | Some(b')') => ParseError::Arity {
                            pos: self.pos,
                            what: "C",
                            expected: 2,
                        },
                        _ => self.syntax(&["';'"]),
                    });
                }
                self.pos += 1;
                let companion = self.expr()?;
                self.expect(b')', "')'")?;
                if p < 2 {
                    return Err(ParseError::BadWinding { pos: start, p, q });
                }
                if p.gcd(&q) != 1 {
                    return Err(ParseError::NotCoprime { pos: start, p, q });
                }
                Ok(KnotExpr::Cable {
                    p,
                    q,
                    companion: Box::new(companion),
                })
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')', "')'")?;
                Ok(e)
            }
            _ => Err(self.syntax(&["'U'", "'T('", "'C('", "'('", "'-'"])),
        }
    }

    fn arg_sep(&mut self, c: u8, what: &'static str, n: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(b')') | Some(b';') => Err(ParseError::Arity {
                pos: self.pos,
                what,
                expected: n,
            }),
            _ => Err(self.syntax(&["','"])),
        }
    }

    fn arg_close(&mut self, what: &'static str, n: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some(b')') => {
                self.pos += 1;
                Ok(())
            }
            Some(b',') => Err(ParseError::Arity {
                pos: self.pos,
                what,
                expected: n,
            }),
            _ => Err(self.syntax(&["')'"])),
        }
    }

    pub(crate) fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let neg = if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.syntax(&["integer"]));
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let mut v: i64 = text.parse().map_err(|_| ParseError::Overflow { pos: start })?;
        if neg {
            v = -v;
        }
        if v == 0 {
            return Err(ParseError::Zero { pos: start });
        }
        Ok(v)
    }
}

fn check_torus(pos: usize, p: i64, q: i64) -> Result<(), ParseError> {
    if p.abs() < 2 || q.abs() < 2 {
        return Err(ParseError::DegenerateTorus { pos, p, q });
    }
    if p.gcd(&q) != 1 {
        return Err(ParseError::NotCoprime { pos, p, q });
    }
    Ok(())
}

impl KnotExpr {
    pub fn torus(p: i64, q: i64) -> Self {
        KnotExpr::Torus { p, q }.normalize()
    }

    pub fn cable(p: i64, q: i64, companion: KnotExpr) -> Self {
        KnotExpr::Cable {
            p,
            q,
            companion: Box::new(companion),
        }
    }

    pub fn mirror(self) -> Self {
        KnotExpr::Mirror(Box::new(self)).normalize()
    }

    /// Concordance inverse `-K`.
    pub fn inverse(self) -> Self {
        KnotExpr::Mirror(Box::new(KnotExpr::Reverse(Box::new(self)))).normalize()
    }

    pub fn sum(terms: Vec<KnotExpr>) -> Self {
        KnotExpr::Sum(terms).normalize()
    }

    /// Canonical form: sums flattened, mirrors pushed through sums and
    /// cancelled in pairs, reverses removed, torus indices positive with p < q.
    pub fn normalize(&self) -> KnotExpr {
        match self {
            KnotExpr::Unknot => KnotExpr::Unknot,
            KnotExpr::Torus { p, q } => {
                let (a, b) = if p.abs() < q.abs() {
                    (p.abs(), q.abs())
                } else {
                    (q.abs(), p.abs())
                };
                let t = KnotExpr::Torus { p: a, q: b };
                if (*p < 0) != (*q < 0) {
                    KnotExpr::Mirror(Box::new(t))
                } else {
                    t
                }
            }
            KnotExpr::Cable { p, q, companion } => KnotExpr::Cable {
                p: *p,
                q: *q,
                companion: Box::new(companion.normalize()),
            },
            KnotExpr::Mirror(inner) => mirror_normal(inner.normalize()),
            // all atoms of the grammar are reversible
            KnotExpr::Reverse(inner) => inner.normalize(),
            KnotExpr::Sum(children) => {
                let mut flat = Vec::with_capacity(children.len());
                for c in children {
                    match c.normalize() {
                        KnotExpr::Sum(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    KnotExpr::Sum(flat)
                }
            }
        }
    }

    /// Canonical text; `parse_knot(&e.render()) == e` for normalized `e`.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Top-level summands of a normalized expression.
    pub fn summands(&self) -> Vec<&KnotExpr> {
        match self {
            KnotExpr::Sum(c) => c.iter().collect(),
            other => vec![other],
        }
    }

    pub fn contains_mirror_or_sum(&self) -> bool {
        match self {
            KnotExpr::Unknot | KnotExpr::Torus { .. } => false,
            KnotExpr::Mirror(_) | KnotExpr::Sum(_) => true,
            KnotExpr::Reverse(e) => e.contains_mirror_or_sum(),
            KnotExpr::Cable { companion, .. } => companion.contains_mirror_or_sum(),
        }
    }
}

fn mirror_normal(e: KnotExpr) -> KnotExpr {
    match e {
        KnotExpr::Unknot => KnotExpr::Unknot,
        KnotExpr::Mirror(inner) => *inner,
        KnotExpr::Sum(children) => KnotExpr::Sum(children.into_iter().map(mirror_normal).collect()),
        other => KnotExpr::Mirror(Box::new(other)),
    }
}

impl fmt::Display for KnotExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotExpr::Unknot => write!(f, "U"),
            KnotExpr::Torus { p, q } => write!(f, "T({p},{q})"),
            KnotExpr::Cable { p, q, companion } => write!(f, "C({p},{q};{companion})"),
            KnotExpr::Mirror(inner) => match **inner {
                KnotExpr::Sum(_) => write!(f, "-({inner})"),
                _ => write!(f, "-{inner}"),
            },
            KnotExpr::Reverse(inner) => match **inner {
                KnotExpr::Sum(_) | KnotExpr::Mirror(_) | KnotExpr::Reverse(_) => {
                    write!(f, "({inner})r")
                }
                _ => write!(f, "{inner}r"),
            },
            KnotExpr::Sum(children) => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " # ")?;
                    }
                    match c {
                        KnotExpr::Sum(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// Cabling indices of an iterated torus knot, innermost first, with one flag
/// per index pair. The first flag checks positivity; flag `i > 0` also checks
/// `q_{i} > p_{i-1} q_{i-1} p_{i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicKnotWitness {
    pub indices: Vec<(i64, i64)>,
    pub flags: Vec<bool>,
}

impl AlgebraicKnotWitness {
    pub fn from_indices(indices: Vec<(i64, i64)>) -> Self {
        let flags = indices
            .iter()
            .enumerate()
            .map(|(i, &(p, q))| {
                let positive = p > 0 && q > 0;
                if i == 0 {
                    positive
                } else {
                    let (pp, pq) = indices[i - 1];
                    positive && q > pp * pq * p
                }
            })
            .collect();
        AlgebraicKnotWitness { indices, flags }
    }

    pub fn is_valid(&self) -> bool {
        !self.indices.is_empty() && self.flags.iter().all(|&f| f)
    }

    /// 1-based positions of the failing index pairs.
    pub fn failures(&self) -> Vec<usize> {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| !f)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraicRefusal {
    #[error("expression contains a mirror or connected sum; algebraicity is not classified there")]
    MirrorOrSum,
    #[error("the unknot is not an iterated torus knot")]
    Unknot,
}

/// Collect the cabling indices of a nested-cable expression and check the
/// algebraic-knot inequalities.
pub fn is_algebraic(expr: &KnotExpr) -> Result<AlgebraicKnotWitness, AlgebraicRefusal> {
    fn walk(e: &KnotExpr, out: &mut Vec<(i64, i64)>) -> Result<(), AlgebraicRefusal> {
        match e {
            KnotExpr::Unknot => Err(AlgebraicRefusal::Unknot),
            KnotExpr::Torus { p, q } => {
                out.push((*p, *q));
                Ok(())
            }
            KnotExpr::Cable { p, q, companion } => {
                if **companion == KnotExpr::Unknot {
                    out.push((*p, *q));
                } else {
                    walk(companion, out)?;
                    out.push((*p, *q));
                }
                Ok(())
            }
            KnotExpr::Reverse(inner) => walk(inner, out),
            KnotExpr::Mirror(_) | KnotExpr::Sum(_) => Err(AlgebraicRefusal::MirrorOrSum),
        }
    }
    let mut indices = Vec::new();
    walk(expr, &mut indices)?;
    Ok(AlgebraicKnotWitness::from_indices(indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(p: i64, q: i64) -> KnotExpr {
        KnotExpr::Torus { p, q }
    }

    #[test]
    fn single_torus() {
        assert_eq!(parse_knot("T(2,3)").unwrap(), t(2, 3));
        assert_eq!(parse_knot(" T ( 3 , 2 ) ").unwrap(), t(2, 3));
    }

    #[test]
    fn cable_and_inverse_sum() {
        let e = parse_knot("C(2,7; T(2,3)) # -T(2,7)").unwrap();
        assert_eq!(
            e,
            KnotExpr::Sum(vec![
                KnotExpr::cable(2, 7, t(2, 3)),
                KnotExpr::Mirror(Box::new(t(2, 7))),
            ])
        );
    }

    #[test]
    fn algebraic_cable_of_trefoil() {
        let e = parse_knot("C(2,15; T(2,3))").unwrap();
        assert_eq!(e, KnotExpr::cable(2, 15, t(2, 3)));
        let w = is_algebraic(&e).unwrap();
        assert_eq!(w.indices, vec![(2, 3), (2, 15)]);
        assert!(w.is_valid());
    }

    #[test]
    fn algebraic_examples() {
        assert!(is_algebraic(&t(2, 3)).unwrap().is_valid());
        assert!(is_algebraic(&parse_knot("C(2,13;T(2,3))").unwrap()).unwrap().is_valid());
        let w = is_algebraic(&parse_knot("C(2,11;T(2,3))").unwrap()).unwrap();
        assert!(!w.is_valid());
        assert_eq!(w.failures(), vec![2]);
        assert_eq!(
            is_algebraic(&parse_knot("T(2,3) # T(2,5)").unwrap()),
            Err(AlgebraicRefusal::MirrorOrSum)
        );
        assert_eq!(
            is_algebraic(&parse_knot("-T(2,3)").unwrap()),
            Err(AlgebraicRefusal::MirrorOrSum)
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_knot("T(2,3) # X").unwrap_err();
        assert_eq!(err.position(), 9);
        assert!(matches!(err, ParseError::Syntax { .. }));
        assert!(matches!(parse_knot("T(2,3"), Err(ParseError::Syntax { pos: 5, .. })));
        assert!(matches!(parse_knot("T(2,3) T(2,5)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_knot(""), Err(ParseError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_knot("T(2,3)rr"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(parse_knot("T(2)"), Err(ParseError::Arity { what: "T", .. })));
        assert!(matches!(
            parse_knot("T(2,3,5)"),
            Err(ParseError::Arity { what: "T", .. })
        ));
        assert!(matches!(
            parse_knot("C(2;T(2,3))"),
            Err(ParseError::Arity { what: "C", .. })
        ));
        assert!(matches!(
            parse_knot("C(2,3,5;U)"),
            Err(ParseError::Arity { what: "C", .. })
        ));
    }

    #[test]
    fn value_errors() {
        assert!(matches!(parse_knot("T(2,4)"), Err(ParseError::NotCoprime { .. })));
        assert!(matches!(parse_knot("C(2,6;U)"), Err(ParseError::NotCoprime { .. })));
        assert!(matches!(parse_knot("T(0,3)"), Err(ParseError::Zero { pos: 2 })));
        assert!(matches!(parse_knot("T(1,3)"), Err(ParseError::DegenerateTorus { .. })));
        assert!(matches!(parse_knot("C(1,3;U)"), Err(ParseError::BadWinding { .. })));
        assert!(matches!(
            parse_knot("T(2,99999999999999999999)"),
            Err(ParseError::Overflow { .. })
        ));
    }

    #[test]
    fn signed_torus_indices() {
        assert_eq!(parse_knot("T(2,-3)").unwrap(), KnotExpr::Mirror(Box::new(t(2, 3))));
        assert_eq!(parse_knot("T(-2,-3)").unwrap(), t(2, 3));
    }

    #[test]
    fn mirror_and_reverse_cancel() {
        assert_eq!(parse_knot("--T(2,3)").unwrap(), t(2, 3));
        assert_eq!(parse_knot("(T(2,3)r)r").unwrap(), t(2, 3));
        assert_eq!(parse_knot("-U").unwrap(), KnotExpr::Unknot);
        assert_eq!(
            parse_knot("-(T(2,3) # -T(2,5))").unwrap(),
            KnotExpr::Sum(vec![KnotExpr::Mirror(Box::new(t(2, 3))), t(2, 5)])
        );
    }

    #[test]
    fn sums_flatten() {
        let e = parse_knot("(T(2,3) # T(2,5)) # (U # T(3,4))").unwrap();
        assert_eq!(e.summands().len(), 4);
    }

    fn arb_knot() -> impl Strategy<Value = KnotExpr> {
        let coprime = (2i64..9, 2i64..15).prop_filter("coprime", |(p, q)| p.gcd(q) == 1 && p != q);
        let leaf = prop_oneof![
            Just(KnotExpr::Unknot),
            coprime.clone().prop_map(|(p, q)| KnotExpr::Torus { p, q }),
        ];
        leaf.prop_recursive(3, 16, 3, move |inner| {
            prop_oneof![
                (2i64..4, -25i64..25, inner.clone())
                    .prop_filter("cable", |(p, q, _)| *q != 0 && p.gcd(q) == 1)
                    .prop_map(|(p, q, k)| KnotExpr::cable(p, q, k)),
                inner.clone().prop_map(|k| KnotExpr::Mirror(Box::new(k))),
                inner.clone().prop_map(|k| KnotExpr::Reverse(Box::new(k))),
                proptest::collection::vec(inner, 2..4).prop_map(KnotExpr::Sum),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(e in arb_knot()) {
            let n = e.normalize();
            prop_assert_eq!(parse_knot(&n.render()).unwrap(), n.clone());
            prop_assert_eq!(n.normalize(), n);
        }

        #[test]
        fn double_mirror_and_reverse_are_identity(e in arb_knot()) {
            let n = e.normalize();
            let mm = KnotExpr::Mirror(Box::new(KnotExpr::Mirror(Box::new(n.clone()))));
            let rr = KnotExpr::Reverse(Box::new(KnotExpr::Reverse(Box::new(n.clone()))));
            prop_assert_eq!(mm.normalize(), n.clone());
            prop_assert_eq!(rr.normalize(), n);
        }

        #[test]
        fn non_coprime_indices_always_rejected(p in 2i64..40, q in 2i64..40, c in 2i64..6) {
            let (p, q) = (p * c, q * c);
            let torus = format!("T({p},{q})");
            let cable = format!("C({p},{q};T(2,3))");
            prop_assert!(matches!(parse_knot(&torus), Err(ParseError::NotCoprime { .. })), "{}", torus);
            prop_assert!(matches!(parse_knot(&cable), Err(ParseError::NotCoprime { .. })), "{}", cable);
        }
    }
}
