//! Integer Laurent polynomials and Alexander polynomials of torus knots,
//! cables and connected sums. Everything here is exact integer arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::knot::KnotExpr;

/// Laurent polynomial in `t` with integer coefficients. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlexanderError {
    #[error("indices ({p},{q}) are not coprime")]
    NotCoprime { p: i64, q: i64 },
    #[error("torus indices ({p},{q}) must both be at least 2")]
    DegenerateTorus { p: i64, q: i64 },
    #[error("cable winding number {p} must be at least 1")]
    BadWinding { p: i64 },
    #[error("polynomial division left a nonzero remainder")]
    InexactDivision,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial is not symmetric under t -> 1/t: {0}")]
    NotSymmetric(LaurentPoly),
    #[error("polynomial does not satisfy p(1) = 1: {0}")]
    NotNormalized(LaurentPoly),
    #[error("exponent overflow")]
    Overflow,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(coeff: i64, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in pairs {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(exp).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn eval_at_one(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(&e, &c)| self.coeff(-e) == c)
    }

    pub fn shift(&self, by: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, &c)| (e + by, c)).collect(),
        }
    }

    /// Substitute `t -> t^k`.
    pub fn substitute_power(&self, k: i64) -> Self {
        Self::from_pairs(self.terms.iter().map(|(&e, &c)| (e * k, c)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, &c) in &other.terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self::from_pairs(self.terms.iter().map(|(&e, &c)| (e, -c)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Exact division over the integers. Fails unless the remainder vanishes.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, AlexanderError> {
        let (d_top, d_lead) = match divisor.terms.iter().next_back() {
            Some((&e, &c)) => (e, c),
            None => return Err(AlexanderError::DivisionByZero),
        };
        let d_low = divisor.min_exp().unwrap();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((&r_top, &r_lead)) = rem.terms.iter().next_back() {
            // once the remainder's top is below divisor span no term can cancel
            if r_top - d_top < rem.min_exp().unwrap() - d_low {
                return Err(AlexanderError::InexactDivision);
            }
            let (c, r) = r_lead.div_rem(&d_lead);
            if r != 0 {
                return Err(AlexanderError::InexactDivision);
            }
            let e = r_top - d_top;
            quot.add_term(e, c);
            rem = rem.sub(&divisor.mul(&Self::monomial(c, e)));
        }
        Ok(quot)
    }

    /// Shift so that the support is centred on exponent 0.
    pub fn recentered(&self) -> Result<Self, AlexanderError> {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => {
                if (lo + hi) % 2 != 0 {
                    return Err(AlexanderError::NotSymmetric(self.clone()));
                }
                Ok(self.shift(-(lo + hi) / 2))
            }
            _ => Ok(self.clone()),
        }
    }

    /// Top exponent of a symmetric polynomial.
    pub fn genus(&self) -> i64 {
        self.max_exp().unwrap_or(0)
    }

    fn check_alexander(&self) -> Result<(), AlexanderError> {
        if !self.is_symmetric() {
            return Err(AlexanderError::NotSymmetric(self.clone()));
        }
        if self.eval_at_one() != 1 {
            return Err(AlexanderError::NotNormalized(self.clone()));
        }
        Ok(())
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&e, &c)) in self.terms.iter().rev().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if e == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[i64; 2]> = self.terms().map(|(e, c)| [e, c]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[i64; 2]>::deserialize(d)?;
        Ok(Self::from_pairs(pairs.into_iter().map(|[e, c]| (e, c))))
    }
}

fn t_pow_minus_one(n: i64) -> LaurentPoly {
    LaurentPoly::from_pairs([(n, 1), (0, -1)])
}

/// Symmetrized Alexander polynomial of `T(p,q)`:
/// `(t^{pq} - 1)(t - 1) / ((t^p - 1)(t^q - 1))`, recentered.
pub fn torus_alexander(p: i64, q: i64) -> Result<LaurentPoly, AlexanderError> {
    let (p, q) = (p.abs(), q.abs());
    if p < 2 || q < 2 {
        return Err(AlexanderError::DegenerateTorus { p, q });
    }
    if p.gcd(&q) != 1 {
        return Err(AlexanderError::NotCoprime { p, q });
    }
    let pq = p.checked_mul(q).ok_or(AlexanderError::Overflow)?;
    let num = t_pow_minus_one(pq).mul(&t_pow_minus_one(1));
    let den = t_pow_minus_one(p).mul(&t_pow_minus_one(q));
    let delta = num.div_exact(&den)?.recentered()?;
    delta.check_alexander()?;
    Ok(delta)
}

/// `Δ_{K_{p,q}}(t) = Δ_K(t^p) · Δ_{T(p,q)}(t)`. A negative `q` gives the same
/// polynomial as `|q|`; `|q| = 1` contributes a trivial torus factor.
pub fn cable_alexander(delta: &LaurentPoly, p: i64, q: i64) -> Result<LaurentPoly, AlexanderError> {
    if p < 1 {
        return Err(AlexanderError::BadWinding { p });
    }
    if p.gcd(&q) != 1 {
        return Err(AlexanderError::NotCoprime { p, q });
    }
    delta.check_alexander()?;
    let torus = if p == 1 || q.abs() == 1 {
        LaurentPoly::one()
    } else {
        torus_alexander(p, q)?
    };
    let out = delta.substitute_power(p).mul(&torus).recentered()?;
    out.check_alexander()?;
    Ok(out)
}

/// Alexander polynomial of an arbitrary knot expression (mirrors and
/// reverses do not change it; connected sums multiply).
pub fn alexander_of(expr: &KnotExpr) -> Result<LaurentPoly, AlexanderError> {
    match expr {
        KnotExpr::Unknot => Ok(LaurentPoly::one()),
        KnotExpr::Torus { p, q } => torus_alexander(*p, *q),
        KnotExpr::Cable { p, q, companion } => cable_alexander(&alexander_of(companion)?, *p, *q),
        KnotExpr::Mirror(inner) | KnotExpr::Reverse(inner) => alexander_of(inner),
        KnotExpr::Sum(children) => children
            .iter()
            .try_fold(LaurentPoly::one(), |acc, c| Ok(acc.mul(&alexander_of(c)?))),
    }
}

/// `m(P) = d_n - d_{n-1}` for the two highest exponents; 0 for monomials.
pub fn m_invariant(delta: &LaurentPoly) -> i64 {
    let mut top = delta.terms.keys().rev();
    match (top.next(), top.next()) {
        (Some(a), Some(b)) => a - b,
        _ => 0,
    }
}

/// Alexander polynomial of L-space type `t^g - t^{g-1} + ... - t^{1-g} + t^{-g}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LSpaceForm {
    /// `n_0 < n_1 < ... < n_{2m}`; coefficient of `t^{n_i}` is `(-1)^i`.
    pub exponents: Vec<i64>,
    pub genus: i64,
    /// Gap between the two highest exponents; 0 for the unknot.
    pub gap: i64,
}

impl LSpaceForm {
    /// Number of B-generators `m` of the staircase.
    pub fn half_len(&self) -> usize {
        self.exponents.len() / 2
    }

    pub fn polynomial(&self) -> LaurentPoly {
        LaurentPoly::from_pairs(
            self.exponents
                .iter()
                .enumerate()
                .map(|(i, &e)| (e, if i % 2 == 0 { 1 } else { -1 })),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LSpaceRefusal {
    #[error("zero polynomial")]
    Zero,
    #[error("coefficient {coeff} of t^{exp} is not +1 or -1")]
    Coefficient { exp: i64, coeff: i64 },
    #[error("leading coefficient is {0}, expected +1")]
    LeadingSign(i64),
    #[error("signs do not alternate at t^{exp}")]
    NotAlternating { exp: i64 },
    #[error("not symmetric: t^{exp} has no matching t^{}", -exp)]
    NotSymmetric { exp: i64 },
    #[error("second exponent is {second}, expected genus - 1 = {}", genus - 1)]
    TopGap { genus: i64, second: i64 },
}

/// Decide whether `delta` has L-space form and extract its exponent data.
pub fn is_lspace_form(delta: &LaurentPoly) -> Result<LSpaceForm, LSpaceRefusal> {
    if delta.is_zero() {
        return Err(LSpaceRefusal::Zero);
    }
    if let Some((exp, coeff)) = delta.terms().find(|&(_, c)| c.abs() != 1) {
        return Err(LSpaceRefusal::Coefficient { exp, coeff });
    }
    let lead = delta.terms.values().next_back().copied().unwrap();
    if lead != 1 {
        return Err(LSpaceRefusal::LeadingSign(lead));
    }
    let terms: Vec<(i64, i64)> = delta.terms().collect();
    for w in terms.windows(2) {
        if w[0].1 == w[1].1 {
            return Err(LSpaceRefusal::NotAlternating { exp: w[1].0 });
        }
    }
    if let Some(&(exp, _)) = terms.iter().find(|&&(e, c)| delta.coeff(-e) != c) {
        return Err(LSpaceRefusal::NotSymmetric { exp });
    }
    let exponents: Vec<i64> = terms.iter().map(|&(e, _)| e).collect();
    let genus = *exponents.last().unwrap();
    let gap = m_invariant(delta);
    if genus > 0 && gap != 1 {
        return Err(LSpaceRefusal::TopGap {
            genus,
            second: genus - gap,
        });
    }
    Ok(LSpaceForm { exponents, genus, gap })
}
