//! Levine–Tristram signature jumps of iterated torus knots, and the
//! linear-independence check for relations among `T_{2,k}` and `K_{2,k}`.
//!
//! A [`JumpFunction`] stores half-jumps symmetrically: `J(θ) = J(1 - θ)`, with
//! `J(θ)` the half-step of `σ(e^{2πiθ})` met when moving away from `θ = 1/2`.
//! For `θ < 1/2` this is the ordinary left-to-right half-step.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::One;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::knot::{KnotExpr, ParseError, Parser};
use crate::obstruction::cover::{classify, companion_steps, FamilyTerm};
use crate::obstruction::{family_cover, obstruct_covers, ObstructOptions, ObstructionError, ObstructionReport};
use crate::rational::{fmt_q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("torus indices ({p},{q}) are not coprime")]
    NotCoprime { p: i64, q: i64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("hypothesis failed at k = {k}: {reason}")]
    Hypothesis { k: i64, reason: String },
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JumpFunction {
    jumps: BTreeMap<Q, i64>,
}

impl Serialize for JumpFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            theta: String,
            jump: i64,
        }
        s.collect_seq(self.jumps.iter().map(|(t, &j)| Entry {
            theta: fmt_q(t),
            jump: j,
        }))
    }
}

fn half() -> Q {
    Q::new(1, 2)
}

impl JumpFunction {
    /// From left-to-right half-steps on `(0, 1)`.
    fn from_raw(raw: BTreeMap<Q, i64>) -> Self {
        let jumps = raw
            .into_iter()
            .map(|(t, j)| (t, if t < half() { j } else { -j }))
            .filter(|&(_, j)| j != 0)
            .collect();
        JumpFunction { jumps }
    }

    fn raw(&self) -> impl Iterator<Item = (Q, i64)> + '_ {
        self.jumps.iter().map(|(&t, &j)| (t, if t < half() { j } else { -j }))
    }

    pub fn at(&self, theta: Q) -> i64 {
        self.jumps.get(&theta).copied().unwrap_or(0)
    }

    /// The jump set `r(K)`.
    pub fn points(&self) -> Vec<Q> {
        self.jumps.keys().copied().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Q, i64)> + '_ {
        self.jumps.iter().map(|(&t, &j)| (t, j))
    }

    pub fn is_zero(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.jumps.iter().all(|(&t, &j)| self.at(Q::one() - t) == j)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, 1)
    }

    pub fn add_scaled(&self, other: &Self, c: i64) -> Self {
        let mut jumps = self.jumps.clone();
        for (&t, &j) in &other.jumps {
            *jumps.entry(t).or_insert(0) += c * j;
        }
        jumps.retain(|_, j| *j != 0);
        JumpFunction { jumps }
    }

    pub fn neg(&self) -> Self {
        JumpFunction::default().add_scaled(self, -1)
    }

    /// Sum of half-jumps over `(0, 1/2]`; equals `σ(-1) / 2`.
    pub fn half_sum(&self) -> i64 {
        self.jumps.range(..=half()).map(|(_, j)| j).sum()
    }
}

/// Jumps of `T(p, q)` by counting the lattice points `i/p + j/q`,
/// `0 < i < p`, `0 < j < q`: one with value `x < 1` contributes a step of +1
/// at `x`, one with `x > 1` a step of -1 at `x - 1`.
pub fn torus_jump(p: i64, q: i64) -> Result<JumpFunction, SignatureError> {
    if p.gcd(&q) != 1 {
        return Err(SignatureError::NotCoprime { p, q });
    }
    let (a, b) = (p.abs(), q.abs());
    let mut raw: BTreeMap<Q, i64> = BTreeMap::new();
    for i in 1..a {
        for j in 1..b {
            let x = Q::new(i, a) + Q::new(j, b);
            let (t, step) = if x < Q::one() { (x, 1) } else { (x - Q::one(), -1) };
            *raw.entry(t).or_insert(0) += step;
        }
    }
    let f = JumpFunction::from_raw(raw);
    Ok(if (p < 0) != (q < 0) { f.neg() } else { f })
}

/// `σ_{K_{p,q}}(ω) = σ_K(ω^p) + σ_{T(p,q)}(ω)`.
pub fn cable_jump(base: &JumpFunction, p: i64, q: i64) -> Result<JumpFunction, SignatureError> {
    let mut raw: BTreeMap<Q, i64> = BTreeMap::new();
    for (phi, j) in base.raw() {
        for t in 0..p {
            *raw.entry((phi + t) / p).or_insert(0) += j;
        }
    }
    Ok(JumpFunction::from_raw(raw).add(&torus_jump(p, q)?))
}

pub fn jump_function(expr: &KnotExpr) -> Result<JumpFunction, SignatureError> {
    Ok(match expr {
        KnotExpr::Unknot => JumpFunction::default(),
        KnotExpr::Torus { p, q } => torus_jump(*p, *q)?,
        KnotExpr::Cable { p, q, companion } => cable_jump(&jump_function(companion)?, *p, *q)?,
        KnotExpr::Mirror(inner) => jump_function(inner)?.neg(),
        KnotExpr::Reverse(inner) => jump_function(inner)?,
        KnotExpr::Sum(children) => children.iter().try_fold(JumpFunction::default(), |acc, c| {
            Ok::<_, SignatureError>(acc.add(&jump_function(c)?))
        })?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationTerm {
    pub coeff: i64,
    #[serde(serialize_with = "as_text")]
    pub knot: KnotExpr,
}

fn as_text<S: Serializer>(k: &KnotExpr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&k.render())
}

/// Parse `c_1*K_1 + c_2*K_2 - K_3 …`. Coefficients default to 1; a sum
/// inside a term needs parentheses. The empty string is the empty relation.
pub fn parse_relation(text: &str) -> Result<Vec<RelationTerm>, SignatureError> {
    let mut p = Parser::new(text);
    let mut out = Vec::new();
    if p.peek().is_none() {
        return Ok(out);
    }
    let mut first = true;
    loop {
        let sign = if p.eat(b'+') {
            1
        } else if p.eat(b'-') {
            -1
        } else if first {
            1
        } else {
            return Err(p.syntax(&["'+'", "'-'", "end of input"]).into());
        };
        first = false;
        let coeff = if p.peek().is_some_and(|c| c.is_ascii_digit()) {
            let c = p.int()?;
            if !p.eat(b'*') {
                return Err(p.syntax(&["'*'"]).into());
            }
            c
        } else {
            1
        };
        let knot = p.term()?.normalize();
        out.push(RelationTerm {
            coeff: sign * coeff,
            knot,
        });
        if p.peek().is_none() {
            return Ok(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermJump {
    pub coeff: i64,
    pub knot: String,
    pub jump: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Probe {
    pub k: i64,
    #[serde(with = "crate::rational::serde_q")]
    pub theta: Q,
    pub terms: Vec<TermJump>,
    pub total: i64,
    /// Signed multiplicity of `T_{2,k}`.
    pub n: i64,
    /// Signed multiplicity of `K_{2,k}`.
    pub m: i64,
    /// `total = 0`, which forces `n = -m`.
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub k: i64,
    pub exceeds_threshold: bool,
    /// Literal check `1/(2k) ∉ r(K)`.
    pub probe_outside_rk: bool,
    /// Check the probe actually needs: `1/k ∉ r(K)`, so `K_{2,k}` jumps by -1.
    pub double_outside_rk: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceCertificate {
    pub relation: Vec<RelationTerm>,
    pub companion: Option<String>,
    pub hypotheses: Vec<Hypothesis>,
    pub probes: Vec<Probe>,
    /// Some probe has nonzero total jump.
    pub signature_obstructed: bool,
    /// `Σ m_k (K_{2,k} - T_{2,k})`, present when every probe forced `n = -m`.
    pub residual: Option<String>,
    pub obstruction: Option<ObstructionReport>,
    pub not_slice: bool,
}

/// Evaluate the relation's jump at `θ = 1/(2k)` for each prime `k`; when all
/// totals vanish, hand the residual to the d-invariant obstruction.
pub fn independence_check(
    relation: &[RelationTerm],
    opts: &ObstructOptions,
) -> Result<IndependenceCertificate, SignatureError> {
    let mut companion: Option<KnotExpr> = None;
    let mut by_prime: BTreeMap<i64, (i64, i64)> = BTreeMap::new();
    for t in relation {
        let family =
            classify(&t.knot)?.ok_or_else(|| ObstructionError::Unsupported(format!("unknot term {}", t.knot)))?;
        let signed = |positive: bool| if positive { t.coeff } else { -t.coeff };
        match family {
            FamilyTerm::Torus { k, positive } => by_prime.entry(k).or_default().0 += signed(positive),
            FamilyTerm::Cable {
                k,
                positive,
                companion: c,
            } => {
                if companion.as_ref().is_some_and(|prev| *prev != c) {
                    return Err(ObstructionError::Unsupported("cables over different companions".into()).into());
                }
                companion = Some(c);
                by_prime.entry(k).or_default().1 += signed(positive);
            }
        }
    }
    let companion_jumps = companion.as_ref().map(jump_function).transpose()?.unwrap_or_default();
    let two_m_plus_one = match &companion {
        Some(c) => {
            companion_steps(c)?;
            let delta = crate::alexander::alexander_of(c).map_err(|e| ObstructionError::Companion(e.to_string()))?;
            2 * crate::alexander::m_invariant(&delta) + 1
        }
        None => 1,
    };
    let jumps: Vec<JumpFunction> = relation
        .iter()
        .map(|t| jump_function(&t.knot))
        .collect::<Result<_, _>>()?;

    let mut hypotheses = Vec::new();
    let mut probes = Vec::new();
    for (&k, &(n, m)) in &by_prime {
        if !crate::dinvariants::is_odd_prime(k) {
            return Err(SignatureError::Hypothesis {
                k,
                reason: "k is not an odd prime".into(),
            });
        }
        let theta = Q::new(1, 2 * k);
        let h = Hypothesis {
            k,
            exceeds_threshold: k > two_m_plus_one,
            probe_outside_rk: companion_jumps.at(theta) == 0,
            double_outside_rk: companion_jumps.at(Q::new(1, k)) == 0,
        };
        if !h.exceeds_threshold {
            return Err(SignatureError::Hypothesis {
                k,
                reason: format!("k <= 2m(K)+1 = {two_m_plus_one}"),
            });
        }
        let terms: Vec<TermJump> = relation
            .iter()
            .zip(&jumps)
            .map(|(t, j)| TermJump {
                coeff: t.coeff,
                knot: t.knot.render(),
                jump: j.at(theta),
            })
            .collect();
        // only T_{2,k} and K_{2,k} may jump at the probe, each by ∓1
        for (t, tj) in relation.iter().zip(&terms) {
            let expected = match classify(&t.knot)? {
                Some(FamilyTerm::Torus { k: kt, positive }) | Some(FamilyTerm::Cable { k: kt, positive, .. })
                    if kt == k =>
                {
                    if positive {
                        -1
                    } else {
                        1
                    }
                }
                _ => 0,
            };
            if tj.jump != expected {
                return Err(SignatureError::Hypothesis {
                    k,
                    reason: format!("{} jumps by {} at 1/{}, expected {expected}", tj.knot, tj.jump, 2 * k),
                });
            }
        }
        let total: i64 = terms.iter().map(|t| t.coeff * t.jump).sum();
        probes.push(Probe {
            k,
            theta,
            terms,
            total,
            n,
            m,
            forced: total == 0,
        });
        hypotheses.push(h);
    }

    let signature_obstructed = probes.iter().any(|p| p.total != 0);
    let (residual, obstruction) = if signature_obstructed || probes.iter().all(|p| p.m == 0) {
        (None, None)
    } else {
        let c = companion.clone().unwrap();
        let live: Vec<&Probe> = probes.iter().filter(|p| p.m != 0).collect();
        let text = live
            .iter()
            .map(|p| format!("{}*(C(2,{k};{c}) # -T(2,{k}))", p.m, k = p.k))
            .collect::<Vec<_>>()
            .join(" + ");
        let covers = live
            .iter()
            .map(|p| family_cover(&c, p.k, p.m.unsigned_abs() as usize, p.m > 0))
            .collect::<Result<Vec<_>, _>>()?;
        let report = obstruct_covers(text.clone(), 1, covers, opts)?;
        (Some(text), Some(report))
    };
    let not_slice = signature_obstructed || obstruction.as_ref().is_some_and(|r| r.not_slice);
    Ok(IndependenceCertificate {
        relation: relation.to_vec(),
        companion: companion.map(|c| c.render()),
        hypotheses,
        probes,
        signature_obstructed,
        residual,
        obstruction,
        not_slice,
    })
}
