//! Prime-primary part of `H_1` of the branched double cover of a family member.
//!
//! `Σ_2(K_{2,k}) = S^3_k(K # K^r)` and `Σ_2(T_{2,k}) = S^3_k(U) = L(k, 1)`,
//! both with `H_1 = Z/k`.

use serde::Serialize;

use super::ObstructionError;
use crate::alexander::{alexander_of, is_lspace_form};
use crate::dinvariants::{is_odd_prime, relative_dbar_family, DTable, Summand};
use crate::knot::KnotExpr;
use crate::staircase::{steps_from_alexander, StepVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SummandKind {
    /// `S^3_k(K # K^r)`, generator `alpha_i`.
    Surgery,
    /// `L(k, 1)`, generator `beta_i`.
    Lens,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverSummand {
    pub positive: bool,
    pub kind: SummandKind,
    pub label: String,
}

impl CoverSummand {
    /// Self-linking of the generator times `k`. Both `S^3_k(K # K^r)` and
    /// `L(k, 1) = S^3_k(U)` have `+1/k`; orientation reversal flips it.
    pub fn weight(&self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverDescription {
    pub prime: i64,
    pub companion: KnotExpr,
    pub knot_steps: StepVector,
    /// Copies interleaved: `alpha_1, beta_1, alpha_2, beta_2, …`.
    pub summands: Vec<CoverSummand>,
}

impl CoverDescription {
    /// `(F_k)^{2n}` has dimension `2n`; this is `n`.
    pub fn half_rank(&self) -> usize {
        self.summands.len() / 2
    }

    /// Relative d-invariant table of every summand, signs applied.
    pub fn tables(&self) -> Result<Vec<DTable>, ObstructionError> {
        self.summands
            .iter()
            .map(|s| {
                let summand = match s.kind {
                    SummandKind::Surgery => Summand::Surgery {
                        knot_steps: self.knot_steps.clone(),
                        positive: s.positive,
                    },
                    SummandKind::Lens => Summand::Lens { positive: s.positive },
                };
                Ok(relative_dbar_family(&summand, self.prime)?)
            })
            .collect()
    }
}

/// Steps of an L-space companion. Mirrors and sums are refused: their
/// Alexander polynomial may still have L-space form while the complex is not
/// a positive staircase.
pub fn companion_steps(companion: &KnotExpr) -> Result<StepVector, ObstructionError> {
    if companion.contains_mirror_or_sum() {
        return Err(ObstructionError::Companion(format!(
            "{companion} is not a positive iterated torus knot"
        )));
    }
    let delta = alexander_of(companion).map_err(|e| ObstructionError::Companion(e.to_string()))?;
    let form = is_lspace_form(&delta).map_err(|e| ObstructionError::Companion(e.to_string()))?;
    Ok(steps_from_alexander(&form))
}

fn check_prime(k: i64) -> Result<(), ObstructionError> {
    if k == 1 || is_odd_prime(k) {
        Ok(())
    } else {
        Err(ObstructionError::BadPrime(k))
    }
}

/// Cover for `c·n` copies of `±(K_{2,k} # -T_{2,k})` at the prime `k`.
pub fn family_cover(
    companion: &KnotExpr,
    prime: i64,
    copies: usize,
    positive: bool,
) -> Result<CoverDescription, ObstructionError> {
    check_prime(prime)?;
    let knot_steps = companion_steps(companion)?;
    let mut summands = Vec::with_capacity(2 * copies);
    for i in 1..=copies {
        summands.push(CoverSummand {
            positive,
            kind: SummandKind::Surgery,
            label: format!("alpha_{i}"),
        });
        summands.push(CoverSummand {
            positive: !positive,
            kind: SummandKind::Lens,
            label: format!("beta_{i}"),
        });
    }
    Ok(CoverDescription {
        prime,
        companion: companion.clone(),
        knot_steps,
        summands,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum FamilyTerm {
    Cable {
        k: i64,
        positive: bool,
        companion: KnotExpr,
    },
    Torus {
        k: i64,
        positive: bool,
    },
}

impl FamilyTerm {
    pub(crate) fn prime(&self) -> i64 {
        match self {
            FamilyTerm::Cable { k, .. } | FamilyTerm::Torus { k, .. } => *k,
        }
    }
}

/// Read a summand as `±C(2,k;K)` or `±T(2,k)`; unknot summands are dropped.
pub(crate) fn classify(term: &KnotExpr) -> Result<Option<FamilyTerm>, ObstructionError> {
    let (inner, positive) = match term {
        KnotExpr::Mirror(inner) => (inner.as_ref(), false),
        other => (other, true),
    };
    match inner {
        KnotExpr::Unknot => Ok(None),
        KnotExpr::Cable { p: 2, q, companion } if *q > 0 => Ok(Some(FamilyTerm::Cable {
            k: *q,
            positive,
            companion: (**companion).clone(),
        })),
        KnotExpr::Torus { p: 2, q } => Ok(Some(FamilyTerm::Torus { k: *q, positive })),
        _ => Err(ObstructionError::Unsupported(format!(
            "summand {term} is not of the form ±C(2,k;K) or ±T(2,k)"
        ))),
    }
}

pub(crate) fn family_terms(j: &KnotExpr) -> Result<Vec<FamilyTerm>, ObstructionError> {
    let mut out = Vec::new();
    for t in j.normalize().summands() {
        if let Some(term) = classify(t)? {
            out.push(term);
        }
    }
    Ok(out)
}

/// Primes occurring in `j`, ascending.
pub fn primes_of(j: &KnotExpr) -> Result<Vec<i64>, ObstructionError> {
    let mut ps: Vec<i64> = family_terms(j)?.iter().map(FamilyTerm::prime).collect();
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

/// Prime-`prime` part of `H_1(Σ_2(nJ))`. Summands at other primes have order
/// coprime to `prime` and are dropped.
pub fn build_cover(j: &KnotExpr, prime: i64, n: usize) -> Result<CoverDescription, ObstructionError> {
    check_prime(prime)?;
    let terms: Vec<FamilyTerm> = family_terms(j)?.into_iter().filter(|t| t.prime() == prime).collect();
    if terms.is_empty() {
        return Err(ObstructionError::PrimeAbsent(prime));
    }
    let mut cables = Vec::new();
    let mut tori = Vec::new();
    let mut companion: Option<KnotExpr> = None;
    for t in terms {
        match t {
            FamilyTerm::Cable {
                positive, companion: c, ..
            } => {
                match &companion {
                    Some(prev) if *prev != c => {
                        return Err(ObstructionError::Unsupported(format!(
                            "cables over different companions {prev} and {c}"
                        )))
                    }
                    _ => companion = Some(c),
                }
                cables.push(positive);
            }
            FamilyTerm::Torus { positive, .. } => tori.push(positive),
        }
    }
    let sign = cables
        .first()
        .copied()
        .ok_or_else(|| ObstructionError::Unsupported(format!("no cable summand at k = {prime}")))?;
    let balanced = cables.len() == tori.len() && cables.iter().all(|&s| s == sign) && tori.iter().all(|&s| s != sign);
    if !balanced {
        return Err(ObstructionError::Unsupported(format!(
            "summands at k = {prime} are not copies of ±(C(2,{prime};K) # -T(2,{prime}))"
        )));
    }
    family_cover(&companion.unwrap(), prime, cables.len() * n, sign)
}
