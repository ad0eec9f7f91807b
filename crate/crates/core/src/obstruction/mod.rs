//! The d-invariant sliceness obstruction at each prime: build the cover,
//! enumerate metabolizers of its linking form and look for a Spin^c structure
//! with nonzero relative d-invariant in each.

pub mod cover;
pub mod metabolizer;

use std::time::{Duration, Instant};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

pub use cover::{build_cover, family_cover, primes_of, CoverDescription, CoverSummand, SummandKind};
pub use metabolizer::{enumerate_metabolizers, sample_metabolizers, LinkingForm, Metabolizer};

use crate::alexander::{alexander_of, m_invariant};
use crate::dinvariants::{doubled_model_gap, DError, DTable, VSequence};
use crate::exec::Exec;
use crate::knot::KnotExpr;
use crate::rational::{serde_q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error("unsupported knot: {0}")]
    Unsupported(String),
    #[error("companion refused: {0}")]
    Companion(String),
    #[error("k = {0} is neither 1 nor an odd prime")]
    BadPrime(i64),
    #[error("prime {0} does not occur in the knot")]
    PrimeAbsent(i64),
    #[error("primes must be distinct, got {0} twice")]
    RepeatedPrime(i64),
    #[error("copies n must be at least 1")]
    NoCopies,
    #[error("exact enumeration needs n <= {limit}, got {n}; raise the limit or use sampling")]
    LimitExceeded { n: usize, limit: usize },
    #[error("table for k = {found} used with k = {expected}")]
    MismatchedK { expected: i64, found: i64 },
    #[error("d-bar at {element:?} depends on the Spin^c identification")]
    IdentificationDependence { element: Vec<i64> },
    #[error("V-sequence threshold disagrees with the Alexander polynomial: {0}")]
    Threshold(String),
    #[error(transparent)]
    DInvariant(#[from] DError),
}

/// How the residue `i` of a summand is matched with `i · generator` in `H_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identification {
    Direct,
    Conjugate,
}

/// `d̄` of the Spin^c structure labelled by `element`, by additivity.
pub fn dbar_on_element(
    cover: &CoverDescription,
    tables: &[DTable],
    element: &[i64],
    ident: Identification,
) -> Result<Q, ObstructionError> {
    let k = cover.prime;
    let mut total = Q::zero();
    for (t, &x) in tables.iter().zip(element) {
        if t.k != k {
            return Err(ObstructionError::MismatchedK {
                expected: k,
                found: t.k,
            });
        }
        let i = match ident {
            Identification::Direct => x.rem_euclid(k),
            Identification::Conjugate => (-x).rem_euclid(k),
        };
        total += t.dbar[i as usize];
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub basis: Vec<Vec<i64>>,
    /// First element (coefficient-lexicographic) with nonzero `d̄`, if any.
    pub element: Option<Vec<i64>>,
    #[serde(serialize_with = "opt_q")]
    pub dbar: Option<Q>,
}

fn opt_q<S: serde::Serializer>(q: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => serde_q::serialize(q, s),
        None => s.serialize_none(),
    }
}

impl Certificate {
    pub fn obstructs(&self) -> bool {
        self.element.is_some()
    }
}

/// Scan the elements of `m` and return the first with nonzero `d̄`, checking
/// that both identifications agree on every element visited.
pub fn check_metabolizer(
    cover: &CoverDescription,
    tables: &[DTable],
    m: &Metabolizer,
) -> Result<Certificate, ObstructionError> {
    for e in m.elements() {
        let d = dbar_on_element(cover, tables, &e, Identification::Direct)?;
        let c = dbar_on_element(cover, tables, &e, Identification::Conjugate)?;
        if d != c {
            return Err(ObstructionError::IdentificationDependence { element: e });
        }
        if !d.is_zero() {
            return Ok(Certificate {
                basis: m.basis.clone(),
                element: Some(e),
                dbar: Some(d),
            });
        }
    }
    Ok(Certificate {
        basis: m.basis.clone(),
        element: None,
        dbar: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Threshold {
    pub k: i64,
    #[serde(rename = "2m+1")]
    pub two_m_plus_one: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub prime: i64,
    pub metabolizers: usize,
    pub obstructed: bool,
    pub certificates: Vec<Certificate>,
    pub threshold: Threshold,
    /// Present (and false) only for sampled runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<bool>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObstructOptions {
    /// Largest `n` (half the rank of `H_1`) enumerated exactly.
    pub limit_n: usize,
    pub exec: Exec,
    /// Past the limit, sample instead of refusing.
    pub sampling: Option<Sampling>,
}

impl Default for ObstructOptions {
    fn default() -> Self {
        ObstructOptions {
            limit_n: 2,
            exec: Exec::default(),
            sampling: None,
        }
    }
}

pub fn linking_form(cover: &CoverDescription) -> LinkingForm {
    LinkingForm::new(cover.prime, cover.summands.iter().map(CoverSummand::weight).collect())
}

fn two_m_plus_one(cover: &CoverDescription) -> Result<i64, ObstructionError> {
    let delta = alexander_of(&cover.companion).map_err(|e| ObstructionError::Companion(e.to_string()))?;
    let m = m_invariant(&delta);
    VSequence::for_double(&cover.knot_steps, 0)
        .checked_threshold(m)
        .map_err(|e| ObstructionError::Threshold(e.to_string()))?;
    Ok(2 * m + 1)
}

/// Verdict for one prime-primary cover.
pub fn verdict_for_cover(cover: &CoverDescription, opts: &ObstructOptions) -> Result<Verdict, ObstructionError> {
    let start = Instant::now();
    let tables = cover.tables()?;
    let form = linking_form(cover);
    let (metabolizers, exhaustive) = match enumerate_metabolizers(&form, opts.limit_n, opts.exec) {
        Ok(ms) => (ms, None),
        Err(ObstructionError::LimitExceeded { .. }) if opts.sampling.is_some() => {
            let s = opts.sampling.unwrap();
            (sample_metabolizers(&form, s.count, s.seed), Some(false))
        }
        Err(e) => return Err(e),
    };
    let certificates = opts
        .exec
        .try_map(&metabolizers, |m| check_metabolizer(cover, &tables, m))?;
    let obstructed = !certificates.is_empty() && certificates.iter().all(Certificate::obstructs);
    Ok(Verdict {
        prime: cover.prime,
        metabolizers: metabolizers.len(),
        obstructed,
        certificates,
        threshold: Threshold {
            k: cover.prime,
            two_m_plus_one: two_m_plus_one(cover)?,
        },
        exhaustive,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalEntry {
    pub basis: Vec<Vec<i64>>,
    pub meets_diagonal: bool,
    pub diagonal_element: Option<Vec<i64>>,
    pub has_certificate: bool,
}

/// Which metabolizers meet the diagonal subgroup spanned by `alpha_i + beta_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalReport {
    pub prime: i64,
    pub entries: Vec<DiagonalEntry>,
    /// Every metabolizer meets the diagonal or carries a certificate.
    pub holds: bool,
}

pub fn gtilde_intersection_property(
    cover: &CoverDescription,
    metabolizers: &[Metabolizer],
    certificates: &[Certificate],
) -> DiagonalReport {
    let entries: Vec<DiagonalEntry> = metabolizers
        .iter()
        .zip(certificates)
        .map(|(m, c)| {
            let diagonal_element = m
                .elements()
                .into_iter()
                .find(|e| e.iter().any(|&x| x != 0) && e.chunks(2).all(|pair| pair[0] == pair[1]));
            DiagonalEntry {
                basis: m.basis.clone(),
                meets_diagonal: diagonal_element.is_some(),
                diagonal_element,
                has_certificate: c.obstructs(),
            }
        })
        .collect();
    let holds = entries.iter().all(|e| e.meets_diagonal || e.has_certificate);
    DiagonalReport {
        prime: cover.prime,
        entries,
        holds,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub knot: String,
    pub copies: usize,
    pub verdicts: Vec<Verdict>,
    /// Some prime is obstructed, so `n` copies of the knot are not slice.
    pub not_slice: bool,
    pub diagonal: Vec<DiagonalReport>,
    pub scope: String,
    /// Set when the doubled-staircase V-sequence of a companion differs from
    /// the min-convolution of its own; the d-invariants then rest on the model.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Verdicts for explicitly built covers, one per prime.
pub fn obstruct_covers(
    knot: String,
    n: usize,
    covers: Vec<CoverDescription>,
    opts: &ObstructOptions,
) -> Result<ObstructionReport, ObstructionError> {
    let mut verdicts = Vec::new();
    let mut diagonal = Vec::new();
    for cover in &covers {
        let v = verdict_for_cover(cover, opts)?;
        let ms: Vec<Metabolizer> = v
            .certificates
            .iter()
            .map(|c| Metabolizer {
                k: cover.prime,
                basis: c.basis.clone(),
                ambient: cover.summands.len(),
            })
            .collect();
        diagonal.push(gtilde_intersection_property(cover, &ms, &v.certificates));
        verdicts.push(v);
    }
    let not_slice = verdicts.iter().any(|v| v.obstructed);
    let exhaustive = verdicts.iter().all(|v| v.exhaustive.is_none());
    let mut warnings = Vec::new();
    for cover in &covers {
        let top = cover.prime.max(2 * cover.knot_steps.genus());
        if let Some((s, model, conv)) = doubled_model_gap(&cover.knot_steps, top) {
            warnings.push(format!(
                "k = {}: doubled-staircase V_{s} = {model} but min-convolution gives {conv} for {}",
                cover.prime, cover.companion
            ));
        }
    }
    Ok(ObstructionReport {
        knot,
        copies: n,
        warnings,
        not_slice,
        verdicts,
        diagonal,
        scope: if exhaustive {
            format!("exhaustive over all metabolizers for n = {n}; other n are not checked")
        } else {
            format!("sampled metabolizers for n = {n}; not a proof")
        },
    })
}

/// Obstruction for `n` copies of `j`, prime by prime.
pub fn obstruct(j: &KnotExpr, n: usize, opts: &ObstructOptions) -> Result<ObstructionReport, ObstructionError> {
    if n == 0 {
        return Err(ObstructionError::NoCopies);
    }
    let covers = primes_of(j)?
        .into_iter()
        .map(|p| build_cover(j, p, n))
        .collect::<Result<Vec<_>, _>>()?;
    if covers.is_empty() {
        return Err(ObstructionError::Unsupported(format!(
            "{j} has no cable or torus summands"
        )));
    }
    obstruct_covers(j.render(), n, covers, opts)
}

/// `K_{2,k_1} # -T_{2,k_1} # -K_{2,k_2} # T_{2,k_2} # …` with alternating
/// signs, one pair per entry of `primes`. `k = 1` is allowed and gives a
/// trivial cover.
pub fn family_knot(companion: &KnotExpr, primes: &[i64]) -> String {
    primes
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let pair = format!("C(2,{k};{companion}) # -T(2,{k})");
            if i % 2 == 0 {
                pair
            } else {
                format!("-({pair})")
            }
        })
        .collect::<Vec<_>>()
        .join(" # ")
}

pub fn obstruct_family(
    companion: &KnotExpr,
    primes: &[i64],
    n: usize,
    opts: &ObstructOptions,
) -> Result<ObstructionReport, ObstructionError> {
    if n == 0 {
        return Err(ObstructionError::NoCopies);
    }
    let mut seen = Vec::new();
    for &k in primes {
        if seen.contains(&k) {
            return Err(ObstructionError::RepeatedPrime(k));
        }
        seen.push(k);
    }
    let covers = primes
        .iter()
        .enumerate()
        .map(|(i, &k)| family_cover(companion, k, n, i % 2 == 0))
        .collect::<Result<Vec<_>, _>>()?;
    obstruct_covers(family_knot(companion, primes), n, covers, opts)
}
