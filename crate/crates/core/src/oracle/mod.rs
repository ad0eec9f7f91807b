//! Brute-force verification layer.
//!
//! Staircases are materialized as finite truncated complexes, restricted to
//! the regions `A_s = {max(x, y - s) >= 0}` and `B = {x >= 0}`, and their
//! homology is computed by rank over the two-element field. Nothing here uses
//! the closed-form containment formula of [`crate::dinvariants`], so the two
//! can be compared.

pub mod complex;
pub mod gf2;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use complex::{materialize, materialize_complex, quotient_by_double, tensor, BigradedComplex, CGen};

use crate::staircase::{double, LatticeStaircase, StaircaseError, StepVector};
use gf2::{BitRow, Echelon};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("window {window} is too small; need at least {need}")]
    WindowTooSmall { window: i64, need: i64 },
    #[error("complex is already truncated")]
    AlreadyTruncated,
    #[error("generator ({x},{y}) lies outside window {window}")]
    WindowOverflow { x: i64, y: i64, window: i64 },
    #[error("arrow {from} -> {to} does not lower the filtration")]
    NotFiltered { from: usize, to: usize },
    #[error("d^2 is nonzero from generator {from} to {to}")]
    DSquaredNonzero { from: usize, to: usize },
    #[error("subcomplex check failed: {0}")]
    SubcomplexCheck(String),
    #[error("no translate is fully inside the region; window too small")]
    EmptyRegion,
    #[error("tower bottom touches the truncation boundary at window {0}")]
    BoundaryTouch(i64),
    #[error("result changed from {small} to {large} when the window grew; truncation is too tight")]
    Unstable { small: i64, large: i64 },
    #[error("inclusion scan and homology disagree at translate {shift}")]
    ConventionMismatch { shift: i64 },
    #[error(transparent)]
    Staircase(#[from] StaircaseError),
}

/// Upward-closed regions of the `(i, j)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Whole,
    /// `B^+ = {x >= 0}`.
    RightHalf,
    /// `A_s^+ = {max(x, y - s) >= 0}`.
    Corner(i64),
}

impl Region {
    pub fn contains(self, x: i64, y: i64) -> bool {
        match self {
            Region::Whole => true,
            Region::RightHalf => x >= 0,
            Region::Corner(s) => x.max(y - s) >= 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    /// Total rank of homology of the region-restricted complex.
    pub rank: usize,
    /// Rank per diagonal translate.
    pub per_shift: BTreeMap<i64, usize>,
    /// Maximal `m` such that the translate `U^m · base` lies fully in the region.
    pub bottom_shift: Option<i64>,
}

struct Block {
    gens: Vec<usize>,
    arrows: Vec<(usize, usize)>,
}

/// Split into translates; arrows never cross translates.
fn blocks(c: &BigradedComplex) -> BTreeMap<i64, Block> {
    let mut out: BTreeMap<i64, Block> = BTreeMap::new();
    let mut local = vec![0usize; c.gens.len()];
    for (i, g) in c.gens.iter().enumerate() {
        let b = out.entry(g.shift).or_insert_with(|| Block {
            gens: Vec::new(),
            arrows: Vec::new(),
        });
        local[i] = b.gens.len();
        b.gens.push(i);
    }
    for &(a, b) in &c.arrows {
        let (sa, sb) = (c.gens[a].shift, c.gens[b].shift);
        assert_eq!(sa, sb, "arrow between translates");
        out.get_mut(&sa).unwrap().arrows.push((local[a], local[b]));
    }
    out
}

fn boundary_echelon(block: &Block) -> Echelon {
    let n = block.gens.len();
    let mut rows: Vec<BitRow> = (0..n).map(|_| BitRow::zeros(n)).collect();
    for &(a, b) in &block.arrows {
        rows[a].flip(b);
    }
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e
}

/// Homology rank of `c` restricted to `region`, with the full-inclusion scan
/// for the lowest translate.
pub fn homology_rank(c: &BigradedComplex, region: Region) -> HomologyReport {
    let sub = c.restrict(|g| region.contains(g.x, g.y));
    let per_shift: BTreeMap<i64, usize> = blocks(&sub)
        .iter()
        .map(|(&s, b)| (s, b.gens.len() - 2 * boundary_echelon(b).rank()))
        .collect();
    let rank = per_shift.values().sum();

    let mut included: BTreeMap<i64, bool> = BTreeMap::new();
    for g in &c.gens {
        let e = included.entry(g.shift).or_insert(true);
        *e &= region.contains(g.x, g.y);
    }
    let bottom_shift = included.iter().find(|(_, &inc)| inc).map(|(&shift, _)| -shift);
    HomologyReport {
        rank,
        per_shift,
        bottom_shift,
    }
}

/// Lowest translate on which the cycle labelled `rep` survives in homology of
/// the region-restricted complex, reported as a bottom shift `m = -shift`.
pub fn tower_bottom(c: &BigradedComplex, region: Region, rep: &[usize]) -> Option<i64> {
    let sub = c.restrict(|g| region.contains(g.x, g.y));
    for (&shift, block) in &blocks(&sub) {
        let Some(pos) = block.gens.iter().position(|&i| sub.gens[i].label == rep) else {
            continue;
        };
        let e = boundary_echelon(block);
        let mut z = BitRow::zeros(block.gens.len());
        z.flip(pos);
        if !e.contains(&z) {
            return Some(-shift);
        }
    }
    None
}

/// Bottom shift of a staircase complex in `region`, cross-checked three ways:
/// the full-inclusion scan, the tower of the `a_1` class, and the per-translate
/// homology ranks (nonzero exactly on fully included translates).
pub fn staircase_bottom_shift(c: &BigradedComplex, region: Region) -> Result<i64, OracleError> {
    let report = homology_rank(c, region);
    let tower = tower_bottom(c, region, &[0]).ok_or(OracleError::EmptyRegion)?;
    let scan = report.bottom_shift.ok_or(OracleError::EmptyRegion)?;
    if tower != scan {
        return Err(OracleError::ConventionMismatch { shift: -tower });
    }
    let full_copy = c
        .gens
        .iter()
        .filter(|g| g.shift == *c.shifts().iter().next().unwrap())
        .count();
    for (&shift, &rank) in &report.per_shift {
        let inside = c
            .gens
            .iter()
            .filter(|g| g.shift == shift && region.contains(g.x, g.y))
            .count();
        let full = inside == full_copy;
        if (rank != 0) != full || rank > 1 {
            return Err(OracleError::ConventionMismatch { shift });
        }
    }
    if -scan == *c.shifts().iter().next().unwrap() {
        return Err(OracleError::BoundaryTouch(c.window.unwrap_or(0)));
    }
    Ok(scan)
}

/// Default truncation: top coordinate plus the longest step plus 4.
pub fn default_window(stair: &LatticeStaircase) -> i64 {
    let top = stair.generators.iter().map(|g| g.x.max(g.y)).max().unwrap_or(0);
    top + stair.steps.max_step() + 4
}

fn v_at_window(stair: &LatticeStaircase, s: i64, window: i64) -> Result<i64, OracleError> {
    let c = materialize(stair, window)?;
    let b = staircase_bottom_shift(&c, Region::RightHalf)?;
    let a = staircase_bottom_shift(&c, Region::Corner(s))?;
    Ok(a - b)
}

/// `V_s` of the staircase `steps` from truncated homology: bottom shift of
/// `A_s` minus bottom shift of `B`. Reruns with `window + 2` and fails if the
/// answer moves.
pub fn oracle_v(steps: &StepVector, s: i64, window: Option<i64>) -> Result<i64, OracleError> {
    let stair = crate::staircase::lattice_points(steps);
    let w = window.unwrap_or_else(|| default_window(&stair));
    let small = v_at_window(&stair, s, w)?;
    let large = v_at_window(&stair, s, w + 2)?;
    if small != large {
        return Err(OracleError::Unstable { small, large });
    }
    Ok(small)
}

/// `V_s` computed on the full tensor complex `St(K) ⊗ St(K)` instead of the
/// doubled staircase, using the tower of the `a_1 ⊗ a_1` class.
pub fn tensor_v(knot_steps: &StepVector, s: i64, window: Option<i64>) -> Result<i64, OracleError> {
    let st = BigradedComplex::from_staircase(&crate::staircase::lattice_points(knot_steps));
    let base = tensor(&st, &st)?;
    let dbl = double(knot_steps)?;
    let w = window.unwrap_or_else(|| default_window(&dbl.staircase));
    let at = |w: i64| -> Result<i64, OracleError> {
        let c = materialize_complex(&base, w)?;
        let b = tower_bottom(&c, Region::RightHalf, &[0, 0]).ok_or(OracleError::EmptyRegion)?;
        let a = tower_bottom(&c, Region::Corner(s), &[0, 0]).ok_or(OracleError::EmptyRegion)?;
        let lowest = *c.shifts().iter().next().unwrap();
        if -a == lowest || -b == lowest {
            return Err(OracleError::BoundaryTouch(w));
        }
        Ok(a - b)
    };
    let (small, large) = (at(w)?, at(w + 2)?);
    if small != large {
        return Err(OracleError::Unstable { small, large });
    }
    Ok(small)
}

/// Homology ranks used by the acyclicity and transfer checks for one knot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub window: i64,
    pub translates: usize,
    pub tensor_rank: usize,
    pub doubled_rank: usize,
    pub quotient_rank: usize,
    pub quotient_generators: usize,
}

/// Build `St ⊗ St`, its doubled-staircase subcomplex and the quotient inside
/// one window, and report whole-complex homology ranks.
pub fn transfer_report(knot_steps: &StepVector, window: Option<i64>) -> Result<TransferReport, OracleError> {
    let st = BigradedComplex::from_staircase(&crate::staircase::lattice_points(knot_steps));
    let base = tensor(&st, &st)?;
    let dbl = double(knot_steps)?;
    let w = window.unwrap_or_else(|| default_window(&dbl.staircase));
    let full = materialize_complex(&base, w)?;
    full.check_filtered()?;
    full.check_d_squared()?;
    let doubled = materialize(&dbl.staircase, w)?;
    let quotient = quotient_by_double(&full, &dbl)?;
    quotient.check_d_squared()?;
    Ok(TransferReport {
        window: w,
        translates: full.shifts().len(),
        tensor_rank: homology_rank(&full, Region::Whole).rank,
        doubled_rank: homology_rank(&doubled, Region::Whole).rank,
        quotient_rank: homology_rank(&quotient, Region::Whole).rank,
        quotient_generators: quotient.len(),
    })
}
