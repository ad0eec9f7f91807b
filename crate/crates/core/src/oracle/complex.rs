//! Finite bigraded complexes over the two-element field, built by
//! materializing the `U`-translates of a staircase inside a square window.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::OracleError;
use crate::staircase::{DoubledStaircase, LatticeStaircase};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CGen {
    pub x: i64,
    pub y: i64,
    /// Diagonal translate: generator sits at `base + (shift, shift)`.
    pub shift: i64,
    /// Index of the originating staircase generator in each tensor factor.
    pub label: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BigradedComplex {
    pub gens: Vec<CGen>,
    /// `(from, to)` pairs; the differential of `from` is the sum of its targets.
    pub arrows: Vec<(usize, usize)>,
    /// Half-width of the truncation square, `None` for an untruncated base.
    pub window: Option<i64>,
}

impl BigradedComplex {
    /// One copy of a staircase (no translates).
    pub fn from_staircase(st: &LatticeStaircase) -> Self {
        BigradedComplex {
            gens: st
                .generators
                .iter()
                .enumerate()
                .map(|(i, g)| CGen {
                    x: g.x,
                    y: g.y,
                    shift: 0,
                    label: vec![i],
                })
                .collect(),
            arrows: st.arrows(),
            window: None,
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn shifts(&self) -> BTreeSet<i64> {
        self.gens.iter().map(|g| g.shift).collect()
    }

    /// Every arrow lowers the bigrading weakly in both coordinates and
    /// strictly in at least one.
    pub fn check_filtered(&self) -> Result<(), OracleError> {
        for &(a, b) in &self.arrows {
            let (s, t) = (&self.gens[a], &self.gens[b]);
            let ok = t.x <= s.x && t.y <= s.y && (t.x, t.y) != (s.x, s.y);
            if !ok {
                return Err(OracleError::NotFiltered { from: a, to: b });
            }
        }
        Ok(())
    }

    /// `∂∘∂ = 0` over the two-element field.
    pub fn check_d_squared(&self) -> Result<(), OracleError> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.gens.len()];
        for &(a, b) in &self.arrows {
            out[a].push(b);
        }
        for (src, targets) in out.iter().enumerate() {
            let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
            for &t in targets {
                for &u in &out[t] {
                    *parity.entry(u).or_insert(false) ^= true;
                }
            }
            if let Some((&u, _)) = parity.iter().find(|(_, &odd)| odd) {
                return Err(OracleError::DSquaredNonzero { from: src, to: u });
            }
        }
        Ok(())
    }

    /// Keep the generators satisfying `keep`, and the arrows between them.
    pub fn restrict<F: Fn(&CGen) -> bool>(&self, keep: F) -> BigradedComplex {
        let mask: Vec<bool> = self.gens.iter().map(keep).collect();
        self.restrict_mask(&mask)
    }

    pub fn restrict_mask(&self, mask: &[bool]) -> BigradedComplex {
        let mut index = HashMap::new();
        let mut gens = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            if mask[i] {
                index.insert(i, gens.len());
                gens.push(g.clone());
            }
        }
        let arrows = self
            .arrows
            .iter()
            .filter_map(|(a, b)| Some((*index.get(a)?, *index.get(b)?)))
            .collect();
        BigradedComplex {
            gens,
            arrows,
            window: self.window,
        }
    }
}

/// Smallest admissible window: one full copy plus a unit margin either side.
pub fn min_window(base: &BigradedComplex) -> i64 {
    let (lo, hi) = coord_range(base);
    hi - lo + 2
}

fn coord_range(c: &BigradedComplex) -> (i64, i64) {
    let lo = c.gens.iter().map(|g| g.x.min(g.y)).min().unwrap_or(0);
    let hi = c.gens.iter().map(|g| g.x.max(g.y)).max().unwrap_or(0);
    (lo, hi)
}

/// All diagonal translates of `stair` lying entirely in `[-window, window]^2`.
pub fn materialize(stair: &LatticeStaircase, window: i64) -> Result<BigradedComplex, OracleError> {
    materialize_complex(&BigradedComplex::from_staircase(stair), window)
}

/// Translates of an arbitrary base complex (e.g. a tensor product of two
/// staircases) inside the window.
pub fn materialize_complex(base: &BigradedComplex, window: i64) -> Result<BigradedComplex, OracleError> {
    if base.window.is_some() {
        return Err(OracleError::AlreadyTruncated);
    }
    let need = min_window(base);
    if window < need {
        return Err(OracleError::WindowTooSmall { window, need });
    }
    let (lo, hi) = coord_range(base);
    let n = base.gens.len();
    let mut gens = Vec::new();
    let mut arrows = Vec::new();
    for shift in (-window - lo)..=(window - hi) {
        let offset = gens.len();
        gens.extend(base.gens.iter().map(|g| CGen {
            x: g.x + shift,
            y: g.y + shift,
            shift: g.shift + shift,
            label: g.label.clone(),
        }));
        arrows.extend(base.arrows.iter().map(|&(a, b)| (a + offset, b + offset)));
        debug_assert_eq!(gens.len(), offset + n);
    }
    Ok(BigradedComplex {
        gens,
        arrows,
        window: Some(window),
    })
}

/// Tensor product over the two-element field with the Leibniz differential.
///
/// `CFK^∞(K # K^r)` is `materialize_complex(&tensor(&st, &st)?, w)`: tensoring
/// two already-materialized complexes would double count the translates.
pub fn tensor(c1: &BigradedComplex, c2: &BigradedComplex) -> Result<BigradedComplex, OracleError> {
    let n2 = c2.gens.len();
    let idx = |i: usize, j: usize| i * n2 + j;
    let mut gens = Vec::with_capacity(c1.gens.len() * n2);
    for g1 in &c1.gens {
        for g2 in &c2.gens {
            let mut label = g1.label.clone();
            label.extend_from_slice(&g2.label);
            gens.push(CGen {
                x: g1.x + g2.x,
                y: g1.y + g2.y,
                shift: g1.shift + g2.shift,
                label,
            });
        }
    }
    let mut arrows = Vec::new();
    for &(a, b) in &c1.arrows {
        for j in 0..n2 {
            arrows.push((idx(a, j), idx(b, j)));
        }
    }
    for i in 0..c1.gens.len() {
        for &(a, b) in &c2.arrows {
            arrows.push((idx(i, a), idx(i, b)));
        }
    }
    let window = match (c1.window, c2.window) {
        (None, None) => None,
        (a, b) => Some(a.unwrap_or(0).max(b.unwrap_or(0))),
    };
    if let Some(w) = window {
        if let Some(g) = gens.iter().find(|g| g.x.abs() > w || g.y.abs() > w) {
            return Err(OracleError::WindowOverflow {
                x: g.x,
                y: g.y,
                window: w,
            });
        }
    }
    Ok(BigradedComplex { gens, arrows, window })
}

/// Quotient of the materialized `St ⊗ St` by the doubled staircase, i.e. the
/// span of `a_1 ⊗ x` and `x ⊗ a_{m+1}` in every translate.
pub fn quotient_by_double(full: &BigradedComplex, dbl: &DoubledStaircase) -> Result<BigradedComplex, OracleError> {
    let last = dbl.middle;
    let in_sub = |g: &CGen| -> Result<bool, OracleError> {
        match g.label.as_slice() {
            [i, j] => Ok(*i == 0 || *j == last),
            _ => Err(OracleError::SubcomplexCheck("generators are not tensor pairs".into())),
        }
    };
    let mut flags = Vec::with_capacity(full.gens.len());
    for g in &full.gens {
        flags.push(in_sub(g)?);
    }
    for &(a, b) in &full.arrows {
        if flags[a] && !flags[b] {
            return Err(OracleError::SubcomplexCheck(format!(
                "arrow {a} -> {b} leaves the doubled staircase"
            )));
        }
    }
    let expected: BTreeSet<(i64, i64)> = dbl.staircase.generators.iter().map(|g| (g.x, g.y)).collect();
    let mut by_shift: BTreeMap<i64, BTreeSet<(i64, i64)>> = BTreeMap::new();
    for (g, &f) in full.gens.iter().zip(&flags) {
        if f {
            by_shift
                .entry(g.shift)
                .or_default()
                .insert((g.x - g.shift, g.y - g.shift));
        }
    }
    for (shift, pts) in &by_shift {
        if *pts != expected {
            return Err(OracleError::SubcomplexCheck(format!(
                "translate {shift} does not match the doubled staircase"
            )));
        }
    }
    let keep: Vec<bool> = flags.iter().map(|f| !f).collect();
    Ok(full.restrict_mask(&keep))
}
