//! `V_s` from staircase geometry, lens-space correction terms and surgery
//! d-invariant tables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{fmt_q, serde_q_vec, Q};
use crate::staircase::{lattice_points, StepVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DError {
    #[error("surgery coefficient {0} must be 1 or an odd prime")]
    BadCoefficient(i64),
    #[error("residue {i} out of range for k = {k}")]
    ResidueOutOfRange { k: i64, i: i64 },
    #[error("V-sequence covers s <= {have}, need s <= {need}")]
    TooShort { have: i64, need: i64 },
    #[error("threshold {threshold} disagrees with m(K) = {m}")]
    ThresholdMismatch { threshold: i64, m: i64 },
}

/// `V_s = min_r max(x_r, y_r - s) - min_r x_r` over the generators of the
/// staircase with steps `steps` (normally a doubled staircase).
pub fn v_value(steps: &StepVector, s: i64) -> i64 {
    let st = lattice_points(steps);
    let corner = st.generators.iter().map(|g| g.x.max(g.y - s)).min().unwrap_or(0);
    let left = st.generators.iter().map(|g| g.x).min().unwrap_or(0);
    corner - left
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VSequence {
    pub steps: StepVector,
    /// `V_0, V_1, …, V_{s_max}` with `s_max >= 2g`.
    pub values: Vec<i64>,
}

impl VSequence {
    /// Values up to `max(s_max, genus)`.
    pub fn new(steps: &StepVector, s_max: i64) -> Self {
        let top = s_max.max(steps.genus()).max(0);
        let values = (0..=top).map(|s| v_value(steps, s)).collect();
        VSequence {
            steps: steps.clone(),
            values,
        }
    }

    /// Sequence for `K # K^r` given the steps of `K`.
    pub fn for_double(knot_steps: &StepVector, s_max: i64) -> Self {
        Self::new(&knot_steps.doubled(), s_max)
    }

    pub fn genus(&self) -> i64 {
        self.steps.genus()
    }

    pub fn s_max(&self) -> i64 {
        self.values.len() as i64 - 1
    }

    /// `V_s`; zero past the stored range, where the sequence has stabilized.
    pub fn value(&self, s: i64) -> i64 {
        assert!(s >= 0, "V_s needs s >= 0");
        self.values.get(s as usize).copied().unwrap_or(0)
    }

    /// `L^s = s - (V_0 - V_s)`.
    pub fn overlap_length(&self, s: i64) -> i64 {
        s - (self.value(0) - self.value(s))
    }

    /// Largest `s <= 2g` with `s - L^s = 0`.
    pub fn m_threshold(&self) -> i64 {
        (0..=self.genus())
            .rev()
            .find(|&s| self.overlap_length(s) == s)
            .unwrap_or(0)
    }

    /// [`Self::m_threshold`] checked against `m(K)` from the Alexander polynomial.
    pub fn checked_threshold(&self, m: i64) -> Result<i64, DError> {
        let threshold = self.m_threshold();
        if threshold != m {
            return Err(DError::ThresholdMismatch { threshold, m });
        }
        Ok(threshold)
    }
}

/// `L^s` read off the picture: count the unit steps `j -> j+1` in `[0, s]`
/// at which the lowest translate fully inside `A_j` stays inside `A_{j+1}`.
pub fn axis_overlap_length(steps: &StepVector, s: i64) -> i64 {
    let st = lattice_points(steps);
    let inside = |shift: i64, j: i64| st.generators.iter().all(|g| (g.x + shift).max(g.y + shift - j) >= 0);
    let lowest = |j: i64| {
        let mut c = -(st.genus() + j + 1);
        while !inside(c, j) {
            c += 1;
        }
        c
    };
    (0..s).filter(|&j| inside(lowest(j), j + 1)).count() as i64
}

/// `V_s(K # K)` from the single staircase by min-convolution,
/// `min_{a + b = s} V_a(K) + V_b(K)`, which holds for connected sums of
/// L-space knots. Negative indices use the same staircase formula.
pub fn convolved_v(knot_steps: &StepVector, s: i64) -> i64 {
    let g = knot_steps.genus();
    (-g..=s + g)
        .map(|a| v_value(knot_steps, a) + v_value(knot_steps, s - a))
        .min()
        .unwrap_or(0)
}

/// First `s <= s_max` where the doubled-staircase model and
/// [`convolved_v`] disagree, as `(s, model, convolved)`.
pub fn doubled_model_gap(knot_steps: &StepVector, s_max: i64) -> Option<(i64, i64, i64)> {
    let d = knot_steps.doubled();
    (0..=s_max)
        .map(|s| (s, v_value(&d, s), convolved_v(knot_steps, s)))
        .find(|(_, a, b)| a != b)
}

/// Correction term of `L(k, 1)` in Spin^c structure `i`.
pub fn lens_d(k: i64, i: i64) -> Result<Q, DError> {
    if k < 1 {
        return Err(DError::BadCoefficient(k));
    }
    if !(0..k).contains(&i) {
        return Err(DError::ResidueOutOfRange { k, i });
    }
    let t = 2 * i - k;
    Ok(Q::new(t * t - k, 4 * k))
}

pub fn is_odd_prime(k: i64) -> bool {
    k > 2 && k % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= k).all(|d| k % d != 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DTable {
    pub k: i64,
    #[serde(with = "serde_q_vec")]
    pub d: Vec<Q>,
    #[serde(with = "serde_q_vec")]
    pub dbar: Vec<Q>,
}

impl DTable {
    fn from_d(k: i64, d: Vec<Q>) -> Self {
        let dbar = d.iter().map(|v| v - d[0]).collect();
        DTable { k, d, dbar }
    }

    /// Orientation reversal.
    pub fn negated(&self) -> Self {
        DTable {
            k: self.k,
            d: self.d.iter().map(|v| -v).collect(),
            dbar: self.dbar.iter().map(|v| -v).collect(),
        }
    }

    pub fn lens(k: i64) -> Result<Self, DError> {
        let d = (0..k).map(|i| lens_d(k, i)).collect::<Result<_, _>>()?;
        Ok(Self::from_d(k, d))
    }

    pub fn is_conjugation_symmetric(&self) -> bool {
        (1..self.d.len()).all(|i| self.d[i] == self.d[self.d.len() - i])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,d,dbar\n");
        for (i, (d, b)) in self.d.iter().zip(&self.dbar).enumerate() {
            out.push_str(&format!("{i},{},{}\n", fmt_q(d), fmt_q(b)));
        }
        out
    }
}

fn check_k(k: i64) -> Result<(), DError> {
    if k == 1 || is_odd_prime(k) {
        Ok(())
    } else {
        Err(DError::BadCoefficient(k))
    }
}

/// `d(S^3_k(K), i) = d(L(k,1), i) - 2 max(V_i, V_{k-i})`.
pub fn surgery_d(vseq: &VSequence, k: i64) -> Result<DTable, DError> {
    check_k(k)?;
    let need = k.min(vseq.genus());
    if vseq.s_max() < need {
        return Err(DError::TooShort {
            have: vseq.s_max(),
            need,
        });
    }
    let d = (0..k)
        .map(|i| Ok(lens_d(k, i)? - Q::from_integer(2 * vseq.value(i).max(vseq.value(k - i)))))
        .collect::<Result<_, DError>>()?;
    Ok(DTable::from_d(k, d))
}

/// Summands whose d-invariants enter the obstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Summand {
    /// `±S^3_k(K # K^r)` given the steps of `K`.
    Surgery { knot_steps: StepVector, positive: bool },
    /// `±L(k, 1)`.
    Lens { positive: bool },
}

pub fn relative_dbar_family(summand: &Summand, k: i64) -> Result<DTable, DError> {
    let (table, positive) = match summand {
        Summand::Surgery { knot_steps, positive } => (surgery_d(&VSequence::for_double(knot_steps, k), k)?, *positive),
        Summand::Lens { positive } => {
            check_k(k)?;
            (DTable::lens(k)?, *positive)
        }
    };
    Ok(if positive { table } else { table.negated() })
}
