//! Staircase complexes of L-space knots as lattice generator sets, and the
//! doubled staircase modelling `K # K^r`.
//!
//! Coordinates live in the `(i, j)` plane with `a_1` at the top-left corner
//! `(0, g)`. The `U`-action is the diagonal shift `(x, y) -> (x - 1, y - 1)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alexander::LSpaceForm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StaircaseError {
    #[error("step vector must have even length, got {0}")]
    OddLength(usize),
    #[error("step {index} is {value}; steps must be positive")]
    NonPositive { index: usize, value: i64 },
    #[error("step vector {0:?} is not palindromic")]
    NotPalindromic(Vec<i64>),
    #[error("middle generator of the double is at ({x},{y}), expected ({g},{g})")]
    MiddleMismatch { x: i64, y: i64, g: i64 },
}

/// Consecutive gaps `(s_1, ..., s_{2m})` of an L-space Alexander polynomial.
/// Odd positions are horizontal steps, even positions vertical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct StepVector(Vec<i64>);

impl StepVector {
    pub fn new(steps: Vec<i64>) -> Result<Self, StaircaseError> {
        if !steps.len().is_multiple_of(2) {
            return Err(StaircaseError::OddLength(steps.len()));
        }
        if let Some((index, &value)) = steps.iter().enumerate().find(|(_, &v)| v <= 0) {
            return Err(StaircaseError::NonPositive { index, value });
        }
        if steps.iter().ne(steps.iter().rev()) {
            return Err(StaircaseError::NotPalindromic(steps));
        }
        Ok(StepVector(steps))
    }

    /// The point staircase of the unknot.
    pub fn empty() -> Self {
        StepVector(Vec::new())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the horizontal (odd-position) steps; equals the vertical sum.
    pub fn genus(&self) -> i64 {
        self.0.iter().step_by(2).sum()
    }

    pub fn max_step(&self) -> i64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `(s_1, ..., s_{2m}, s_1, ..., s_{2m})`.
    pub fn doubled(&self) -> StepVector {
        let mut v = self.0.clone();
        v.extend_from_slice(&self.0);
        StepVector(v)
    }
}

impl TryFrom<Vec<i64>> for StepVector {
    type Error = StaircaseError;
    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        StepVector::new(v)
    }
}

impl From<StepVector> for Vec<i64> {
    fn from(s: StepVector) -> Self {
        s.0
    }
}

pub fn steps_from_alexander(form: &LSpaceForm) -> StepVector {
    let gaps = form.exponents.windows(2).map(|w| w[1] - w[0]).collect();
    // an LSpaceForm is symmetric with increasing exponents, so the gaps are
    // a valid step vector
    StepVector::new(gaps).expect("L-space form yields palindromic positive gaps")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenKind {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub x: i64,
    pub y: i64,
    #[serde(rename = "type")]
    pub kind: GenKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeStaircase {
    pub steps: StepVector,
    pub generators: Vec<Generator>,
}

/// Walk the staircase from `a_1 = (0, g)`: horizontal steps end at
/// B-generators, vertical steps end at A-generators.
pub fn lattice_points(steps: &StepVector) -> LatticeStaircase {
    let g = steps.genus();
    let mut generators = Vec::with_capacity(steps.len() + 1);
    let (mut x, mut y) = (0, g);
    generators.push(Generator { x, y, kind: GenKind::A });
    for (i, &s) in steps.as_slice().iter().enumerate() {
        let kind = if i % 2 == 0 {
            x += s;
            GenKind::B
        } else {
            y -= s;
            GenKind::A
        };
        generators.push(Generator { x, y, kind });
    }
    LatticeStaircase {
        steps: steps.clone(),
        generators,
    }
}

/// Like [`lattice_points`] but validating a raw step list first.
pub fn lattice_points_checked(steps: &[i64]) -> Result<LatticeStaircase, StaircaseError> {
    Ok(lattice_points(&StepVector::new(steps.to_vec())?))
}

impl LatticeStaircase {
    pub fn genus(&self) -> i64 {
        self.steps.genus()
    }

    pub fn a_generators(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(|g| g.kind == GenKind::A)
    }

    pub fn b_generators(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(|g| g.kind == GenKind::B)
    }

    /// Differential as `(from, to)` index pairs: each B-generator maps to its
    /// two A-neighbours.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        (1..self.generators.len())
            .step_by(2)
            .flat_map(|b| [(b, b - 1), (b, b + 1)])
            .collect()
    }

    /// Whether the generator set is invariant under `(x, y) -> (y, x)`.
    pub fn is_diagonally_symmetric(&self) -> bool {
        let mut a: Vec<(i64, i64)> = self.generators.iter().map(|g| (g.x, g.y)).collect();
        let mut b: Vec<(i64, i64)> = self.generators.iter().map(|g| (g.y, g.x)).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubledStaircase {
    #[serde(flatten)]
    pub staircase: LatticeStaircase,
    /// Index of `a_1 ⊗ a_{m+1}` in `staircase.generators`.
    pub middle: usize,
}

/// Concatenate `a_1 ⊗ St(K)` with `St(K) ⊗ a_{m+1}`.
pub fn double(steps: &StepVector) -> Result<DoubledStaircase, StaircaseError> {
    let staircase = lattice_points(&steps.doubled());
    let middle = steps.len();
    let g = steps.genus();
    let mid = staircase.generators[middle];
    if (mid.x, mid.y) != (g, g) || mid.kind != GenKind::A {
        return Err(StaircaseError::MiddleMismatch { x: mid.x, y: mid.y, g });
    }
    Ok(DoubledStaircase { staircase, middle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alexander::{is_lspace_form, torus_alexander, LaurentPoly};
    use proptest::prelude::*;

    fn sv(v: &[i64]) -> StepVector {
        StepVector::new(v.to_vec()).unwrap()
    }

    fn coords(st: &LatticeStaircase, kind: GenKind) -> Vec<(i64, i64)> {
        st.generators
            .iter()
            .filter(|g| g.kind == kind)
            .map(|g| (g.x, g.y))
            .collect()
    }

    #[test]
    fn steps_from_polynomials() {
        let t34 = is_lspace_form(&torus_alexander(3, 4).unwrap()).unwrap();
        assert_eq!(steps_from_alexander(&t34), sv(&[1, 2, 2, 1]));
        let t23 = is_lspace_form(&torus_alexander(2, 3).unwrap()).unwrap();
        assert_eq!(steps_from_alexander(&t23), sv(&[1, 1]));
        let u = is_lspace_form(&LaurentPoly::one()).unwrap();
        assert!(steps_from_alexander(&u).is_empty());
    }

    #[test]
    fn trefoil_lattice() {
        let st = lattice_points(&sv(&[1, 1]));
        assert_eq!(coords(&st, GenKind::A), vec![(0, 1), (1, 0)]);
        assert_eq!(coords(&st, GenKind::B), vec![(1, 1)]);
        assert!(st.is_diagonally_symmetric());
        assert_eq!(st.arrows(), vec![(1, 0), (1, 2)]);
    }

    #[test]
    fn t34_lattice() {
        let st = lattice_points(&sv(&[1, 2, 2, 1]));
        assert_eq!(coords(&st, GenKind::A), vec![(0, 3), (1, 1), (3, 0)]);
        assert_eq!(coords(&st, GenKind::B), vec![(1, 3), (3, 1)]);
    }

    #[test]
    fn point_lattice() {
        let st = lattice_points(&StepVector::empty());
        assert_eq!(
            st.generators,
            vec![Generator {
                x: 0,
                y: 0,
                kind: GenKind::A
            }]
        );
        assert!(st.arrows().is_empty());
    }

    #[test]
    fn rejects_bad_steps() {
        assert_eq!(
            lattice_points_checked(&[1, 2]),
            Err(StaircaseError::NotPalindromic(vec![1, 2]))
        );
        assert_eq!(lattice_points_checked(&[1, 2, 1]), Err(StaircaseError::OddLength(3)));
        assert!(matches!(
            StepVector::new(vec![0, 0]),
            Err(StaircaseError::NonPositive { index: 0, value: 0 })
        ));
    }

    #[test]
    fn doubled_trefoil() {
        let d = double(&sv(&[1, 1])).unwrap();
        let all: Vec<(i64, i64)> = d.staircase.generators.iter().map(|g| (g.x, g.y)).collect();
        assert_eq!(all, vec![(0, 2), (1, 2), (1, 1), (2, 1), (2, 0)]);
        assert_eq!(d.middle, 2);
    }

    #[test]
    fn doubled_t34() {
        let d = double(&sv(&[1, 2, 2, 1])).unwrap();
        let gens = &d.staircase.generators;
        assert_eq!(gens.len(), 9);
        assert_eq!((gens[0].x, gens[0].y), (0, 6));
        assert_eq!((gens[8].x, gens[8].y), (6, 0));
        assert_eq!((gens[d.middle].x, gens[d.middle].y), (3, 3));
    }

    #[test]
    fn doubled_point() {
        let d = double(&StepVector::empty()).unwrap();
        assert_eq!(d.staircase.generators.len(), 1);
        assert_eq!(d.middle, 0);
    }

    #[test]
    fn json_shape() {
        let st = lattice_points(&sv(&[1, 1]));
        let j = serde_json::to_string(&st).unwrap();
        assert_eq!(
            j,
            r#"{"steps":[1,1],"generators":[{"x":0,"y":1,"type":"A"},{"x":1,"y":1,"type":"B"},{"x":1,"y":0,"type":"A"}]}"#
        );
        let back: LatticeStaircase = serde_json::from_str(&j).unwrap();
        assert_eq!(back, st);
        assert!(serde_json::from_str::<StepVector>("[1,2]").is_err());
    }

    fn palindromic() -> impl Strategy<Value = StepVector> {
        proptest::collection::vec(1i64..5, 0..6).prop_map(|half| {
            let mut v = half.clone();
            v.extend(half.iter().rev());
            StepVector::new(v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn staircase_invariants(steps in palindromic()) {
            let st = lattice_points(&steps);
            let g = steps.genus();
            prop_assert!(st.is_diagonally_symmetric());
            prop_assert_eq!(st.generators.len(), steps.len() + 1);
            let first = st.generators[0];
            let last = *st.generators.last().unwrap();
            prop_assert_eq!((first.x, first.y), (0, g));
            prop_assert_eq!((last.x, last.y), (g, 0));
            prop_assert!(st.generators.iter().all(|p| p.x >= 0 && p.y >= 0));
            for (i, w) in st.generators.windows(2).enumerate() {
                let (dx, dy) = (w[1].x - w[0].x, w[0].y - w[1].y);
                let s = steps.as_slice()[i];
                if i % 2 == 0 {
                    prop_assert_eq!((dx, dy), (s, 0));
                } else {
                    prop_assert_eq!((dx, dy), (0, s));
                }
            }
            let odd: i64 = steps.as_slice().iter().step_by(2).sum();
            let even: i64 = steps.as_slice().iter().skip(1).step_by(2).sum();
            prop_assert_eq!(odd, even);
        }

        #[test]
        fn double_invariants(steps in palindromic()) {
            let d = double(&steps).unwrap();
            let m = steps.len() / 2;
            prop_assert_eq!(d.staircase.generators.len(), 4 * m + 1);
            let mid = d.staircase.generators[d.middle];
            prop_assert_eq!((mid.x, mid.y), (steps.genus(), steps.genus()));
            prop_assert_eq!(&d.staircase.steps, &steps.doubled());
            prop_assert!(d.staircase.is_diagonally_symmetric());
        }

        #[test]
        fn lattice_points_injective(a in palindromic(), b in palindromic()) {
            let la = lattice_points(&a);
            let lb = lattice_points(&b);
            prop_assert_eq!(a == b, la.generators == lb.generators);
        }
    }
}
