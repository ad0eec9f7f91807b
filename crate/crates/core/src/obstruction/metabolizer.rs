//! Diagonal linking forms on `(F_k)^N` and enumeration of their metabolizers,
//! i.e. `N/2`-dimensional subspaces on which the form vanishes.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ObstructionError;
use crate::exec::Exec;
use crate::rational::Q;

/// `λ(e_i, e_j) = δ_ij · w_i / k` mod 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkingForm {
    pub k: i64,
    pub weights: Vec<i64>,
}

impl LinkingForm {
    pub fn new(k: i64, weights: Vec<i64>) -> Self {
        LinkingForm { k, weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Numerator of `λ(u, v)` over `k`, reduced into `[0, k)`.
    pub fn pairing(&self, u: &[i64], v: &[i64]) -> i64 {
        let s: i64 = self
            .weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(w, (a, b))| w * a * b)
            .sum();
        s.rem_euclid(self.k)
    }

    /// `λ(u, v)` as a rational in `[0, 1)`.
    pub fn value(&self, u: &[i64], v: &[i64]) -> Q {
        Q::new(self.pairing(u, v), self.k)
    }

    pub fn vanishes_on(&self, basis: &[Vec<i64>]) -> bool {
        basis
            .iter()
            .enumerate()
            .all(|(i, u)| basis[i..].iter().all(|v| self.pairing(u, v) == 0))
    }
}

/// Subspace given by its reduced row-echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Metabolizer {
    pub k: i64,
    pub basis: Vec<Vec<i64>>,
    /// Dimension of the ambient space.
    #[serde(skip)]
    pub ambient: usize,
}

impl Metabolizer {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Every element, in lexicographic order of the coefficient vector.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        let width = self.ambient;
        if self.k == 1 {
            return vec![vec![0; width]];
        }
        tuples(self.k, self.dim()).map(|c| self.combine(&c, width)).collect()
    }

    fn combine(&self, coeffs: &[i64], width: usize) -> Vec<i64> {
        let mut v = vec![0; width];
        for (c, row) in coeffs.iter().zip(&self.basis) {
            for (x, r) in v.iter_mut().zip(row) {
                *x = (*x + c * r).rem_euclid(self.k);
            }
        }
        v
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        rref(
            self.k,
            self.basis.iter().cloned().chain(std::iter::once(v.to_vec())).collect(),
        )
        .len()
            == self.dim()
    }
}

/// All of `[0, k)^len` in lexicographic order; one empty tuple when `len = 0`.
pub fn tuples(k: i64, len: usize) -> impl Iterator<Item = Vec<i64>> {
    let mut next = Some(vec![0; len]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        for i in (0..len).rev() {
            succ[i] += 1;
            if succ[i] < k {
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(cur)
    })
}

fn inv_mod(a: i64, k: i64) -> i64 {
    let mut r = 1;
    let (mut b, mut e) = (a.rem_euclid(k), k - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % k;
        }
        b = b * b % k;
        e >>= 1;
    }
    r
}

/// Reduced row-echelon form over `F_k` (`k` prime), zero rows dropped.
pub fn rref(k: i64, mut rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col].rem_euclid(k) != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = inv_mod(rows[r][col], k);
        for x in rows[r].iter_mut() {
            *x = (*x * inv).rem_euclid(k);
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col].rem_euclid(k) != 0 {
                let f = row[col];
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x = (*x - f * p).rem_euclid(k);
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Fill the free entries of row `r` (pivot columns `pivots`), pruning as soon
/// as the row fails to be isotropic against itself or earlier rows.
fn extend(form: &LinkingForm, pivots: &[usize], rows: &mut Vec<Vec<i64>>, out: &mut Vec<Metabolizer>) {
    let r = rows.len();
    if r == pivots.len() {
        out.push(Metabolizer {
            k: form.k,
            basis: rows.clone(),
            ambient: form.dim(),
        });
        return;
    }
    let n = form.dim();
    let free: Vec<usize> = (pivots[r] + 1..n).filter(|c| !pivots.contains(c)).collect();
    for values in tuples(form.k, free.len()) {
        let mut row = vec![0; n];
        row[pivots[r]] = 1;
        for (&c, v) in free.iter().zip(values) {
            row[c] = v;
        }
        if form.pairing(&row, &row) != 0 || rows.iter().any(|u| form.pairing(u, &row) != 0) {
            continue;
        }
        rows.push(row);
        extend(form, pivots, rows, out);
        rows.pop();
    }
}

/// Every `dim/2`-dimensional subspace on which `form` vanishes, each once, in
/// lexicographic order of echelon basis. Refuses when `dim/2 > limit`.
pub fn enumerate_metabolizers(
    form: &LinkingForm,
    limit: usize,
    exec: Exec,
) -> Result<Vec<Metabolizer>, ObstructionError> {
    let half = form.dim() / 2;
    if half > limit {
        return Err(ObstructionError::LimitExceeded { n: half, limit });
    }
    if form.k == 1 || half == 0 {
        return Ok(vec![Metabolizer {
            k: form.k,
            basis: Vec::new(),
            ambient: form.dim(),
        }]);
    }
    let pivot_sets: Vec<Vec<usize>> = (0..form.dim()).combinations(half).collect();
    let mut all: Vec<Metabolizer> = exec
        .map(&pivot_sets, |pivots| {
            let mut out = Vec::new();
            extend(form, pivots, &mut Vec::with_capacity(half), &mut out);
            out
        })
        .into_iter()
        .flatten()
        .collect();
    all.sort();
    Ok(all)
}

/// Random isotropic subspaces; not exhaustive. Deterministic in `seed`.
pub fn sample_metabolizers(form: &LinkingForm, count: usize, seed: u64) -> Vec<Metabolizer> {
    let half = form.dim() / 2;
    if form.k == 1 || half == 0 {
        return vec![Metabolizer {
            k: form.k,
            basis: Vec::new(),
            ambient: form.dim(),
        }];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = BTreeSet::new();
    let mut attempts = 0;
    while found.len() < count && attempts < count * 64 {
        attempts += 1;
        let mut basis: Vec<Vec<i64>> = Vec::new();
        let mut tries = 0;
        while basis.len() < half && tries < 10_000 {
            tries += 1;
            let v: Vec<i64> = (0..form.dim()).map(|_| rng.gen_range(0..form.k)).collect();
            if form.pairing(&v, &v) != 0 || basis.iter().any(|u| form.pairing(u, &v) != 0) {
                continue;
            }
            let mut trial = basis.clone();
            trial.push(v);
            if rref(form.k, trial.clone()).len() == trial.len() {
                basis = trial;
            }
        }
        if basis.len() == half {
            found.insert(Metabolizer {
                k: form.k,
                basis: rref(form.k, basis),
                ambient: form.dim(),
            });
        }
    }
    found.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(k: i64, n: usize) -> LinkingForm {
        LinkingForm::new(k, (0..n).flat_map(|_| [1, -1]).collect())
    }

    /// Every order-k subgroup of (Z/k)^2 is generated by (1, b) or (0, 1).
    fn brute_force_n1(k: i64) -> Vec<Vec<i64>> {
        let f = form(k, 1);
        (0..k)
            .map(|b| vec![1, b])
            .chain(std::iter::once(vec![0, 1]))
            .filter(|v| f.pairing(v, v) == 0)
            .collect()
    }

    #[test]
    fn n1_census() {
        for k in [3, 5, 7, 11, 13] {
            let ms = enumerate_metabolizers(&form(k, 1), 2, Exec::Sequential).unwrap();
            let bases: Vec<Vec<i64>> = ms.iter().map(|m| m.basis[0].clone()).collect();
            assert_eq!(bases, vec![vec![1, 1], vec![1, k - 1]]);
            assert_eq!(bases, brute_force_n1(k));
        }
    }

    #[test]
    fn n2_counts() {
        for (k, expected) in [(3, 8), (5, 12), (7, 16)] {
            let ms = enumerate_metabolizers(&form(k, 2), 2, Exec::Parallel).unwrap();
            assert_eq!(ms.len(), expected);
            for m in &ms {
                assert!(form(k, 2).vanishes_on(&m.basis));
                assert_eq!(m.elements().len() as i64, k * k);
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let f = form(5, 2);
        assert_eq!(
            enumerate_metabolizers(&f, 2, Exec::Parallel).unwrap(),
            enumerate_metabolizers(&f, 2, Exec::Sequential).unwrap()
        );
    }

    #[test]
    fn limit() {
        assert_eq!(
            enumerate_metabolizers(&form(3, 3), 2, Exec::Sequential).unwrap_err(),
            ObstructionError::LimitExceeded { n: 3, limit: 2 }
        );
    }

    #[test]
    fn trivial_group() {
        let ms = enumerate_metabolizers(&form(1, 1), 2, Exec::Sequential).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].elements(), vec![vec![0, 0]]);
    }

    #[test]
    fn elements_in_order() {
        let m = Metabolizer {
            k: 5,
            basis: vec![vec![1, 4]],
            ambient: 2,
        };
        assert_eq!(
            m.elements(),
            vec![vec![0, 0], vec![1, 4], vec![2, 3], vec![3, 2], vec![4, 1]]
        );
        assert!(m.contains(&[3, 2]));
        assert!(!m.contains(&[1, 1]));
    }

    #[test]
    fn rref_canonical() {
        assert_eq!(rref(5, vec![vec![2, 3], vec![4, 1]]), vec![vec![1, 4]]);
        assert_eq!(
            rref(7, vec![vec![0, 3, 1], vec![2, 0, 0]]),
            vec![vec![1, 0, 0], vec![0, 1, 5]]
        );
    }

    #[test]
    fn sampling_finds_enumerated() {
        let f = form(5, 2);
        let all: BTreeSet<Metabolizer> = enumerate_metabolizers(&f, 2, Exec::Sequential)
            .unwrap()
            .into_iter()
            .collect();
        let sampled = sample_metabolizers(&f, 6, 7);
        assert!(!sampled.is_empty());
        assert!(sampled.iter().all(|m| all.contains(m)));
        assert_eq!(sampled, sample_metabolizers(&f, 6, 7));
    }
}
