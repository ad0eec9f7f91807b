//! Dense linear algebra over the two-element field with packed rows.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Incrementally reduced row space; `insert` reports whether the row was
/// independent of everything inserted before.
#[derive(Debug, Default)]
pub struct Echelon {
    pivots: Vec<(usize, BitRow)>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, mut row: BitRow) -> BitRow {
        for (p, r) in &self.pivots {
            if row.get(*p) {
                row.xor_assign(r);
            }
        }
        row
    }

    pub fn insert(&mut self, row: BitRow) -> bool {
        let row = self.reduce(row);
        match row.leading() {
            None => false,
            Some(p) => {
                // keep the basis fully reduced at column p
                for (_, r) in self.pivots.iter_mut() {
                    if r.get(p) {
                        r.xor_assign(&row);
                    }
                }
                self.pivots.push((p, row));
                true
            }
        }
    }

    pub fn contains(&self, row: &BitRow) -> bool {
        self.reduce(row.clone()).is_zero()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn rank(rows: impl IntoIterator<Item = BitRow>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}
