//! Word-packed bit vectors and elimination over GF(2).

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PathVector {
    len: usize,
    words: Vec<u64>,
}

impl PathVector {
    pub fn zeros(len: usize) -> Self {
        PathVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = PathVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &PathVector) {
        assert_eq!(self.len, other.len, "row length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn lowest_set(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl fmt::Debug for PathVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitMatrix {
    width: usize,
    rows: Vec<PathVector>,
}

impl BitMatrix {
    pub fn new(width: usize) -> Self {
        BitMatrix {
            width,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(width: usize, rows: Vec<PathVector>) -> Self {
        let mut m = BitMatrix::new(width);
        for r in rows {
            m.push(r);
        }
        m
    }

    pub fn push(&mut self, row: PathVector) {
        assert_eq!(row.len(), self.width, "row length mismatch");
        self.rows.push(row);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[PathVector] {
        &self.rows
    }
}

/// Incrementally built row echelon form keyed by each row's lowest bit.
#[derive(Clone, Debug)]
pub struct Echelon {
    pivot_row: Vec<Option<usize>>,
    rows: Vec<PathVector>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Echelon {
            pivot_row: vec![None; width],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residue of `v` after clearing every pivot it meets.
    pub fn reduce(&self, v: &PathVector) -> PathVector {
        let mut r = v.clone();
        while let Some(p) = r.lowest_set() {
            match self.pivot_row[p] {
                Some(i) => r.xor_assign(&self.rows[i]),
                None => break,
            }
        }
        r
    }

    pub fn contains(&self, v: &PathVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &PathVector) -> bool {
        let r = self.reduce(v);
        match r.lowest_set() {
            Some(p) => {
                self.pivot_row[p] = Some(self.rows.len());
                self.rows.push(r);
                true
            }
            None => false,
        }
    }
}

pub fn rank_gf2(m: &BitMatrix) -> usize {
    let mut e = Echelon::new(m.width());
    for r in m.rows() {
        e.insert(r);
    }
    e.rank()
}
