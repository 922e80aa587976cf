//! Dense linear algebra over GF(2) on word-packed bit vectors.
//!
//! Rows are stored as `u64` words; elimination is plain Gauss-Jordan, which
//! is all the desk-scale problems here need (a few hundred columns at most).

use std::fmt;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    /// Low `len` bits of `word`. Only valid for `len <= 64`.
    pub fn from_u64(len: usize, word: u64) -> Self {
        assert!(len <= WORD);
        let mut v = BitVec::zeros(len);
        if len > 0 {
            let mask = if len == WORD {
                u64::MAX
            } else {
                (1u64 << len) - 1
            };
            v.words[0] = word & mask;
        }
        v
    }

    /// The bits as a single word; `None` if the vector is longer than 64.
    pub fn to_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Popcount of the bitwise AND, without allocating.
    pub fn and_count(&self, other: &BitVec) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> bool {
        self.and_count(other) % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Concatenation `[self | other]`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `[start, start + len)` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Result of a Gauss-Jordan reduction.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the reduced row echelon form.
    pub rows: Vec<BitVec>,
    /// Pivot column of each row in `rows`.
    pub pivots: Vec<usize>,
    /// For every original row, the combination of original rows it became.
    /// Rows that reduced to zero carry a relation among the inputs.
    pub transform: Vec<BitVec>,
    /// Indices (into the original row order) of rows that reduced to zero,
    /// together with the combination of original rows summing to zero.
    pub relations: Vec<BitVec>,
}

/// Row-major matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length mismatch");
        BitMatrix { cols, rows }
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    /// Gauss-Jordan elimination, tracking row combinations.
    pub fn echelon(&self) -> Echelon {
        let m = self.rows.len();
        let mut work: Vec<(BitVec, BitVec)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), BitVec::from_indices(m, [i])))
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..m).find(|&i| work[i].0.get(col)) else {
                continue;
            };
            work.swap(rank, p);
            let (prow, ptr) = work[rank].clone();
            for (i, (row, tr)) in work.iter_mut().enumerate() {
                if i != rank && row.get(col) {
                    row.xor_assign(&prow);
                    tr.xor_assign(&ptr);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == m {
                break;
            }
        }
        let relations = work[rank..].iter().map(|(_, t)| t.clone()).collect();
        let transform = work.iter().map(|(_, t)| t.clone()).collect();
        let rows = work.into_iter().take(rank).map(|(r, _)| r).collect();
        Echelon {
            rows,
            pivots,
            transform,
            relations,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{v : M v = 0}` in reduced row echelon form.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let ech = self.echelon();
        let pivot_set: Vec<Option<usize>> = {
            let mut p = vec![None; self.cols];
            for (r, &c) in ech.pivots.iter().enumerate() {
                p[c] = Some(r);
            }
            p
        };
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| pivot_set[c].is_none()) {
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (r, &pc) in ech.pivots.iter().enumerate() {
                if ech.rows[r].get(free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        reduce_basis(basis, self.cols)
    }

    /// Coefficients `c` with `sum_i c_i row_i = target`, if any.
    pub fn solve_combination(&self, target: &BitVec) -> Option<BitVec> {
        assert_eq!(target.len(), self.cols);
        let ech = self.echelon();
        let mut residual = target.clone();
        let mut combo = BitVec::zeros(self.rows.len());
        for (r, &pc) in ech.pivots.iter().enumerate() {
            if residual.get(pc) {
                residual.xor_assign(&ech.rows[r]);
                combo.xor_assign(&ech.transform[r]);
            }
        }
        residual.is_zero().then_some(combo)
    }

    pub fn in_row_span(&self, target: &BitVec) -> bool {
        self.solve_combination(target).is_some()
    }
}

/// Bring a set of vectors to reduced row echelon form, dropping dependents.
pub fn reduce_basis(vectors: Vec<BitVec>, len: usize) -> Vec<BitVec> {
    BitMatrix::from_rows(len, vectors).echelon().rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        BitVec::from_bools(&s.chars().map(|c| c == '1').collect::<Vec<_>>())
    }

    #[test]
    fn bitvec_ops() {
        let a = bv("1100101");
        let b = bv("1010100");
        assert_eq!(a.xor(&b), bv("0110001"));
        assert_eq!(a.and_count(&b), 2);
        assert!(!a.dot(&b));
        assert_eq!(a.iter_ones().collect::<Vec<_>>(), vec![0, 1, 4, 6]);
        assert_eq!(a.concat(&b).slice(7, 7), b);
    }

    #[test]
    fn long_vectors_cross_word_boundary() {
        let a = BitVec::from_indices(130, [0, 63, 64, 129]);
        assert_eq!(a.count_ones(), 4);
        assert_eq!(a.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(a.to_u64(), None);
    }

    #[test]
    fn rank_and_nullspace() {
        let m = BitMatrix::from_rows(4, vec![bv("1100"), bv("0110"), bv("1010")]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in m.rows() {
                assert!(!r.dot(v));
            }
        }
        let ech = m.echelon();
        assert_eq!(ech.relations, vec![bv("111")]);
    }

    #[test]
    fn solve_combination_finds_coefficients() {
        let m = BitMatrix::from_rows(4, vec![bv("1100"), bv("0110"), bv("0001")]);
        let c = m.solve_combination(&bv("1011")).unwrap();
        let mut acc = BitVec::zeros(4);
        for i in c.iter_ones() {
            acc.xor_assign(m.row(i));
        }
        assert_eq!(acc, bv("1011"));
        assert!(m.solve_combination(&bv("1000")).is_none());
    }

    #[test]
    fn empty_matrix_nullspace_is_full() {
        let m = BitMatrix::new(3);
        assert_eq!(m.nullspace().len(), 3);
        assert_eq!(m.rank(), 0);
    }
}
