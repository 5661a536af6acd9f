//! Dense bit-packed linear algebra over GF(2).
//!
//! Rows are stored as runs of `u64` words; row operations are word-parallel
//! XORs. All elimination routines work on a private copy and leave their
//! input untouched. Pivot rows are always the lowest-index candidate, so the
//! results are deterministic.

use std::fmt;

use crate::error::{domain, Result};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
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
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        Self::ones_of(&self.words)
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

/// A `rows x cols` matrix over GF(2), row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix whose column `j` has ones at the row indices in `columns[j]`.
    pub fn from_columns<I>(rows: usize, columns: I) -> Self
    where
        I: IntoIterator,
        I::Item: IntoIterator<Item = usize>,
    {
        let columns: Vec<Vec<usize>> = columns
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for &i in col {
                m.flip(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[BitVec]) -> Self {
        let cols = rows.first().map_or(0, BitVec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.row_words_mut(i).copy_from_slice(&r.words);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(
            r < self.rows && c < self.cols,
            "({r},{c}) outside {}x{}",
            self.rows,
            self.cols
        );
        (self.bits[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(
            r < self.rows && c < self.cols,
            "({r},{c}) outside {}x{}",
            self.rows,
            self.cols
        );
        let w = &mut self.bits[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(
            r < self.rows && c < self.cols,
            "({r},{c}) outside {}x{}",
            self.rows,
            self.cols
        );
        self.bits[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.bits[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec {
            words: self.row_words(r).to_vec(),
            len: self.cols,
        }
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    fn xor_rows(&mut self, target: usize, source: usize) {
        debug_assert_ne!(target, source);
        let s = self.stride;
        let (t0, s0) = (target * s, source * s);
        if target < source {
            let (head, tail) = self.bits.split_at_mut(s0);
            for (a, b) in head[t0..t0 + s].iter_mut().zip(&tail[..s]) {
                *a ^= b;
            }
        } else {
            let (head, tail) = self.bits.split_at_mut(t0);
            for (a, b) in tail[..s].iter_mut().zip(&head[s0..s0 + s]) {
                *a ^= b;
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.bits.split_at_mut(hi * s);
        head[lo * s..lo * s + s].swap_with_slice(&mut tail[..s]);
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in BitVec::ones_of(self.row_words(r)) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `M x` for a column vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return domain(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            ));
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(&x.words)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Reduces a working copy to reduced row echelon form in place and
    /// returns the pivot column of each nonzero row, in row order.
    fn rref_in_place(&mut self, col_limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..col_limit {
            if next == self.rows {
                break;
            }
            let (w, mask) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (next..self.rows).find(|&r| self.bits[r * self.stride + w] & mask != 0)
            else {
                continue;
            };
            self.swap_rows(next, p);
            for r in 0..self.rows {
                if r != next && self.bits[r * self.stride + w] & mask != 0 {
                    self.xor_rows(r, next);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        // Forward elimination only; no need for the reduced form here.
        let mut work = self.clone();
        let mut rank = 0;
        for c in 0..work.cols {
            if rank == work.rows {
                break;
            }
            let (w, mask) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (rank..work.rows).find(|&r| work.bits[r * work.stride + w] & mask != 0)
            else {
                continue;
            };
            work.swap_rows(rank, p);
            for r in rank + 1..work.rows {
                if work.bits[r * work.stride + w] & mask != 0 {
                    work.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Returns `[self | b]`.
    fn augmented(&self, b: &BitVec) -> Self {
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in BitVec::ones_of(self.row_words(r)) {
                aug.set(r, c, true);
            }
            if b.get(r) {
                aug.set(r, self.cols, true);
            }
        }
        aug
    }

    /// Finds `x` with `M x = b` if one exists, together with the residual
    /// `b + M x` (zero exactly when the system is consistent).
    ///
    /// Free variables are set to zero, so `x` is the solution supported on
    /// pivot columns of the reduced row echelon form.
    pub fn reduce(&self, b: &BitVec) -> Result<(BitVec, BitVec)> {
        if b.len() != self.rows {
            return domain(format!(
                "right-hand side of length {} against {} rows",
                b.len(),
                self.rows
            ));
        }
        let mut aug = self.augmented(b);
        let pivots = aug.rref_in_place(self.cols);
        let mut x = BitVec::zeros(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            if aug.get(r, self.cols) {
                x.set(c, true);
            }
        }
        let mut residual = self.mul_vec(&x)?;
        residual.xor_assign(b);
        Ok((x, residual))
    }

    /// Solves `M x = b`; `Ok(None)` when `b` is outside the column space.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>> {
        let (x, residual) = self.reduce(b)?;
        Ok(residual.is_zero().then_some(x))
    }

    /// A basis of the null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let mut work = self.clone();
        let pivots = work.rref_in_place(self.cols);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::zeros(self.cols);
                v.set(f, true);
                for (r, &c) in pivots.iter().enumerate() {
                    if work.get(r, f) {
                        v.set(c, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Rows as `0`/`1` text, one per line.
    pub fn dump(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push(if self.get(r, c) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

impl BitVec {
    fn ones_of(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
        words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        f.write_str(&self.dump())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Plain Vec<Vec<bool>> elimination, kept deliberately naive.
    fn naive_rank(m: &[Vec<bool>]) -> usize {
        let mut m: Vec<Vec<bool>> = m.to_vec();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..m.len()).find(|&r| m[r][c]) {
                m.swap(rank, p);
                for r in 0..m.len() {
                    if r != rank && m[r][c] {
                        let src = m[rank].clone();
                        for (a, b) in m[r].iter_mut().zip(src) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn to_matrix(m: &[Vec<bool>], cols: usize) -> Gf2Matrix {
        let mut g = Gf2Matrix::zeros(m.len(), cols);
        for (r, row) in m.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                g.set(r, c, b);
            }
        }
        g
    }

    fn matrix_strategy() -> impl Strategy<Value = (usize, Vec<Vec<bool>>)> {
        (0usize..12, 0usize..140).prop_flat_map(|(rows, cols)| {
            (
                Just(cols),
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), cols), rows),
            )
        })
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Gf2Matrix::identity(3).rank(), 3);
        assert_eq!(Gf2Matrix::zeros(4, 5).rank(), 0);
        assert_eq!(Gf2Matrix::zeros(0, 0).rank(), 0);
    }

    #[test]
    fn solve_examples() {
        let id = Gf2Matrix::identity(5);
        let b = BitVec::from_bools(&[true, false, true, true, false]);
        assert_eq!(id.solve(&b).unwrap(), Some(b.clone()));
        assert_eq!(id.solve(&BitVec::zeros(5)).unwrap(), Some(BitVec::zeros(5)));
        assert!(id.solve(&BitVec::zeros(4)).is_err());

        let mut m = Gf2Matrix::zeros(2, 1);
        m.set(0, 0, true);
        m.set(1, 0, true);
        assert_eq!(m.solve(&BitVec::from_bools(&[true, false])).unwrap(), None);
    }

    #[test]
    fn kernel_examples() {
        assert!(Gf2Matrix::identity(4).kernel_basis().is_empty());
        let mut m = Gf2Matrix::zeros(1, 2);
        m.set(0, 0, true);
        m.set(0, 1, true);
        assert_eq!(m.kernel_basis(), vec![BitVec::from_bools(&[true, true])]);
    }

    #[test]
    fn dump_rows() {
        let mut m = Gf2Matrix::zeros(2, 3);
        m.set(0, 2, true);
        m.set(1, 0, true);
        assert_eq!(m.dump(), "001\n100\n");
    }

    #[test]
    fn wide_rows_span_words() {
        let mut m = Gf2Matrix::zeros(3, 200);
        m.set(0, 0, true);
        m.set(0, 130, true);
        m.set(1, 130, true);
        m.set(2, 199, true);
        m.set(2, 0, true);
        assert_eq!(m.rank(), 3);
        assert_eq!(m.transpose().rank(), 3);
        assert_eq!(m.kernel_basis().len(), 197);
    }

    proptest! {
        #[test]
        fn rank_matches_naive_and_transpose((cols, rows) in matrix_strategy()) {
            let m = to_matrix(&rows, cols);
            let r = m.rank();
            prop_assert_eq!(r, naive_rank(&rows));
            prop_assert_eq!(r, m.transpose().rank());
        }

        #[test]
        fn kernel_is_independent_null_space((cols, rows) in matrix_strategy()) {
            let m = to_matrix(&rows, cols);
            let kernel = m.kernel_basis();
            prop_assert_eq!(kernel.len() + m.rank(), cols);
            for v in &kernel {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
            }
            if !kernel.is_empty() {
                prop_assert_eq!(Gf2Matrix::from_rows(&kernel).rank(), kernel.len());
            }
        }

        #[test]
        fn solve_iff_in_column_space(
            (cols, rows) in matrix_strategy(),
            seed in proptest::collection::vec(any::<bool>(), 12),
        ) {
            let m = to_matrix(&rows, cols);
            let b = BitVec::from_bools(&seed[..rows.len()]);
            let mut aug_rows = rows.clone();
            for (r, row) in aug_rows.iter_mut().enumerate() {
                row.push(b.get(r));
            }
            let consistent = naive_rank(&aug_rows) == naive_rank(&rows);
            match m.solve(&b).unwrap() {
                Some(x) => {
                    prop_assert!(consistent);
                    prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
                }
                None => prop_assert!(!consistent),
            }
        }
    }
}
