//! Bit-packed vectors and matrices over F₂.
//!
//! Rows are packed little-endian into `u64` words (bit `j % 64` of word
//! `j / 64` holds column `j`) and padding bits are always zero. Every matrix in
//! this crate is small (a few hundred rows at most), so elimination is plain
//! word-wise Gaussian elimination.
//!
//! Index sets use the 1-based `[m] = {1, …, m}` convention of the matrix
//! formulas they come from; they are converted to 0-based offsets internally.

use std::fmt;

use crate::error::{domain, Result};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = F2Vector::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Shorthand for tests and literals: each nonzero byte is a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self::from_bools(bits.iter().map(|&b| b != 0))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Sum of the entries in F₂.
    pub fn parity(&self) -> bool {
        self.weight() % 2 == 1
    }

    pub fn xor(&self, other: &F2Vector) -> F2Vector {
        assert_eq!(self.len, other.len, "vector length mismatch");
        F2Vector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn and(&self, other: &F2Vector) -> F2Vector {
        assert_eq!(self.len, other.len, "vector length mismatch");
        F2Vector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        self.and(other).parity()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// `v[S]`: the entries at the (1-based) positions of `s`.
    pub fn restrict(&self, s: &IndexSet) -> Result<F2Vector> {
        s.check_within(self.len, "vector")?;
        Ok(F2Vector::from_bools(s.iter().map(|i| self.get(i - 1))))
    }

    pub fn concat(&self, other: &F2Vector) -> F2Vector {
        F2Vector::from_bools(self.iter().chain(other.iter()))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector({self})")
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A strictly increasing list of 1-based indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct IndexSet {
    members: Vec<usize>,
}

impl IndexSet {
    pub fn new(members: Vec<usize>) -> Result<Self> {
        if members.first() == Some(&0) {
            return domain("index sets are 1-based");
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return domain("index set members must be strictly increasing");
        }
        Ok(IndexSet { members })
    }

    /// `[m] = {1, …, m}`.
    pub fn full(m: usize) -> Self {
        IndexSet { members: (1..=m).collect() }
    }

    pub fn empty() -> Self {
        IndexSet::default()
    }

    /// `[m] − {i}`.
    pub fn full_without(m: usize, i: usize) -> Self {
        IndexSet { members: (1..=m).filter(|&k| k != i).collect() }
    }

    /// The positions of the set bits of `mask` among the first `m`, 1-based.
    pub fn from_mask(mask: u64, m: usize) -> Self {
        IndexSet { members: (1..=m).filter(|&k| mask >> (k - 1) & 1 == 1).collect() }
    }

    /// Complement inside `[m]`.
    pub fn complement(&self, m: usize) -> Self {
        IndexSet { members: (1..=m).filter(|k| !self.contains(*k)).collect() }
    }

    /// `S ∘ S′ = (s_{s′₁}, s_{s′₂}, …)`, so that `B[S,C][S′,C′] = B[S∘S′, C∘C′]`.
    pub fn compose(&self, inner: &IndexSet) -> Result<IndexSet> {
        inner.check_within(self.len(), "index set")?;
        Ok(IndexSet { members: inner.iter().map(|i| self.members[i - 1]).collect() })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    fn check_within(&self, bound: usize, what: &str) -> Result<()> {
        match self.members.last() {
            Some(&last) if last > bound => {
                domain(format!("index {last} out of range for {what} of size {bound}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct F2Matrix {
    nrows: usize,
    ncols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        let stride = words_for(ncols);
        F2Matrix { nrows, ncols, stride, data: vec![0; nrows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = F2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Diagonal matrix `D_v` with `(D_v)_ii = v_i`.
    pub fn diagonal(v: &F2Vector) -> Self {
        let mut m = F2Matrix::zeros(v.len(), v.len());
        for i in 0..v.len() {
            m.set(i, i, v.get(i));
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = F2Matrix::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Literal rows of 0/1 bytes. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = F2Matrix::zeros(rows.len(), ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        m
    }

    /// Outer product `u vᵀ`.
    pub fn outer(u: &F2Vector, v: &F2Vector) -> Self {
        let mut m = F2Matrix::zeros(u.len(), v.len());
        for i in 0..u.len() {
            if u.get(i) {
                m.row_words_mut(i).copy_from_slice(v.words());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.nrows && j < self.ncols, "({i}, {j}) out of range");
        self.data[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        assert!(i < self.nrows && j < self.ncols, "({i}, {j}) out of range");
        let mask = 1u64 << (j % WORD);
        let w = &mut self.data[i * self.stride + j / WORD];
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> F2Vector {
        F2Vector { len: self.ncols, words: self.row_words(i).to_vec() }
    }

    pub fn column(&self, j: usize) -> F2Vector {
        F2Vector::from_bools((0..self.nrows).map(|i| self.get(i, j)))
    }

    /// Row sums, i.e. the vector `M · 1`.
    pub fn row_sums(&self) -> F2Vector {
        F2Vector::from_bools((0..self.nrows).map(|i| {
            self.row_words(i).iter().map(|w| w.count_ones()).sum::<u32>() % 2 == 1
        }))
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    t.set(wi * WORD + bits.trailing_zeros() as usize, i, true);
                    bits &= bits - 1;
                }
            }
        }
        t
    }

    pub fn add(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return domain(format!(
                "cannot add {}x{} and {}x{} matrices",
                self.nrows, self.ncols, other.nrows, other.ncols
            ));
        }
        Ok(F2Matrix {
            nrows: self.nrows,
            ncols: self.ncols,
            stride: self.stride,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn mul_vec(&self, v: &F2Vector) -> Result<F2Vector> {
        if v.len() != self.ncols {
            return domain("vector length does not match column count");
        }
        Ok(F2Vector::from_bools((0..self.nrows).map(|i| {
            self.row_words(i).iter().zip(v.words()).map(|(a, b)| (a & b).count_ones()).sum::<u32>()
                % 2
                == 1
        })))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.nrows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Symmetric with zero diagonal.
    pub fn is_alternating(&self) -> bool {
        self.is_symmetric() && (0..self.nrows).all(|i| !self.get(i, i))
    }

    /// Row rank, computed by elimination on a private copy.
    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        let stride = self.stride;
        let mut rank = 0;
        for col in 0..self.ncols {
            if rank == self.nrows {
                break;
            }
            let w = col / WORD;
            let bit = 1u64 << (col % WORD);
            let Some(pivot) = (rank..self.nrows).find(|&r| data[r * stride + w] & bit != 0) else {
                continue;
            };
            if pivot != rank {
                for k in 0..stride {
                    data.swap(pivot * stride + k, rank * stride + k);
                }
            }
            for r in rank + 1..self.nrows {
                if data[r * stride + w] & bit != 0 {
                    for k in w..stride {
                        data[r * stride + k] ^= data[rank * stride + k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn corank(&self) -> Result<usize> {
        if !self.is_square() {
            return domain(format!("corank of a non-square {}x{} matrix", self.nrows, self.ncols));
        }
        Ok(self.ncols - self.rank())
    }

    /// Determinant in F₂; the 0×0 matrix has determinant 1.
    pub fn det(&self) -> Result<bool> {
        Ok(self.corank()? == 0)
    }

    /// `B[S, C]` with `(B[S,C])_ij = B_{s_i c_j}`.
    pub fn submatrix(&self, s: &IndexSet, c: &IndexSet) -> Result<F2Matrix> {
        s.check_within(self.nrows, "rows")?;
        c.check_within(self.ncols, "columns")?;
        Ok(F2Matrix::from_fn(s.len(), c.len(), |i, j| {
            self.get(s.members[i] - 1, c.members[j] - 1)
        }))
    }

    /// `B_Rows[S, C]`: off-diagonal entries of `B[S, C]`, with each diagonal
    /// entry replaced by the sum of the rest of its row.
    pub fn rows_normalized(&self, s: &IndexSet, c: &IndexSet) -> Result<F2Matrix> {
        if s.len() != c.len() {
            return domain(format!("|S| = {} but |C| = {}", s.len(), c.len()));
        }
        let mut m = self.submatrix(s, c)?;
        for i in 0..m.nrows {
            m.set(i, i, false);
            let sum = m.row(i).parity();
            m.set(i, i, sum);
        }
        Ok(m)
    }

    /// `[M | v]`.
    pub fn with_column(&self, v: &F2Vector) -> Result<F2Matrix> {
        if v.len() != self.nrows {
            return domain("column length does not match row count");
        }
        Ok(F2Matrix::from_fn(self.nrows, self.ncols + 1, |i, j| {
            if j < self.ncols {
                self.get(i, j)
            } else {
                v.get(i)
            }
        }))
    }

    /// Whether `v` is an F₂-combination of the columns.
    pub fn in_column_space(&self, v: &F2Vector) -> Result<bool> {
        Ok(self.with_column(v)?.rank() == self.rank())
    }

    /// Matrix whose columns are `cols`, all of length `nrows`.
    pub fn from_columns(nrows: usize, cols: &[F2Vector]) -> Result<F2Matrix> {
        if cols.iter().any(|c| c.len() != nrows) {
            return domain("columns must share one length");
        }
        Ok(F2Matrix::from_fn(nrows, cols.len(), |i, j| cols[j].get(i)))
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Matrix {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for F2Matrix {
    /// Rows as bit strings separated by `/`, e.g. `010/101/011`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

/// One cell of a block layout.
#[derive(Clone, Debug)]
pub enum Block {
    Matrix(F2Matrix),
    /// A column vector, `len × 1`.
    Column(F2Vector),
    /// A transposed vector, `1 × len`.
    Row(F2Vector),
    Scalar(bool),
    /// Zero block whose shape is taken from the rest of its block row and column.
    Zero,
}

impl Block {
    fn shape(&self) -> Option<(usize, usize)> {
        match self {
            Block::Matrix(m) => Some((m.nrows, m.ncols)),
            Block::Column(v) => Some((v.len(), 1)),
            Block::Row(v) => Some((1, v.len())),
            Block::Scalar(_) => Some((1, 1)),
            Block::Zero => None,
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        match self {
            Block::Matrix(m) => m.get(i, j),
            Block::Column(v) => v.get(i),
            Block::Row(v) => v.get(j),
            Block::Scalar(b) => *b,
            Block::Zero => false,
        }
    }
}

/// Assembles a matrix from a rectangular grid of blocks.
pub fn block(grid: &[Vec<Block>]) -> Result<F2Matrix> {
    let ncells = grid.first().map_or(0, Vec::len);
    if grid.iter().any(|row| row.len() != ncells) {
        return domain("ragged block grid");
    }
    let mut heights = vec![None; grid.len()];
    let mut widths = vec![None; ncells];
    for (bi, row) in grid.iter().enumerate() {
        for (bj, cell) in row.iter().enumerate() {
            let Some((h, w)) = cell.shape() else { continue };
            for (slot, val, what) in
                [(&mut heights[bi], h, "height"), (&mut widths[bj], w, "width")]
            {
                match *slot {
                    Some(prev) if prev != val => {
                        return domain(format!(
                            "block ({bi}, {bj}) has {what} {val}, expected {prev}"
                        ))
                    }
                    _ => *slot = Some(val),
                }
            }
        }
    }
    let heights: Vec<usize> = match heights.into_iter().collect::<Option<_>>() {
        Some(h) => h,
        None => return domain("a block row has no sized block"),
    };
    let widths: Vec<usize> = match widths.into_iter().collect::<Option<_>>() {
        Some(w) => w,
        None => return domain("a block column has no sized block"),
    };
    let mut out = F2Matrix::zeros(heights.iter().sum(), widths.iter().sum());
    let mut r0 = 0;
    for (bi, row) in grid.iter().enumerate() {
        let mut c0 = 0;
        for (bj, cell) in row.iter().enumerate() {
            if let Block::Matrix(m) = cell {
                for i in 0..m.nrows {
                    for (wi, &word) in m.row_words(i).iter().enumerate() {
                        let mut bits = word;
                        while bits != 0 {
                            let j = wi * WORD + bits.trailing_zeros() as usize;
                            out.set(r0 + i, c0 + j, true);
                            bits &= bits - 1;
                        }
                    }
                }
            } else if !matches!(cell, Block::Zero) {
                for i in 0..heights[bi] {
                    for j in 0..widths[bj] {
                        if cell.get(i, j) {
                            out.set(r0 + i, c0 + j, true);
                        }
                    }
                }
            }
            c0 += widths[bj];
        }
        r0 += heights[bi];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Rank by enumerating the span of the rows.
    fn brute_rank(m: &F2Matrix) -> usize {
        let rows: Vec<F2Vector> = (0..m.nrows()).map(|i| m.row(i)).collect();
        let mut span = std::collections::HashSet::new();
        for mask in 0u64..(1 << rows.len()) {
            let mut acc = F2Vector::zeros(m.ncols());
            for (i, r) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc = acc.xor(r);
                }
            }
            span.insert(acc);
        }
        span.len().trailing_zeros() as usize
    }

    fn random_matrix(rng: &mut impl Rng, nrows: usize, ncols: usize) -> F2Matrix {
        F2Matrix::from_fn(nrows, ncols, |_, _| rng.gen())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(F2Matrix::identity(3).rank(), 3);
        assert_eq!(F2Matrix::zeros(2, 2).rank(), 0);
        let m = F2Matrix::from_rows(&[[0, 1, 1], [1, 0, 1], [1, 1, 1]]);
        assert_eq!(brute_rank(&m), 3);
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn rank_agrees_with_span_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let (r, c) = (rng.gen_range(0..9), rng.gen_range(0..70));
            let m = random_matrix(&mut rng, r, c);
            assert_eq!(m.rank(), brute_rank(&m), "{m:?}");
        }
    }

    #[test]
    fn corank_and_det_examples() {
        assert_eq!(F2Matrix::zeros(2, 2).corank().unwrap(), 2);
        assert_eq!(F2Matrix::identity(5).corank().unwrap(), 0);
        let ones = F2Matrix::from_rows(&[[1, 1], [1, 1]]);
        assert_eq!(ones.corank().unwrap(), 1);
        assert!(!ones.det().unwrap());
        assert!(F2Matrix::zeros(0, 0).det().unwrap());
        assert!(F2Matrix::from_rows(&[[0, 0, 1], [0, 1, 0], [1, 0, 0]]).det().unwrap());
        assert!(F2Matrix::zeros(2, 3).corank().is_err());
        assert!(F2Matrix::zeros(3, 2).det().is_err());
    }

    #[test]
    fn submatrix_examples() {
        let id = F2Matrix::identity(3);
        let s = IndexSet::new(vec![1, 3]).unwrap();
        assert_eq!(id.submatrix(&s, &s).unwrap(), F2Matrix::identity(2));
        let b = F2Matrix::from_rows(&[[1, 1], [0, 0]]);
        let all = IndexSet::full(2);
        assert_eq!(b.submatrix(&all, &all).unwrap(), b);
        let col = b.submatrix(&all, &IndexSet::new(vec![2]).unwrap()).unwrap();
        assert_eq!(col, F2Matrix::from_rows(&[[1], [0]]));
        assert!(b.submatrix(&IndexSet::new(vec![3]).unwrap(), &all).is_err());
        assert!(IndexSet::new(vec![2, 1]).is_err());
        assert!(IndexSet::new(vec![0]).is_err());
    }

    #[test]
    fn rows_normalized_examples() {
        let zero_off = F2Matrix::identity(4);
        let all = IndexSet::full(4);
        assert_eq!(zero_off.rows_normalized(&all, &all).unwrap(), F2Matrix::zeros(4, 4));
        // A for n = 15 = 3·5.
        let a15 = F2Matrix::from_rows(&[[1, 1], [1, 1]]);
        let s = IndexSet::full(2);
        assert_eq!(a15.rows_normalized(&s, &s).unwrap(), a15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let m = random_matrix(&mut rng, 9, 9);
            let s = IndexSet::from_mask(rng.gen::<u64>() & 0x1ff, 9);
            let c = IndexSet::from_mask(rng.gen::<u64>() & 0x1ff, 9);
            if s.len() == c.len() {
                let rn = m.rows_normalized(&s, &c).unwrap();
                assert!(rn.row_sums().is_zero());
            } else {
                assert!(m.rows_normalized(&s, &c).is_err());
            }
        }
    }

    #[test]
    fn block_examples() {
        let i2 = F2Matrix::identity(2);
        let m = block(&[
            vec![Block::Matrix(i2.clone()), Block::Zero],
            vec![Block::Zero, Block::Matrix(i2)],
        ])
        .unwrap();
        assert_eq!(m, F2Matrix::identity(4));

        let empty = F2Vector::zeros(0);
        let m = block(&[
            vec![Block::Matrix(F2Matrix::zeros(0, 0)), Block::Column(empty.clone())],
            vec![Block::Row(empty), Block::Scalar(false)],
        ])
        .unwrap();
        assert_eq!(m, F2Matrix::zeros(1, 1));

        // M₆ for n = 6: A = (0), y = z = (1).
        let a = F2Matrix::zeros(1, 1);
        let y = F2Vector::from_bits(&[1]);
        let m6 = block(&[
            vec![Block::Matrix(a.clone()), Block::Matrix(a.clone()), Block::Column(y.clone())],
            vec![Block::Matrix(a), Block::Matrix(F2Matrix::identity(1)), Block::Column(y.clone())],
            vec![Block::Row(y.clone()), Block::Row(y), Block::Scalar(false)],
        ])
        .unwrap();
        assert_eq!(m6, F2Matrix::from_rows(&[[0, 0, 1], [0, 1, 1], [1, 1, 0]]));

        assert!(block(&[vec![Block::Matrix(F2Matrix::identity(2)), Block::Column(F2Vector::zeros(3))]])
            .is_err());
        assert!(block(&[vec![Block::Zero]]).is_err());
    }

    #[test]
    fn column_space_examples() {
        let m = F2Matrix::from_rows(&[[1], [1]]);
        assert!(m.in_column_space(&F2Vector::zeros(2)).unwrap());
        assert!(m.in_column_space(&F2Vector::from_bits(&[1, 1])).unwrap());
        assert!(!m.in_column_space(&F2Vector::from_bits(&[1, 0])).unwrap());
        assert!(F2Matrix::identity(3).in_column_space(&F2Vector::from_bits(&[1, 0, 1])).unwrap());
        assert!(m.in_column_space(&F2Vector::zeros(3)).is_err());
    }

    #[test]
    fn rank_of_transpose_and_det_iff_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (r, c) = (rng.gen_range(0..=64), rng.gen_range(0..=64));
            let m = random_matrix(&mut rng, r, c);
            assert_eq!(m.rank(), m.transpose().rank());
            let n = rng.gen_range(0..=12);
            let sq = random_matrix(&mut rng, n, n);
            assert_eq!(sq.det().unwrap(), sq.corank().unwrap() == 0);
        }
    }

    #[test]
    fn alternating_matrices_have_even_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = rng.gen_range(0..=80);
            let mut m = F2Matrix::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let b = rng.gen();
                    m.set(i, j, b);
                    m.set(j, i, b);
                }
            }
            assert!(m.is_alternating());
            assert_eq!(m.rank() % 2, 0);
        }
    }

    proptest! {
        #[test]
        fn submatrix_composes(
            bits in proptest::collection::vec(any::<bool>(), 100),
            s in 0u64..1024, c in 0u64..1024, s2 in 0u64..1024, c2 in 0u64..1024,
        ) {
            let b = F2Matrix::from_fn(10, 10, |i, j| bits[i * 10 + j]);
            let s = IndexSet::from_mask(s, 10);
            let c = IndexSet::from_mask(c, 10);
            let s2 = IndexSet::from_mask(s2, s.len());
            let c2 = IndexSet::from_mask(c2, c.len());
            let lhs = b.submatrix(&s, &c).unwrap().submatrix(&s2, &c2).unwrap();
            let rhs = b.submatrix(&s.compose(&s2).unwrap(), &c.compose(&c2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn in_column_space_matches_products(
            bits in proptest::collection::vec(any::<bool>(), 48), x in 0u64..64, flip in 0usize..8,
        ) {
            let m = F2Matrix::from_fn(8, 6, |i, j| bits[i * 6 + j]);
            let xv = F2Vector::from_bools((0..6).map(|k| x >> k & 1 == 1));
            let v = m.mul_vec(&xv).unwrap();
            prop_assert!(m.in_column_space(&v).unwrap());
            let mut w = v.clone();
            w.set(flip, !w.get(flip));
            let reachable = (0u64..64).any(|y| {
                let yv = F2Vector::from_bools((0..6).map(|k| y >> k & 1 == 1));
                m.mul_vec(&yv).unwrap() == w
            });
            prop_assert_eq!(m.in_column_space(&w).unwrap(), reachable);
        }
    }
}
