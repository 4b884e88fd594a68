//! Packed GF(2) vectors and matrices.
//!
//! X-type and Z-type Pauli supports, syndromes and logical labels are all
//! stored as [`BitVec`]. Two supports anticommute exactly when their overlap
//! has odd size, which is a popcount over the AND of the packed words.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// Fixed-length bit vector packed into 64-bit words.
///
/// Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
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

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    /// Bit `i` of `value` becomes bit `i` of the vector. `len` must be at most 64.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 needs len <= 64, got {len}");
        let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value & mask;
        }
        v
    }

    /// Parses a string of `0`/`1` characters, ignoring whitespace.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Usage(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_bools(&bits))
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
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// Hamming weight.
    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the overlap, without a length check.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Size of the overlap of the two supports.
    pub fn overlap(&self, other: &BitVec) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// True when `self` has no bit set outside `other`.
    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
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

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Packs into a single word. Panics for vectors longer than 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "to_u64 needs len <= 64, got {}", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    /// Copies `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len);
        let mut out = BitVec::zeros(len);
        for i in self.iter_ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// XORs `other` into `self` at bit offset `offset`.
    pub fn xor_at(&mut self, offset: usize, other: &BitVec) {
        assert!(offset + other.len <= self.len);
        for i in other.iter_ones() {
            self.flip(offset + i);
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// |supp(a) ∩ supp(b)| mod 2. `true` means the X-type and Z-type operators anticommute.
pub fn overlap_parity(a: &BitVec, b: &BitVec) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Usage(format!(
            "overlap_parity length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.dot(b))
}

/// Dense GF(2) matrix stored as packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    ncols: usize,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    pub rows: Vec<BitVec>,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn new(ncols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::Usage(format!(
                "row of length {} in a matrix with {ncols} columns",
                bad.len()
            )));
        }
        Ok(Self { rows, ncols })
    }

    pub fn from_rows(ncols: usize, rows: &[BitVec]) -> Result<Self> {
        Self::new(ncols, rows.to_vec())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| BitVec::from_indices(n, [i])).collect(),
            ncols: n,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
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

    pub fn transpose(&self) -> BitMatrix {
        let mut out: Vec<BitVec> = (0..self.ncols).map(|_| BitVec::zeros(self.nrows())).collect();
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                out[c].set(r, true);
            }
        }
        BitMatrix {
            rows: out,
            ncols: self.nrows(),
        }
    }

    /// M·x over GF(2).
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.ncols);
        let mut out = BitVec::zeros(self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    /// Reduced row echelon form. Pivots are taken column by column from the
    /// left; within a column the earliest remaining row in the original order
    /// is used, so the result depends only on the input.
    pub fn row_reduce(&self) -> RowEchelon {
        self.row_reduce_within(self.ncols)
    }

    /// Like [`row_reduce`](Self::row_reduce) but only columns `< limit` may
    /// hold pivots. Rows without a pivot are kept at the bottom.
    fn row_reduce_within(&self, limit: usize) -> RowEchelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..limit {
            if top == rows.len() {
                break;
            }
            let Some(p) = (top..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(top, p);
            let pivot = rows[top].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != top && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            top += 1;
        }
        if limit == self.ncols {
            rows.truncate(top);
        }
        RowEchelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        let mut basis = SpanBasis::new(self.ncols);
        self.rows.iter().filter(|r| basis.insert(r)).count()
    }

    /// Some `x` with `M·x == target`, or `None` if the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve_affine(&self, target: &BitVec) -> Result<Option<BitVec>> {
        if target.len() != self.nrows() {
            return Err(Error::Usage(format!(
                "solve_affine target has length {}, matrix has {} rows",
                target.len(),
                self.nrows()
            )));
        }
        // Augment each row with its target bit in an extra trailing column.
        let n = self.ncols;
        let aug: Vec<BitVec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut a = BitVec::zeros(n + 1);
                a.xor_at(0, row);
                a.set(n, target.get(i));
                a
            })
            .collect();
        let ech = BitMatrix { rows: aug, ncols: n + 1 }.row_reduce();
        if ech.pivots.last() == Some(&n) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(n);
        for (row, &col) in ech.rows.iter().zip(&ech.pivots) {
            if row.get(n) {
                x.set(col, true);
            }
        }
        Ok(Some(x))
    }

    /// Solves `M·x = t` for several targets with a single elimination.
    pub fn solve_affine_many(&self, targets: &[BitVec]) -> Result<Vec<Option<BitVec>>> {
        if let Some(t) = targets.iter().find(|t| t.len() != self.nrows()) {
            return Err(Error::Usage(format!(
                "solve_affine target has length {}, matrix has {} rows",
                t.len(),
                self.nrows()
            )));
        }
        let n = self.ncols;
        let aug: Vec<BitVec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut a = BitVec::zeros(n + targets.len());
                a.xor_at(0, row);
                for (k, t) in targets.iter().enumerate() {
                    if t.get(i) {
                        a.set(n + k, true);
                    }
                }
                a
            })
            .collect();
        let ech = BitMatrix { rows: aug, ncols: n + targets.len() }.row_reduce_within(n);
        let rank = ech.pivots.len();
        Ok((0..targets.len())
            .map(|k| {
                if ech.rows[rank..].iter().any(|row| row.get(n + k)) {
                    return None;
                }
                let mut x = BitVec::zeros(n);
                for (row, &col) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(n + k) {
                        x.set(col, true);
                    }
                }
                Some(x)
            })
            .collect())
    }

    /// Basis of the right null space `{x : M·x = 0}`.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let ech = self.row_reduce();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = BitVec::from_indices(self.ncols, [free]);
                for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(free) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect()
    }

    /// Coefficients `c` with `Σ c_i·row_i == target`, if `target` is in the row span.
    pub fn express_in_rows(&self, target: &BitVec) -> Result<Option<BitVec>> {
        self.transpose().solve_affine(target)
    }
}

/// Incremental row-span membership, used for independence filtering.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    ncols: usize,
    // (pivot column, row) with rows reduced against earlier pivots.
    rows: Vec<(usize, BitVec)>,
}

impl SpanBasis {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns `false` when it was already a member.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.ncols);
        let r = self.reduce(v);
        let lead = r.iter_ones().next();
        match lead {
            None => false,
            Some(p) => {
                self.rows.push((p, r));
                true
            }
        }
    }
}
