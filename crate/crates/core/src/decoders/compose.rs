//! How a parent code's Z stabilizers and Z logicals decompose over its four
//! child blocks.
//!
//! Each parent row restricted to block `b` is expressed over the child basis
//! `[child Z stabilizers; child Z logicals]`, so the parent syndrome and raw
//! label become parities of the children's syndromes and raw labels.

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

#[derive(Clone, Debug)]
pub(crate) struct Composition {
    pub child_syndrome_bits: usize,
    pub child_label_bits: usize,
    /// Parent stabilizers fixed by child syndromes: `(parent index, mask)`
    /// with bit `b·mc + i` for child `b`, stabilizer `i`.
    pub syndrome_rows: Vec<(usize, BitVec)>,
    /// Parent stabilizers fixed by child labels: `(parent index, mask)` with
    /// bit `b·kc + j` for child `b`, logical `j`.
    pub label_rows: Vec<(usize, u64)>,
    /// One mask per parent logical, over child labels.
    pub logical_rows: Vec<u64>,
}

pub(crate) fn derive(parent: &CodeSpec, child: &CodeSpec) -> Result<Composition> {
    let nc = child.n();
    if parent.n() != 4 * nc {
        return Err(Error::Consistency(format!(
            "parent has {} qubits, child blocks have {nc}",
            parent.n()
        )));
    }
    let mc = child.num_stabilizers();
    let kc = child.num_logicals();
    if 4 * kc > 64 {
        return Err(Error::Capacity(format!("{kc} child logicals exceed the label word")));
    }
    let basis: Vec<BitVec> = child
        .z_stabilizers()
        .iter()
        .chain(child.z_logicals())
        .cloned()
        .collect();
    let basis = BitMatrix::new(nc, basis)?;

    let split = |row: &BitVec| -> Result<(BitVec, u64)> {
        let mut syn = BitVec::zeros(4 * mc);
        let mut lab = 0u64;
        for b in 0..4 {
            let piece = row.slice(b * nc, nc);
            let coeffs = basis.express_in_rows(&piece)?.ok_or_else(|| {
                Error::Consistency(format!(
                    "parent operator restricted to block {b} is outside the child stabilizer and logical span"
                ))
            })?;
            for c in coeffs.iter_ones() {
                if c < mc {
                    syn.set(b * mc + c, true);
                } else {
                    lab |= 1 << (b * kc + c - mc);
                }
            }
        }
        Ok((syn, lab))
    };

    let mut syndrome_rows = Vec::new();
    let mut label_rows = Vec::new();
    for (i, row) in parent.z_stabilizers().iter().enumerate() {
        match split(row)? {
            (syn, 0) => syndrome_rows.push((i, syn)),
            (syn, lab) if syn.is_zero() => label_rows.push((i, lab)),
            _ => {
                return Err(Error::Consistency(format!(
                    "parent stabilizer {i} mixes child syndromes and child labels"
                )))
            }
        }
    }
    let mut logical_rows = Vec::new();
    for (j, row) in parent.z_logicals().iter().enumerate() {
        let (syn, lab) = split(row)?;
        if !syn.is_zero() {
            return Err(Error::Consistency(format!(
                "parent logical {j} depends on child syndromes"
            )));
        }
        logical_rows.push(lab);
    }
    Ok(Composition {
        child_syndrome_bits: mc,
        child_label_bits: kc,
        syndrome_rows,
        label_rows,
        logical_rows,
    })
}

/// Parity of `x & mask`.
#[inline]
pub(crate) fn parity(x: u64, mask: u64) -> bool {
    (x & mask).count_ones() & 1 == 1
}

/// Linear system `A·x = t` over at most 64 unknowns and 64 equations,
/// eliminated once so each right-hand side solves in O(rank).
#[derive(Clone, Debug)]
pub(crate) struct AffineSystem {
    /// Per reduced row: pivot column and the combination of original
    /// equations that produced it.
    pivots: Vec<(usize, u64)>,
    /// Combinations of equations whose left-hand sides cancel.
    dependencies: Vec<u64>,
    kernel: Vec<u64>,
}

impl AffineSystem {
    pub fn new(rows: &[u64], nvars: usize) -> Result<Self> {
        if nvars > 64 || rows.len() > 64 {
            return Err(Error::Capacity(format!(
                "{} equations in {nvars} unknowns exceed the 64-bit solver",
                rows.len()
            )));
        }
        let mut work: Vec<(u64, u64)> = rows
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, 1u64 << i))
            .collect();
        let mut pivots: Vec<(usize, u64, u64)> = Vec::new();
        let mut dependencies = Vec::new();
        for (mut r, mut combo) in work.drain(..) {
            for &(p, prow, pcombo) in &pivots {
                if r >> p & 1 == 1 {
                    r ^= prow;
                    combo ^= pcombo;
                }
            }
            if r == 0 {
                dependencies.push(combo);
                continue;
            }
            let p = r.trailing_zeros() as usize;
            for (_, prow, pcombo) in pivots.iter_mut() {
                if *prow >> p & 1 == 1 {
                    *prow ^= r;
                    *pcombo ^= combo;
                }
            }
            pivots.push((p, r, combo));
        }
        let pivot_mask: u64 = pivots.iter().fold(0, |m, &(p, _, _)| m | 1 << p);
        let kernel = (0..nvars)
            .filter(|&c| pivot_mask >> c & 1 == 0)
            .map(|free| {
                pivots
                    .iter()
                    .filter(|(_, prow, _)| prow >> free & 1 == 1)
                    .fold(1u64 << free, |x, &(p, _, _)| x | 1 << p)
            })
            .collect();
        Ok(Self {
            pivots: pivots.into_iter().map(|(p, _, c)| (p, c)).collect(),
            dependencies,
            kernel,
        })
    }

    /// A solution with free variables zero, or `None` if inconsistent.
    pub fn particular(&self, target: u64) -> Option<u64> {
        if self.dependencies.iter().any(|&d| parity(target, d)) {
            return None;
        }
        Some(
            self.pivots
                .iter()
                .filter(|&&(_, combo)| parity(target, combo))
                .fold(0, |x, &(p, _)| x | 1 << p),
        )
    }

    #[cfg(test)]
    pub fn kernel(&self) -> &[u64] {
        &self.kernel
    }

    /// Every element of the kernel, in Gray-code order starting from zero.
    pub fn kernel_elements(&self) -> Result<Vec<u64>> {
        let dim = self.kernel.len();
        if dim > 26 {
            return Err(Error::Capacity(format!(
                "kernel of dimension {dim} is too large to enumerate"
            )));
        }
        let mut out = Vec::with_capacity(1 << dim);
        let mut x = 0u64;
        out.push(x);
        for i in 1u64..(1 << dim) {
            x ^= self.kernel[i.trailing_zeros() as usize];
            out.push(x);
        }
        Ok(out)
    }
}

/// Converts a mask of at most 64 bits to a word.
pub(crate) fn to_word(v: &BitVec) -> Result<u64> {
    if v.len() > 64 {
        return Err(Error::Capacity(format!("{} bits exceed a 64-bit word", v.len())));
    }
    Ok(v.to_u64())
}
