//! Recursive construction of stabilizers and logicals.
//!
//! A level-`r` code lives on four level-`(r−1)` blocks stacked along the new
//! axis `x_r`; block `b` occupies qubits `b·4^{r−1} .. (b+1)·4^{r−1}`.

use crate::gf2::{BitVec, SpanBasis};

use super::lattice::num_qubits;
use super::Family;

/// Stabilizers and logicals of one level before gauge selection.
#[derive(Clone, Debug)]
pub(crate) struct Skeleton {
    pub level: usize,
    /// Z-type generators and the axis each extends along. X-type generators
    /// share supports with Z-type ones of the same index.
    pub z_stabilizers: Vec<BitVec>,
    pub x_stabilizers: Vec<BitVec>,
    pub axes: Vec<usize>,
    pub z_logicals: Vec<BitVec>,
    pub x_logicals: Vec<BitVec>,
}

fn embed(child: &BitVec, block: usize, n: usize) -> BitVec {
    let mut v = BitVec::zeros(n);
    v.xor_at(block * child.len(), child);
    v
}

fn embed_pair(child: &BitVec, blocks: [usize; 2], n: usize) -> BitVec {
    let mut v = embed(child, blocks[0], n);
    v.xor_at(blocks[1] * child.len(), child);
    v
}

fn embed_all(child: &BitVec, n: usize) -> BitVec {
    let mut v = BitVec::zeros(n);
    for b in 0..4 {
        v.xor_at(b * child.len(), child);
    }
    v
}

/// The `D_4` code: `X1X2X3X4`, `Z1Z2Z3Z4`, `X_L1 = X2X3`, `Z_L1 = Z1Z2`,
/// `X_L2 = X1X2`, `Z_L2 = Z2Z3`.
fn level_one() -> Skeleton {
    let all = BitVec::from_indices(4, 0..4);
    Skeleton {
        level: 1,
        z_stabilizers: vec![all.clone()],
        x_stabilizers: vec![all],
        axes: vec![0],
        z_logicals: vec![
            BitVec::from_indices(4, [0, 1]),
            BitVec::from_indices(4, [1, 2]),
        ],
        x_logicals: vec![
            BitVec::from_indices(4, [1, 2]),
            BitVec::from_indices(4, [0, 1]),
        ],
    }
}

/// Logicals at the next level: `Z` on blocks `{j, j+1}` and `X` on blocks
/// `{1−j, 2−j}` (zero-based) for the new index bit `j`. The new bit is the
/// most significant bit of the logical index.
fn lift_logicals(child: &Skeleton, n: usize) -> (Vec<BitVec>, Vec<BitVec>) {
    let mut z = Vec::with_capacity(2 * child.z_logicals.len());
    let mut x = Vec::with_capacity(2 * child.x_logicals.len());
    for j in 0..2 {
        for zl in &child.z_logicals {
            z.push(embed_pair(zl, [j, j + 1], n));
        }
        for xl in &child.x_logicals {
            x.push(embed_pair(xl, [1 - j, 2 - j], n));
        }
    }
    (z, x)
}

/// Generators extending along the new axis: products of one child logical
/// over all four blocks. The X-type partner of Z index `j` uses the
/// complemented X index so both share a support.
fn new_axis_generators(child: &Skeleton, n: usize) -> (Vec<BitVec>, Vec<BitVec>) {
    let kc = child.z_logicals.len();
    let z = child.z_logicals.iter().map(|zl| embed_all(zl, n)).collect();
    let x = (0..kc).map(|j| embed_all(&child.x_logicals[kc - 1 - j], n)).collect();
    (z, x)
}

/// Keeps candidates in order whenever they enlarge the span. X and Z
/// candidates are filtered together so the pairing by index survives.
fn keep_independent(
    n: usize,
    z: Vec<BitVec>,
    x: Vec<BitVec>,
    axes: Vec<usize>,
) -> (Vec<BitVec>, Vec<BitVec>, Vec<usize>) {
    let mut zspan = SpanBasis::new(n);
    let mut xspan = SpanBasis::new(n);
    let mut out = (Vec::new(), Vec::new(), Vec::new());
    for ((zs, xs), axis) in z.into_iter().zip(x).zip(axes) {
        let zi = zspan.insert(&zs);
        let xi = xspan.insert(&xs);
        if zi || xi {
            out.0.push(zs);
            out.1.push(xs);
            out.2.push(axis);
        }
    }
    out
}

fn lift(child: &Skeleton, family: Family) -> Skeleton {
    let level = child.level + 1;
    let n = num_qubits(level);
    let mut z = Vec::new();
    let mut x = Vec::new();
    let mut axes = Vec::new();

    match family {
        // Adjacent pairs of child stabilizers along the new axis.
        Family::Subsystem => {
            for ((zs, xs), &axis) in child.z_stabilizers.iter().zip(&child.x_stabilizers).zip(&child.axes) {
                for j in 0..3 {
                    z.push(embed_pair(zs, [j, j + 1], n));
                    x.push(embed_pair(xs, [j, j + 1], n));
                    axes.push(axis);
                }
            }
        }
        // Every child stabilizer is inherited in each block.
        Family::Original => {
            for b in 0..4 {
                for ((zs, xs), &axis) in child.z_stabilizers.iter().zip(&child.x_stabilizers).zip(&child.axes) {
                    z.push(embed(zs, b, n));
                    x.push(embed(xs, b, n));
                    axes.push(axis);
                }
            }
        }
    }
    let (zb, xb) = new_axis_generators(child, n);
    axes.extend(std::iter::repeat_n(level - 1, zb.len()));
    z.extend(zb);
    x.extend(xb);

    let (z_stabilizers, x_stabilizers, axes) = keep_independent(n, z, x, axes);
    let (z_logicals, x_logicals) = lift_logicals(child, n);
    Skeleton {
        level,
        z_stabilizers,
        x_stabilizers,
        axes,
        z_logicals,
        x_logicals,
    }
}

pub(crate) fn skeleton(level: usize, family: Family) -> Skeleton {
    let mut s = level_one();
    while s.level < level {
        s = lift(&s, family);
    }
    s
}
