//! Hyperlattice geometry: 4 sites per axis, `r` axes, `x_1` fastest.

use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// Position `(x_1, …, x_r)` with each coordinate in `1..=4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitCoord(Vec<u8>);

impl QubitCoord {
    pub fn new(coords: Vec<u8>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Usage("a coordinate needs at least one axis".into()));
        }
        if let Some(c) = coords.iter().find(|c| !(1..=4).contains(*c)) {
            return Err(Error::Usage(format!("coordinate {c} outside 1..=4")));
        }
        Ok(Self(coords))
    }

    pub fn from_index(index: usize, level: usize) -> Self {
        assert!(index < num_qubits(level));
        Self(
            (0..level)
                .map(|axis| ((index >> (2 * axis)) & 3) as u8 + 1)
                .collect(),
        )
    }

    /// `Σ (x_i − 1)·4^{i−1}`.
    pub fn index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .map(|(axis, &c)| (c as usize - 1) << (2 * axis))
            .sum()
    }

    pub fn coords(&self) -> &[u8] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }
}

pub fn num_qubits(level: usize) -> usize {
    1 << (2 * level)
}

/// Zero-based coordinate of `index` along `axis`.
#[inline]
pub fn coord(index: usize, axis: usize) -> usize {
    (index >> (2 * axis)) & 3
}

/// Supports of all lines along `axis`: the four qubits that agree on every
/// other coordinate. Ordered by the linear index of their first qubit.
pub fn lines_along(level: usize, axis: usize) -> Vec<BitVec> {
    let n = num_qubits(level);
    let stride = 1 << (2 * axis);
    (0..n)
        .filter(|&q| coord(q, axis) == 0)
        .map(|q| BitVec::from_indices(n, (0..4).map(|t| q + t * stride)))
        .collect()
}

/// `r·4^{r−1}` line supports, grouped by axis.
pub fn enumerate_lines(level: usize) -> Vec<BitVec> {
    (0..level).flat_map(|axis| lines_along(level, axis)).collect()
}

/// Qubits lying on at least one hyperplane `x_n = 4`.
pub fn boundary_mask(level: usize) -> BitVec {
    let n = num_qubits(level);
    BitVec::from_indices(n, (0..n).filter(|&q| (0..level).any(|a| coord(q, a) == 3)))
}

/// Number of distinct coordinate values a support takes along each axis.
pub fn extent(support: &BitVec, level: usize) -> Vec<usize> {
    (0..level)
        .map(|axis| {
            let mut seen = [false; 4];
            for q in support.iter_ones() {
                seen[coord(q, axis)] = true;
            }
            seen.iter().filter(|s| **s).count()
        })
        .collect()
}
