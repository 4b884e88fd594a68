//! Gauge-qubit generators and pure errors.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, SpanBasis};

use super::lattice::boundary_mask;

/// Elements of the check span supported inside the hyperplanes `x_n = 4`.
/// The returned list is a basis of that subspace.
fn boundary_check_span(level: usize, checks: &[BitVec]) -> Vec<BitVec> {
    let boundary = boundary_mask(level);
    let n = boundary.len();
    let mut interior = BitVec::from_indices(n, 0..n);
    interior.xor_assign(&boundary);

    // Eliminate on interior coordinates only; a check combination whose
    // interior part cancels is supported on the boundary.
    let mut pivots: Vec<(usize, BitVec)> = Vec::new();
    let mut span = SpanBasis::new(n);
    let mut basis = Vec::new();
    // Checks already inside the boundary go first so they enter the basis as
    // themselves rather than as sums with other lines.
    let (inside, rest): (Vec<&BitVec>, Vec<&BitVec>) =
        checks.iter().partition(|c| c.is_subset_of(&boundary));
    for check in inside.into_iter().chain(rest) {
        let mut v = check.clone();
        loop {
            let inner = (0..v.words().len())
                .find_map(|w| {
                    let bits = v.words()[w] & interior.words()[w];
                    (bits != 0).then(|| w * 64 + bits.trailing_zeros() as usize)
                });
            match inner {
                None => {
                    if span.insert(&v) {
                        basis.push(v);
                    }
                    break;
                }
                Some(p) => match pivots.iter().find(|(q, _)| *q == p) {
                    Some((_, row)) => v.xor_assign(row),
                    None => {
                        pivots.push((p, v));
                        break;
                    }
                },
            }
        }
    }
    basis
}

/// Gauge generators as `(x_gauge, z_gauge)` with `x_gauge[i]` anticommuting
/// with `z_gauge[j]` exactly when `i == j`.
///
/// Candidates come from the boundary part of the check span, reduced modulo
/// the stabilizer span, then paired by symplectic Gram–Schmidt. X- and Z-type
/// checks share supports, so one candidate list serves both sides.
pub(crate) fn select_gauge_generators(
    level: usize,
    checks: &[BitVec],
    stabilizers: &[BitVec],
    expected_pairs: usize,
) -> Result<(Vec<BitVec>, Vec<BitVec>)> {
    let n = checks.first().map_or(0, |c| c.len());
    let mut quotient = SpanBasis::new(n);
    for s in stabilizers {
        quotient.insert(s);
    }
    let candidates: Vec<BitVec> = boundary_check_span(level, checks)
        .into_iter()
        .filter(|v| quotient.insert(v))
        .collect();

    let mut xs = candidates.clone();
    let mut zs = candidates;
    let mut x_gauge = Vec::new();
    let mut z_gauge = Vec::new();
    loop {
        let found = xs
            .iter()
            .enumerate()
            .find_map(|(i, x)| zs.iter().position(|z| x.dot(z)).map(|j| (i, j)));
        let Some((i, j)) = found else { break };
        let x = xs.remove(i);
        let z = zs.remove(j);
        for other in xs.iter_mut() {
            if other.dot(&z) {
                other.xor_assign(&x);
            }
        }
        for other in zs.iter_mut() {
            if x.dot(other) {
                other.xor_assign(&z);
            }
        }
        x_gauge.push(x);
        z_gauge.push(z);
    }

    if x_gauge.len() != expected_pairs {
        return Err(Error::Consistency(format!(
            "gauge pairing produced {} pairs, expected {expected_pairs}",
            x_gauge.len()
        )));
    }
    Ok((x_gauge, z_gauge))
}

/// One X-type support per Z stabilizer that flips that stabilizer only and
/// commutes with every Z logical and Z gauge generator, reduced to locally
/// minimal weight by adding X-stabilizer-space vectors.
pub(crate) fn compute_pure_errors(
    z_stabilizers: &[BitVec],
    z_logicals: &[BitVec],
    z_gauge: &[BitVec],
) -> Result<Vec<BitVec>> {
    let Some(n) = z_stabilizers.first().map(|s| s.len()) else {
        return Ok(Vec::new());
    };
    let rows: Vec<BitVec> = z_stabilizers
        .iter()
        .chain(z_logicals)
        .chain(z_gauge)
        .cloned()
        .collect();
    let m = rows.len();
    let constraints = BitMatrix::new(n, rows)?;
    let kernel = constraints.nullspace();

    let targets: Vec<BitVec> = (0..z_stabilizers.len())
        .map(|i| BitVec::from_indices(m, [i]))
        .collect();
    let solutions = constraints.solve_affine_many(&targets)?;
    solutions
        .into_iter()
        .enumerate()
        .map(|(i, sol)| {
            let mut t = sol.ok_or_else(|| {
                Error::Consistency(format!("no pure error exists for stabilizer {i}"))
            })?;
            minimize_weight(&mut t, &kernel);
            Ok(t)
        })
        .collect()
}

/// Greedy descent over a fixed basis: repeatedly applies any basis vector that
/// lowers the weight until none does.
fn minimize_weight(v: &mut BitVec, basis: &[BitVec]) {
    let mut weight = v.weight();
    loop {
        let mut improved = false;
        for k in basis {
            let w = v.xor(k).weight();
            if w < weight {
                v.xor_assign(k);
                weight = w;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}
