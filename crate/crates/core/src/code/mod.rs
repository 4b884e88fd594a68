//! Construction of subsystem and original `D_{4^r}` codes.
//!
//! Qubits sit on an `r`-dimensional lattice with four sites per axis, indexed
//! row-major with `x_1` fastest so that each level-`(r−1)` block is a
//! contiguous range. Check operators are weight-4 lines; the subsystem code
//! measures only those, while the original code measures its stabilizer
//! generators directly.

mod build;
mod export;
mod gauge;
pub mod lattice;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, SpanBasis};

pub use export::{export_parity_check, read_parity_check, ExportFormat};
pub use lattice::{enumerate_lines, QubitCoord};

pub const MAX_LEVEL: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Subsystem,
    Original,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Subsystem => "subsystem",
            Family::Original => "original",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subsystem" => Ok(Family::Subsystem),
            "original" => Ok(Family::Original),
            other => Err(Error::Usage(format!("unknown code family {other:?}"))),
        }
    }
}

/// A fully constructed code. Immutable once built.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    level: usize,
    family: Family,
    x_checks: Vec<BitVec>,
    z_checks: Vec<BitVec>,
    z_stabilizers: Vec<BitVec>,
    x_stabilizers: Vec<BitVec>,
    stabilizer_axes: Vec<usize>,
    x_logicals: Vec<BitVec>,
    z_logicals: Vec<BitVec>,
    x_gauge: Vec<BitVec>,
    z_gauge: Vec<BitVec>,
    pure_errors: Vec<BitVec>,
}

fn check_level(level: usize) -> Result<()> {
    if (1..=MAX_LEVEL).contains(&level) {
        Ok(())
    } else {
        Err(Error::Usage(format!("level must be in 1..={MAX_LEVEL}, got {level}")))
    }
}

/// `(x_checks, z_checks)`: one X and one Z check per hyperlattice line.
pub fn enumerate_checks(level: usize) -> Result<(Vec<BitVec>, Vec<BitVec>)> {
    check_level(level)?;
    let lines = enumerate_lines(level);
    Ok((lines.clone(), lines))
}

pub fn build_subsystem_code(level: usize) -> Result<CodeSpec> {
    check_level(level)?;
    let sk = build::skeleton(level, Family::Subsystem);
    let (x_checks, z_checks) = enumerate_checks(level)?;
    let g = counts::gauge_qubits(level);
    let (x_gauge, z_gauge) = if g == 0 {
        (Vec::new(), Vec::new())
    } else {
        gauge::select_gauge_generators(level, &z_checks, &sk.z_stabilizers, g)?
    };
    let pure_errors = gauge::compute_pure_errors(&sk.z_stabilizers, &sk.z_logicals, &z_gauge)?;
    Ok(CodeSpec {
        level,
        family: Family::Subsystem,
        x_checks,
        z_checks,
        z_stabilizers: sk.z_stabilizers,
        x_stabilizers: sk.x_stabilizers,
        stabilizer_axes: sk.axes,
        x_logicals: sk.x_logicals,
        z_logicals: sk.z_logicals,
        x_gauge,
        z_gauge,
        pure_errors,
    })
}

/// The original concatenated code. Its checks are its stabilizer generators.
pub fn build_original_code(level: usize) -> Result<CodeSpec> {
    check_level(level)?;
    let sk = build::skeleton(level, Family::Original);
    let pure_errors = gauge::compute_pure_errors(&sk.z_stabilizers, &sk.z_logicals, &[])?;
    Ok(CodeSpec {
        level,
        family: Family::Original,
        x_checks: sk.x_stabilizers.clone(),
        z_checks: sk.z_stabilizers.clone(),
        z_stabilizers: sk.z_stabilizers,
        x_stabilizers: sk.x_stabilizers,
        stabilizer_axes: sk.axes,
        x_logicals: sk.x_logicals,
        z_logicals: sk.z_logicals,
        x_gauge: Vec::new(),
        z_gauge: Vec::new(),
        pure_errors,
    })
}

pub fn build_code(family: Family, level: usize) -> Result<CodeSpec> {
    match family {
        Family::Subsystem => build_subsystem_code(level),
        Family::Original => build_original_code(level),
    }
}

/// Closed-form structural counts for the subsystem family.
pub mod counts {
    pub fn qubits(level: usize) -> usize {
        4usize.pow(level as u32)
    }
    pub fn logical_qubits(level: usize) -> usize {
        2usize.pow(level as u32)
    }
    pub fn gauge_qubits(level: usize) -> usize {
        4usize.pow(level as u32) + 2usize.pow(level as u32) - 2 * 3usize.pow(level as u32)
    }
    /// Independent stabilizer generators of one Pauli type.
    pub fn stabilizers_per_type(level: usize) -> usize {
        3usize.pow(level as u32) - 2usize.pow(level as u32)
    }
    /// Check operators of one Pauli type.
    pub fn checks_per_type(level: usize) -> usize {
        level * 4usize.pow(level as u32 - 1)
    }
    /// Independent stabilizer generators of the original code, both types.
    pub fn original_stabilizers(level: usize) -> usize {
        4usize.pow(level as u32) - 2usize.pow(level as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AncillaReport {
    /// Ancillas needed to measure all checks parallel to one axis at once.
    pub ancillas_per_direction: usize,
    /// Total when ancillas are reused across directions.
    pub total_with_reuse: usize,
    pub total_without_reuse: usize,
    /// `(data + ancilla) / data`.
    pub overhead_ratio: f64,
}

/// Structural summary used by the `build` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeSummary {
    pub level: usize,
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub g: usize,
    pub stabilizers: usize,
    pub checks: usize,
    pub independent_checks: usize,
    pub check_weights: Vec<usize>,
    pub stabilizer_weights: Vec<usize>,
    pub logical_weight: usize,
    pub distance: Option<usize>,
}

impl fmt::Display for CodeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} k={} g={} stab={} checks={}({} indep)",
            self.n, self.k, self.g, self.stabilizers, self.checks, self.independent_checks
        )?;
        if let Some(d) = self.distance {
            write!(f, " d={d}")?;
        }
        Ok(())
    }
}

impl CodeSpec {
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn family(&self) -> Family {
        self.family
    }
    /// Number of physical qubits, `4^r`.
    pub fn n(&self) -> usize {
        lattice::num_qubits(self.level)
    }
    pub fn num_logicals(&self) -> usize {
        self.z_logicals.len()
    }
    pub fn num_stabilizers(&self) -> usize {
        self.z_stabilizers.len()
    }
    pub fn x_checks(&self) -> &[BitVec] {
        &self.x_checks
    }
    pub fn z_checks(&self) -> &[BitVec] {
        &self.z_checks
    }
    pub fn z_stabilizers(&self) -> &[BitVec] {
        &self.z_stabilizers
    }
    pub fn x_stabilizers(&self) -> &[BitVec] {
        &self.x_stabilizers
    }
    /// Axis along which each stabilizer generator extends over all four sites.
    pub fn stabilizer_axes(&self) -> &[usize] {
        &self.stabilizer_axes
    }
    pub fn x_logicals(&self) -> &[BitVec] {
        &self.x_logicals
    }
    pub fn z_logicals(&self) -> &[BitVec] {
        &self.z_logicals
    }
    pub fn x_gauge(&self) -> &[BitVec] {
        &self.x_gauge
    }
    pub fn z_gauge(&self) -> &[BitVec] {
        &self.z_gauge
    }
    pub fn pure_errors(&self) -> &[BitVec] {
        &self.pure_errors
    }

    pub fn z_stabilizer_matrix(&self) -> BitMatrix {
        BitMatrix::new(self.n(), self.z_stabilizers.clone()).expect("stabilizer rows have length n")
    }

    /// Indices of the checks whose product is Z stabilizer `index`.
    pub fn compose_stabilizer_from_checks(&self, index: usize) -> Result<Vec<usize>> {
        if self.family != Family::Subsystem {
            return Err(Error::Usage(
                "stabilizer composition applies to the subsystem family".into(),
            ));
        }
        let stab = self.z_stabilizers.get(index).ok_or_else(|| {
            Error::Usage(format!("stabilizer index {index} out of range"))
        })?;
        let inside: Vec<usize> = (0..self.z_checks.len())
            .filter(|&i| self.z_checks[i].is_subset_of(stab))
            .collect();
        let rows: Vec<BitVec> = inside.iter().map(|&i| self.z_checks[i].clone()).collect();
        let coeffs = BitMatrix::new(self.n(), rows)?
            .express_in_rows(stab)?
            .ok_or_else(|| {
                Error::Consistency(format!("stabilizer {index} is not a product of checks"))
            })?;
        Ok(coeffs.iter_ones().map(|c| inside[c]).collect())
    }

    pub fn ancilla_report(&self) -> AncillaReport {
        let per_direction = 2 * 4usize.pow(self.level as u32 - 1);
        let n = self.n();
        AncillaReport {
            ancillas_per_direction: per_direction,
            total_with_reuse: per_direction,
            total_without_reuse: per_direction * self.level,
            overhead_ratio: (n + per_direction) as f64 / n as f64,
        }
    }

    /// Minimum weight of an X error that commutes with every Z check but acts
    /// nontrivially on the logical qubits, by enumerating all `2^n` patterns.
    pub fn distance_by_enumeration(&self) -> Result<usize> {
        let n = self.n();
        if n > 20 {
            return Err(Error::Capacity(format!(
                "exhaustive distance search needs n <= 20, code has n = {n}"
            )));
        }
        let checks: Vec<u64> = self.z_checks.iter().map(BitVec::to_u64).collect();
        let logicals: Vec<u64> = self.z_logicals.iter().map(BitVec::to_u64).collect();
        let parity = |a: u64, b: u64| (a & b).count_ones() & 1 == 1;
        (1u64..1 << n)
            .filter(|&e| checks.iter().all(|&c| !parity(e, c)))
            .filter(|&e| logicals.iter().any(|&l| parity(e, l)))
            .map(|e| e.count_ones() as usize)
            .min()
            .ok_or_else(|| Error::Consistency("no nontrivial logical found".into()))
    }

    pub fn summary(&self, with_distance: bool) -> Result<CodeSummary> {
        let check_rank = BitMatrix::new(self.n(), self.x_checks.clone())?.rank()
            + BitMatrix::new(self.n(), self.z_checks.clone())?.rank();
        let mut check_weights: Vec<usize> =
            self.x_checks.iter().chain(&self.z_checks).map(BitVec::weight).collect();
        check_weights.sort_unstable();
        check_weights.dedup();
        let mut stabilizer_weights: Vec<usize> = self
            .x_stabilizers
            .iter()
            .chain(&self.z_stabilizers)
            .map(BitVec::weight)
            .collect();
        stabilizer_weights.sort_unstable();
        stabilizer_weights.dedup();
        let distance = if with_distance && self.n() <= 20 {
            Some(self.distance_by_enumeration()?)
        } else {
            None
        };
        Ok(CodeSummary {
            level: self.level,
            family: self.family,
            n: self.n(),
            k: self.num_logicals(),
            g: self.x_gauge.len(),
            stabilizers: self.x_stabilizers.len() + self.z_stabilizers.len(),
            checks: self.x_checks.len() + self.z_checks.len(),
            independent_checks: check_rank,
            check_weights,
            stabilizer_weights,
            logical_weight: self.z_logicals.first().map_or(0, BitVec::weight),
            distance,
        })
    }

    /// Checks every structural property of the code, failing with a message
    /// naming the first violated property.
    pub fn validate(&self) -> Result<()> {
        let r = self.level;
        let n = self.n();
        let fail = |what: String| Err(Error::Invariant(what));
        let all_ops = self
            .x_checks
            .iter()
            .chain(&self.z_checks)
            .chain(&self.x_stabilizers)
            .chain(&self.z_stabilizers)
            .chain(&self.x_logicals)
            .chain(&self.z_logicals)
            .chain(&self.x_gauge)
            .chain(&self.z_gauge)
            .chain(&self.pure_errors);
        if all_ops.clone().any(|v| v.len() != n) {
            return fail(format!("every operator support has length n = {n}"));
        }

        let k = counts::logical_qubits(r);
        if self.x_logicals.len() != k || self.z_logicals.len() != k {
            return fail(format!("#logicals == 2^r = {k}"));
        }
        if let Some(l) = self.x_logicals.iter().chain(&self.z_logicals).find(|l| l.weight() != k) {
            return fail(format!("logical weight == 2^r = {k}, found {}", l.weight()));
        }
        for (j, xl) in self.x_logicals.iter().enumerate() {
            for (m, zl) in self.z_logicals.iter().enumerate() {
                if xl.dot(zl) != (j == m) {
                    return fail(format!("X_L[{j}] anticommutes with Z_L[{m}] iff j == m"));
                }
            }
        }

        let (expect_stab, expect_checks) = match self.family {
            Family::Subsystem => (counts::stabilizers_per_type(r), counts::checks_per_type(r)),
            Family::Original => {
                let s = counts::original_stabilizers(r) / 2;
                (s, s)
            }
        };
        if self.z_stabilizers.len() != expect_stab || self.x_stabilizers.len() != expect_stab {
            return fail(format!("#stabilizers per type == {expect_stab}"));
        }
        for (name, set) in [("Z", &self.z_stabilizers), ("X", &self.x_stabilizers)] {
            if BitMatrix::new(n, set.clone())?.rank() != set.len() {
                return fail(format!("{name} stabilizer generators are independent"));
            }
        }
        if self.x_checks.len() != expect_checks || self.z_checks.len() != expect_checks {
            return fail(format!("#checks per type == {expect_checks}"));
        }

        // Stabilizers commute with all checks, logicals and gauge generators
        // of the opposite type.
        let x_side: Vec<&BitVec> = self
            .x_checks
            .iter()
            .chain(&self.x_stabilizers)
            .chain(&self.x_logicals)
            .chain(&self.x_gauge)
            .collect();
        let z_side: Vec<&BitVec> = self
            .z_checks
            .iter()
            .chain(&self.z_stabilizers)
            .chain(&self.z_logicals)
            .chain(&self.z_gauge)
            .collect();
        for s in &self.z_stabilizers {
            if x_side.iter().any(|x| x.dot(s)) {
                return fail("Z stabilizers commute with every X-type operator".into());
            }
        }
        for s in &self.x_stabilizers {
            if z_side.iter().any(|z| s.dot(z)) {
                return fail("X stabilizers commute with every Z-type operator".into());
            }
        }

        // Pure errors flip exactly their own stabilizer.
        if self.pure_errors.len() != self.z_stabilizers.len() {
            return fail("one pure error per Z stabilizer".into());
        }
        for (i, t) in self.pure_errors.iter().enumerate() {
            for (j, s) in self.z_stabilizers.iter().enumerate() {
                if t.dot(s) != (i == j) {
                    return fail(format!("pure error {i} flips stabilizer {j} iff i == j"));
                }
            }
            if self.z_logicals.iter().chain(&self.z_gauge).any(|z| t.dot(z)) {
                return fail(format!("pure error {i} commutes with Z logicals and Z gauge"));
            }
        }

        match self.family {
            Family::Subsystem => self.validate_subsystem(),
            Family::Original => Ok(()),
        }
    }

    fn validate_subsystem(&self) -> Result<()> {
        let r = self.level;
        let n = self.n();
        let fail = |what: String| Err(Error::Invariant(what));

        if let Some(c) = self.x_checks.iter().chain(&self.z_checks).find(|c| c.weight() != 4) {
            return fail(format!("every check has weight 4, found {}", c.weight()));
        }
        let check_rank = 4usize.pow(r as u32) - 3usize.pow(r as u32);
        for (name, set) in [("X", &self.x_checks), ("Z", &self.z_checks)] {
            if BitMatrix::new(n, set.clone())?.rank() != check_rank {
                return fail(format!("{name} checks have rank 4^r - 3^r = {check_rank}"));
            }
        }
        let stab_weight = 1usize << (r + 1);
        if let Some(s) = self
            .z_stabilizers
            .iter()
            .chain(&self.x_stabilizers)
            .find(|s| s.weight() != stab_weight)
        {
            return fail(format!("stabilizer weight == 2^(r+1) = {stab_weight}, found {}", s.weight()));
        }
        for (z, x) in self.z_stabilizers.iter().zip(&self.x_stabilizers) {
            if z != x {
                return fail("X and Z stabilizers of equal index share a support".into());
            }
        }

        // Stabilizers lie in the check span; logicals commute with all checks.
        let mut check_span = SpanBasis::new(n);
        for c in &self.z_checks {
            check_span.insert(c);
        }
        if !self.z_stabilizers.iter().all(|s| check_span.contains(s)) {
            return fail("stabilizers are products of checks".into());
        }
        for l in self.x_logicals.iter().chain(&self.z_logicals) {
            if self.z_checks.iter().any(|c| c.dot(l)) || check_span.contains(l) {
                return fail("logicals commute with all checks and lie outside the check group".into());
            }
        }
        let half = 1usize << (r - 1);
        for i in 0..self.z_stabilizers.len() {
            let parts = self.compose_stabilizer_from_checks(i)?;
            let mut acc = BitVec::zeros(n);
            for &c in &parts {
                acc.xor_assign(&self.z_checks[c]);
            }
            if parts.len() != half || acc != self.z_stabilizers[i] {
                return fail(format!("stabilizer {i} is the product of 2^(r-1) = {half} checks"));
            }
        }

        // Gauge pairs: counted, paired, inside the boundary, away from logicals,
        // and together with the stabilizers they generate the check group.
        let g = counts::gauge_qubits(r);
        if self.x_gauge.len() != g || self.z_gauge.len() != g {
            return fail(format!("#gauge qubits == 4^r + 2^r - 2*3^r = {g}"));
        }
        for (i, xg) in self.x_gauge.iter().enumerate() {
            for (j, zg) in self.z_gauge.iter().enumerate() {
                if xg.dot(zg) != (i == j) {
                    return fail(format!("X gauge {i} anticommutes with Z gauge {j} iff i == j"));
                }
            }
        }
        let boundary = lattice::boundary_mask(r);
        let logical_support = self
            .x_logicals
            .iter()
            .chain(&self.z_logicals)
            .fold(BitVec::zeros(n), |mut acc, l| {
                for q in l.iter_ones() {
                    acc.set(q, true);
                }
                acc
            });
        for gop in self.x_gauge.iter().chain(&self.z_gauge) {
            if !gop.is_subset_of(&boundary) {
                return fail("gauge generators lie within the hyperplanes x_n = 4".into());
            }
            if gop.overlap(&logical_support) != 0 {
                return fail("gauge generators are disjoint from logical supports".into());
            }
            if !check_span.contains(gop) {
                return fail("gauge generators lie in the check group".into());
            }
        }
        let mut generated = SpanBasis::new(n);
        for v in self.z_stabilizers.iter().chain(&self.z_gauge) {
            generated.insert(v);
        }
        if generated.dim() != check_rank {
            return fail("stabilizers and gauge generators span the check group".into());
        }
        Ok(())
    }
}
