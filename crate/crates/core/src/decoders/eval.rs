//! Monte Carlo estimation of logical error rates.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ErrorSampler;
use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::BitVec;

use super::Decoder;

pub const WILSON_Z95: f64 = 1.959963984540054;

/// Shots per work item. Results do not depend on it or on the worker count.
const CHUNK: u64 = 1 << 13;

/// Wilson score interval for `errors` successes out of `shots` trials.
pub fn wilson_interval(errors: u64, shots: u64, z: f64) -> (f64, f64) {
    if shots == 0 {
        return (0.0, 1.0);
    }
    let n = shots as f64;
    let phat = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == shots { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub shots: u64,
    pub errors: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EvalResult {
    pub fn from_counts(errors: u64, shots: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, shots, WILSON_Z95);
        Self {
            shots,
            errors,
            rate: if shots == 0 { 0.0 } else { errors as f64 / shots as f64 },
            ci_low,
            ci_high,
        }
    }
}

/// Syndrome and label of an error as sums of per-qubit columns, which costs
/// O(weight) instead of O(stabilizers × n).
struct Columns {
    syndrome: Vec<BitVec>,
    label: Vec<BitVec>,
    flips: Vec<BitVec>,
    m: usize,
    k: usize,
}

impl Columns {
    fn new(code: &CodeSpec) -> Self {
        let column = |rows: &[BitVec], q: usize| {
            BitVec::from_bools(&rows.iter().map(|r| r.get(q)).collect::<Vec<_>>())
        };
        let n = code.n();
        let flips = code
            .pure_errors()
            .iter()
            .map(|t| {
                BitVec::from_bools(&code.z_logicals().iter().map(|z| t.dot(z)).collect::<Vec<_>>())
            })
            .collect();
        Self {
            syndrome: (0..n).map(|q| column(code.z_stabilizers(), q)).collect(),
            label: (0..n).map(|q| column(code.z_logicals(), q)).collect(),
            flips,
            m: code.num_stabilizers(),
            k: code.num_logicals(),
        }
    }

    fn apply(&self, error: &BitVec, syndrome: &mut BitVec, label: &mut BitVec) {
        syndrome.clear();
        label.clear();
        for q in error.iter_ones() {
            syndrome.xor_assign(&self.syndrome[q]);
            label.xor_assign(&self.label[q]);
        }
        for i in syndrome.iter_ones() {
            label.xor_assign(&self.flips[i]);
        }
    }
}

/// Runs shots `0..shots` of the bit-flip channel and counts those for which
/// `fails(error, syndrome, label)` holds.
pub fn monte_carlo<F>(code: &CodeSpec, p: f64, shots: u64, seed: u64, fails: F) -> Result<EvalResult>
where
    F: Fn(&BitVec, &BitVec, &BitVec) -> bool + Sync,
{
    let sampler = ErrorSampler::new(code.n(), p, seed)?;
    let cols = Columns::new(code);
    let chunks = shots.div_ceil(CHUNK);
    let errors: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut e = BitVec::zeros(code.n());
            let mut s = BitVec::zeros(cols.m);
            let mut l = BitVec::zeros(cols.k);
            let mut count = 0u64;
            for shot in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                sampler.sample_into(shot, &mut e);
                cols.apply(&e, &mut s, &mut l);
                count += fails(&e, &s, &l) as u64;
            }
            count
        })
        .sum();
    Ok(EvalResult::from_counts(errors, shots))
}

/// Logical error rate of `decoder`: a shot fails when any label bit differs
/// from the ground truth.
pub fn evaluate_decoder<D: Decoder + ?Sized>(
    decoder: &D,
    code: &CodeSpec,
    p: f64,
    shots: u64,
    seed: u64,
) -> Result<EvalResult> {
    if shots == 0 {
        return Err(Error::Usage("shots must be at least 1".into()));
    }
    monte_carlo(code, p, shots, seed, |_, s, l| decoder.decode(s).label != *l)
}

/// Monte Carlo counterpart of the bounded-distance rate: a shot fails exactly
/// when its weight reaches `2^{r−1}`.
pub fn evaluate_bd_genie(code: &CodeSpec, p: f64, shots: u64, seed: u64) -> Result<EvalResult> {
    let t = 1usize << (code.level() - 1);
    monte_carlo(code, p, shots, seed, |e, _, _| e.weight() >= t)
}
