//! Brute-force MAP by enumerating every error pattern. Used as a reference
//! for small codes.

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::BitVec;

use super::blockmap::{label_offset, pure_error_flips};
use super::{argmax_lex, DecodeResult, Decoder};

pub const MAX_EXHAUSTIVE_QUBITS: usize = 20;

/// `P(label, syndrome)` over all `2^n` patterns, with the MAP decision for
/// every syndrome.
#[derive(Clone, Debug)]
pub struct ExhaustiveMap {
    k: usize,
    m: usize,
    /// `scores[s << k | label]`
    scores: Vec<f64>,
    decisions: Vec<DecodeResult>,
}

pub fn exhaustive_map_table(code: &CodeSpec, p: f64) -> Result<ExhaustiveMap> {
    let n = code.n();
    if n > MAX_EXHAUSTIVE_QUBITS {
        return Err(Error::Capacity(format!(
            "exhaustive MAP enumerates 2^{n} patterns; limit is {MAX_EXHAUSTIVE_QUBITS} qubits"
        )));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Usage(format!("flip probability must lie in [0, 0.5], got {p}")));
    }
    let k = code.num_logicals();
    let m = code.num_stabilizers();
    // Column q: which stabilizers and logicals a flip on qubit q toggles.
    let column = |rows: &[BitVec], q: usize| {
        rows.iter()
            .enumerate()
            .fold(0u64, |a, (i, r)| a | (r.get(q) as u64) << i)
    };
    let syn_cols: Vec<u64> = (0..n).map(|q| column(code.z_stabilizers(), q)).collect();
    let lab_cols: Vec<u64> = (0..n).map(|q| column(code.z_logicals(), q)).collect();
    let by_weight: Vec<f64> = (0..=n as i32)
        .map(|w| p.powi(w) * (1.0 - p).powi(n as i32 - w))
        .collect();

    let mut raw = vec![0.0; 1 << (m + k)];
    let (mut e, mut s, mut l) = (0u64, 0u64, 0u64);
    raw[0] += by_weight[0];
    for i in 1u64..(1 << n) {
        let q = i.trailing_zeros() as usize;
        e ^= 1 << q;
        s ^= syn_cols[q];
        l ^= lab_cols[q];
        raw[(s << k | l) as usize] += by_weight[e.count_ones() as usize];
    }

    let flips = pure_error_flips(code);
    let mut scores = vec![0.0; raw.len()];
    let mut decisions = Vec::with_capacity(1 << m);
    for s in 0u64..(1 << m) {
        let sv = BitVec::from_u64(s, m);
        let offset = label_offset(&flips, &sv);
        let base = (s << k) as usize;
        for label in 0..1usize << k {
            scores[base + label] = raw[base + (label ^ offset as usize)];
        }
        let (label, posterior, tie_broken) = argmax_lex(&scores[base..base + (1 << k)], k);
        decisions.push(DecodeResult {
            label: BitVec::from_u64(label, k),
            posterior,
            tie_broken,
        });
    }
    Ok(ExhaustiveMap {
        k,
        m,
        scores,
        decisions,
    })
}

impl ExhaustiveMap {
    pub fn score(&self, label: u64, syndrome: u64) -> f64 {
        self.scores[(syndrome << self.k | label) as usize]
    }

    pub fn decision(&self, syndrome: u64) -> &DecodeResult {
        &self.decisions[syndrome as usize]
    }

    pub fn num_syndromes(&self) -> usize {
        1 << self.m
    }
}

impl Decoder for ExhaustiveMap {
    fn name(&self) -> String {
        "exhaustive-map".into()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        self.decisions[syndrome.to_u64() as usize].clone()
    }
}
