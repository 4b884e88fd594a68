//! Decoders mapping a syndrome to a logical label, and their Monte Carlo
//! evaluation.

mod bd;
mod blockmap;
mod compose;
mod eval;
mod exhaustive;
mod md;

use dashmap::DashMap;

use crate::gf2::BitVec;

pub use bd::{bd_log_slope, bd_logical_rate};
pub use blockmap::{joint_table, BlockMapDecoder, JointTable};
pub use eval::{
    evaluate_bd_genie, evaluate_decoder, monte_carlo, wilson_interval, EvalResult, WILSON_Z95,
};
pub use exhaustive::{exhaustive_map_table, ExhaustiveMap};
pub use md::MdDecoder;

/// Relative tolerance under which two scores count as tied.
pub const TIE_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub label: BitVec,
    /// `P(label | syndrome)` under the decoder's own model, when it has one.
    pub posterior: Option<f64>,
    pub tie_broken: bool,
}

/// A syndrome-only decoder. Implementations are pure and thread-safe.
pub trait Decoder: Send + Sync {
    fn name(&self) -> String;

    fn decode(&self, syndrome: &BitVec) -> DecodeResult;
}

/// Rank of a label under lexicographic order of its bit sequence
/// `(l_0, l_1, …)`: smaller key means lexicographically smaller.
#[inline]
pub(crate) fn lex_key(label: u64, bits: usize) -> u64 {
    if bits == 0 {
        0
    } else {
        label.reverse_bits() >> (64 - bits)
    }
}

/// Picks the highest score; scores within [`TIE_RTOL`] of the best count as
/// tied and the lexicographically smallest label among them wins.
/// Returns `(label, posterior, tie_broken)`.
pub(crate) fn argmax_lex(scores: &[f64], bits: usize) -> (u64, Option<f64>, bool) {
    let best = scores.iter().copied().fold(0.0f64, f64::max);
    let total: f64 = scores.iter().sum();
    let floor = best * (1.0 - TIE_RTOL);
    let mut tied = (0..scores.len() as u64).filter(|&l| scores[l as usize] >= floor);
    let first = tied.next().expect("at least one label");
    let mut pick = first;
    let mut count = 1;
    for l in tied {
        count += 1;
        if lex_key(l, bits) < lex_key(pick, bits) {
            pick = l;
        }
    }
    let posterior = (total > 0.0).then(|| scores[pick as usize] / total);
    (pick, posterior, count > 1)
}

/// Lowest cost wins, lexicographically smallest label among equals.
pub(crate) fn argmin_lex(costs: &[u32], bits: usize) -> (u64, bool) {
    let best = *costs.iter().min().expect("at least one label");
    let mut pick = None;
    let mut count = 0;
    for (l, _) in costs.iter().enumerate().filter(|(_, &c)| c == best) {
        count += 1;
        let l = l as u64;
        if pick.is_none_or(|p| lex_key(l, bits) < lex_key(p, bits)) {
            pick = Some(l);
        }
    }
    (pick.expect("nonempty"), count > 1)
}

/// Memoizes another decoder by syndrome. Decoding is pure, so sharing the
/// cache across threads never changes results.
pub struct CachedDecoder<D> {
    inner: D,
    cache: DashMap<BitVec, DecodeResult>,
    capacity: usize,
}

impl<D: Decoder> CachedDecoder<D> {
    pub fn new(inner: D) -> Self {
        Self::with_capacity(inner, 1 << 21)
    }

    pub fn with_capacity(inner: D, capacity: usize) -> Self {
        Self {
            inner,
            cache: DashMap::new(),
            capacity,
        }
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }
}

impl<D: Decoder> Decoder for CachedDecoder<D> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        if let Some(hit) = self.cache.get(syndrome) {
            return hit.clone();
        }
        let result = self.inner.decode(syndrome);
        if self.cache.len() < self.capacity {
            self.cache.insert(syndrome.clone(), result.clone());
        }
        result
    }
}

impl<D: Decoder + ?Sized> Decoder for &D {
    fn name(&self) -> String {
        (**self).name()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        (**self).decode(syndrome)
    }
}

impl<D: Decoder + ?Sized> Decoder for Box<D> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        (**self).decode(syndrome)
    }
}
