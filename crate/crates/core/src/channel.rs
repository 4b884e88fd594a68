//! I.i.d. bit-flip channel, syndrome extraction and ground-truth labels.
//!
//! Every shot draws from its own ChaCha8 stream selected by the shot index,
//! so any partition of a shot range over workers reproduces the same errors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    /// Per-qubit flip probability.
    pub p: f64,
    pub seed: u64,
    pub shots: u64,
}

impl NoiseParams {
    pub fn new(p: f64, seed: u64, shots: u64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::Usage(format!("flip probability must lie in [0, 0.5], got {p}")));
        }
        Ok(Self { p, seed, shots })
    }
}

/// Draws X-error patterns on `n` qubits.
#[derive(Clone, Debug)]
pub struct ErrorSampler {
    n: usize,
    prototype: ChaCha8Rng,
    gaps: Option<Geometric>,
}

impl ErrorSampler {
    pub fn new(n: usize, p: f64, seed: u64) -> Result<Self> {
        NoiseParams::new(p, seed, 0)?;
        let gaps = if p > 0.0 {
            Some(Geometric::new(p).map_err(|e| Error::Usage(e.to_string()))?)
        } else {
            None
        };
        Ok(Self {
            n,
            prototype: ChaCha8Rng::seed_from_u64(seed),
            gaps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Overwrites `out` with the error of shot `shot`.
    ///
    /// Flipped positions are found by geometric gaps between successive flips,
    /// which costs O(weight) draws instead of O(n).
    pub fn sample_into(&self, shot: u64, out: &mut BitVec) {
        debug_assert_eq!(out.len(), self.n);
        out.clear();
        let Some(gaps) = &self.gaps else { return };
        let mut rng = self.prototype.clone();
        rng.set_stream(shot);
        let mut pos = 0u64;
        loop {
            pos += gaps.sample(&mut rng);
            if pos >= self.n as u64 {
                break;
            }
            out.set(pos as usize, true);
            pos += 1;
        }
    }

    pub fn sample(&self, shot: u64) -> BitVec {
        let mut e = BitVec::zeros(self.n);
        self.sample_into(shot, &mut e);
        e
    }
}

/// The error stream for shots `0..params.shots`.
pub fn sample_error(params: NoiseParams, n: usize) -> Result<impl Iterator<Item = BitVec>> {
    let sampler = ErrorSampler::new(n, params.p, params.seed)?;
    Ok((0..params.shots).map(move |s| sampler.sample(s)))
}

fn check_len(code: &CodeSpec, error: &BitVec) -> Result<()> {
    if error.len() != code.n() {
        return Err(Error::Usage(format!(
            "error pattern has length {}, code has {} qubits",
            error.len(),
            code.n()
        )));
    }
    Ok(())
}

/// Bit `i` is the overlap parity of the error with Z stabilizer `i`.
pub fn extract_syndrome(code: &CodeSpec, error: &BitVec) -> Result<BitVec> {
    check_len(code, error)?;
    Ok(syndrome_of(code, error))
}

pub(crate) fn syndrome_of(code: &CodeSpec, error: &BitVec) -> BitVec {
    let stabs = code.z_stabilizers();
    let mut s = BitVec::zeros(stabs.len());
    for (i, z) in stabs.iter().enumerate() {
        if error.dot(z) {
            s.set(i, true);
        }
    }
    s
}

/// X-logical coset of `E·T(s)`, where `T(s)` composes the pure errors of the
/// set syndrome bits.
pub fn logical_label(code: &CodeSpec, error: &BitVec) -> Result<BitVec> {
    check_len(code, error)?;
    let syndrome = syndrome_of(code, error);
    Ok(LabelExtractor::new(code).label(error, &syndrome))
}

/// Precomputed label extraction: pure-error overlaps with the Z logicals are
/// folded into one mask per syndrome bit.
#[derive(Clone, Debug)]
pub struct LabelExtractor {
    z_logicals: Vec<BitVec>,
    pure_error_flips: Vec<BitVec>,
}

impl LabelExtractor {
    pub fn new(code: &CodeSpec) -> Self {
        let z_logicals = code.z_logicals().to_vec();
        let pure_error_flips = code
            .pure_errors()
            .iter()
            .map(|t| {
                BitVec::from_bools(&z_logicals.iter().map(|z| t.dot(z)).collect::<Vec<_>>())
            })
            .collect();
        Self {
            z_logicals,
            pure_error_flips,
        }
    }

    pub fn label(&self, error: &BitVec, syndrome: &BitVec) -> BitVec {
        let mut label = BitVec::zeros(self.z_logicals.len());
        for (j, z) in self.z_logicals.iter().enumerate() {
            if error.dot(z) {
                label.set(j, true);
            }
        }
        for i in syndrome.iter_ones() {
            label.xor_assign(&self.pure_error_flips[i]);
        }
        label
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSample {
    pub error: BitVec,
    pub syndrome: BitVec,
    pub label: BitVec,
}

/// Sampler that yields `(error, syndrome, label)` for any shot index.
#[derive(Clone, Debug)]
pub struct Channel<'a> {
    code: &'a CodeSpec,
    sampler: ErrorSampler,
    labels: LabelExtractor,
}

impl<'a> Channel<'a> {
    pub fn new(code: &'a CodeSpec, p: f64, seed: u64) -> Result<Self> {
        Ok(Self {
            code,
            sampler: ErrorSampler::new(code.n(), p, seed)?,
            labels: LabelExtractor::new(code),
        })
    }

    pub fn code(&self) -> &CodeSpec {
        self.code
    }

    pub fn sample(&self, shot: u64) -> LabeledSample {
        let error = self.sampler.sample(shot);
        self.label_error(error)
    }

    pub fn label_error(&self, error: BitVec) -> LabeledSample {
        let syndrome = syndrome_of(self.code, &error);
        let label = self.labels.label(&error, &syndrome);
        LabeledSample {
            error,
            syndrome,
            label,
        }
    }
}

/// Checks the syndrome and label laws on `trials` uniformly random errors:
/// syndromes are linear, labels ignore stabilizer and gauge elements, and
/// each X logical toggles exactly its own label bit.
pub fn check_invariants(code: &CodeSpec, trials: u64, seed: u64) -> Result<()> {
    let fail = |what: &str| Err(Error::Invariant(what.to_string()));
    let sampler = ErrorSampler::new(code.n(), 0.5, seed)?;
    let channel = Channel::new(code, 0.5, seed)?;
    let trivial: Vec<&BitVec> = code.x_stabilizers().iter().chain(code.x_gauge()).collect();
    for op in &trivial {
        if !syndrome_of(code, op).is_zero() {
            return fail("X stabilizer and gauge elements have zero syndrome");
        }
    }
    for (j, xl) in code.x_logicals().iter().enumerate() {
        if !syndrome_of(code, xl).is_zero() {
            return fail("X logicals have zero syndrome");
        }
        let e = channel.labels.label(xl, &BitVec::zeros(code.num_stabilizers()));
        if e != BitVec::from_indices(code.num_logicals(), [j]) {
            return fail("label of X_L[j] is the unit vector e_j");
        }
    }
    for t in 0..trials {
        let a = channel.label_error(sampler.sample(2 * t));
        let b = channel.label_error(sampler.sample(2 * t + 1));
        if syndrome_of(code, &a.error.xor(&b.error)) != a.syndrome.xor(&b.syndrome) {
            return fail("syndrome is linear in the error");
        }
        // A random product of stabilizer and gauge generators, picked by the
        // bits of the second error.
        let mut s = BitVec::zeros(code.n());
        for (i, op) in trivial.iter().enumerate() {
            if b.error.get(i % code.n()) ^ (i >= code.n()) {
                s.xor_assign(op);
            }
        }
        let shifted = channel.label_error(a.error.xor(&s));
        if shifted.syndrome != a.syndrome || shifted.label != a.label {
            return fail("label is invariant under stabilizer and gauge elements");
        }
        for (j, xl) in code.x_logicals().iter().enumerate() {
            let moved = channel.label_error(a.error.xor(xl));
            let mut expect = a.label.clone();
            expect.flip(j);
            if moved.label != expect {
                return fail("multiplying by X_L[j] toggles label bit j only");
            }
        }
    }
    Ok(())
}
