use ndarray::Array2;

use crate::channel::Channel;
use crate::code::{CodeSpec, Family};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// Syndrome/label pairs, bit-packed row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    syndrome_bits: usize,
    label_bits: usize,
    syndromes: Vec<u64>,
    labels: Vec<u64>,
}

impl Dataset {
    pub fn new(syndrome_bits: usize, label_bits: usize) -> Self {
        Self {
            syndrome_bits,
            label_bits,
            syndromes: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn syndrome_words(&self) -> usize {
        self.syndrome_bits.div_ceil(64).max(1)
    }

    fn label_words(&self) -> usize {
        self.label_bits.div_ceil(64).max(1)
    }

    pub fn push(&mut self, syndrome: &BitVec, label: &BitVec) -> Result<()> {
        if syndrome.len() != self.syndrome_bits || label.len() != self.label_bits {
            return Err(Error::Usage(format!(
                "sample has {}/{} bits, dataset expects {}/{}",
                syndrome.len(),
                label.len(),
                self.syndrome_bits,
                self.label_bits
            )));
        }
        fn pad(w: &[u64], n: usize) -> impl Iterator<Item = u64> + '_ {
            (0..n).map(move |i| w.get(i).copied().unwrap_or(0))
        }
        let (sw, lw) = (self.syndrome_words(), self.label_words());
        self.syndromes.extend(pad(syndrome.words(), sw));
        self.labels.extend(pad(label.words(), lw));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.syndromes.len() / self.syndrome_words()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn syndrome_bits(&self) -> usize {
        self.syndrome_bits
    }

    pub fn label_bits(&self) -> usize {
        self.label_bits
    }

    fn bit(words: &[u64], stride: usize, row: usize, j: usize) -> bool {
        words[row * stride + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn syndrome(&self, i: usize) -> BitVec {
        let w = self.syndrome_words();
        BitVec::from_bools(
            &(0..self.syndrome_bits)
                .map(|j| Self::bit(&self.syndromes, w, i, j))
                .collect::<Vec<_>>(),
        )
    }

    pub fn label(&self, i: usize) -> BitVec {
        let w = self.label_words();
        BitVec::from_bools(
            &(0..self.label_bits)
                .map(|j| Self::bit(&self.labels, w, i, j))
                .collect::<Vec<_>>(),
        )
    }

    /// Network inputs and targets for the given rows, as 0/1 matrices.
    pub fn batch(&self, rows: &[usize]) -> (Array2<f64>, Array2<f64>) {
        let (sw, lw) = (self.syndrome_words(), self.label_words());
        let x = Array2::from_shape_fn((rows.len(), self.syndrome_bits), |(i, j)| {
            Self::bit(&self.syndromes, sw, rows[i], j) as u8 as f64
        });
        let y = Array2::from_shape_fn((rows.len(), self.label_bits), |(i, j)| {
            Self::bit(&self.labels, lw, rows[i], j) as u8 as f64
        });
        (x, y)
    }

    /// Fraction of samples with each syndrome bit set.
    pub fn syndrome_marginals(&self) -> Vec<f64> {
        let w = self.syndrome_words();
        let n = self.len().max(1) as f64;
        (0..self.syndrome_bits)
            .map(|j| {
                (0..self.len())
                    .filter(|&i| Self::bit(&self.syndromes, w, i, j))
                    .count() as f64
                    / n
            })
            .collect()
    }
}

/// Samples `(syndrome, label)` pairs from the bit-flip channel; shot `i` of
/// the seeded stream becomes row `i`.
pub fn generate_dataset(code: &CodeSpec, p: f64, num_samples: usize, seed: u64) -> Result<Dataset> {
    if code.family() != Family::Subsystem {
        return Err(Error::Usage("training data is generated for the subsystem family".into()));
    }
    let channel = Channel::new(code, p, seed)?;
    let mut data = Dataset::new(code.num_stabilizers(), code.num_logicals());
    data.syndromes.reserve(num_samples * data.syndrome_words());
    data.labels.reserve(num_samples * data.label_words());
    for shot in 0..num_samples as u64 {
        let s = channel.sample(shot);
        data.push(&s.syndrome, &s.label)?;
    }
    Ok(data)
}
