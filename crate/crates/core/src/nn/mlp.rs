use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::counts;
use crate::decoders::{DecodeResult, Decoder};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// Affine map `x·W + b` with `W` of shape `(inputs, outputs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Rectifier hidden layers, logistic output.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpSpec {
    level: usize,
    layers: Vec<Layer>,
}

pub(crate) struct ForwardTrace {
    /// Inputs to each layer; the last entry is the output logits.
    pub activations: Vec<Array2<f64>>,
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl MlpSpec {
    pub const HIDDEN_LAYERS: usize = 3;

    /// Layer widths for level `r`: `3^r − 2^r` inputs, three hidden layers of
    /// `16·3^r` units and `2^r` outputs.
    pub fn dims_for_level(level: usize) -> Vec<usize> {
        let width = 16 * 3usize.pow(level as u32);
        let mut dims = vec![counts::stabilizers_per_type(level)];
        dims.extend([width; Self::HIDDEN_LAYERS]);
        dims.push(counts::logical_qubits(level));
        dims
    }

    /// Standard network for a level with seeded initialization.
    pub fn for_level(level: usize, seed: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::Usage("level must be at least 1".into()));
        }
        Self::new(level, &Self::dims_for_level(level), seed)
    }

    /// Uniform initialization scaled by fan-in (rectifier layers) or by fan-in
    /// plus fan-out (output layer); biases start at zero.
    pub fn new(level: usize, dims: &[usize], seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let last = dims.len().saturating_sub(2);
        Self::build(level, dims, |i, fan_in, fan_out| {
            let a = if i == last {
                (6.0 / (fan_in + fan_out) as f64).sqrt()
            } else {
                (6.0 / fan_in as f64).sqrt()
            };
            Array2::from_shape_simple_fn((fan_in, fan_out), || rng.random_range(-a..a))
        })
    }

    pub fn zeros(level: usize, dims: &[usize]) -> Result<Self> {
        Self::build(level, dims, |_, i, o| Array2::zeros((i, o)))
    }

    fn build(
        level: usize,
        dims: &[usize],
        mut weights: impl FnMut(usize, usize, usize) -> Array2<f64>,
    ) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::Usage(format!("invalid layer widths {dims:?}")));
        }
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, w)| Layer {
                weights: weights(i, w[0], w[1]),
                bias: Array1::zeros(w[1]),
            })
            .collect();
        Ok(Self { level, layers })
    }

    pub fn from_layers(level: usize, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Format("network has no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.weights.ncols() {
                return Err(Error::Format(format!("layer {i}: bias length mismatch")));
            }
            if i > 0 && layers[i - 1].weights.ncols() != l.weights.nrows() {
                return Err(Error::Format(format!("layer {i}: input width mismatch")));
            }
        }
        Ok(Self { level, layers })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.layers[0].weights.nrows()];
        d.extend(self.layers.iter().map(|l| l.weights.ncols()));
        d
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.weights.ncols())
    }

    pub fn num_parameters(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|v| v.is_finite()))
    }

    pub(crate) fn trace(&self, x: ArrayView2<f64>) -> ForwardTrace {
        let mut activations = vec![x.to_owned()];
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = activations[i].dot(&layer.weights);
            z += &layer.bias;
            if i < last {
                z.mapv_inplace(|v| v.max(0.0));
            }
            activations.push(z);
        }
        ForwardTrace { activations }
    }

    /// Output logits for a batch of inputs, one row per sample.
    pub fn logits(&self, x: ArrayView2<f64>) -> Array2<f64> {
        self.trace(x).activations.pop().expect("nonempty trace")
    }

    /// Output probabilities for a batch.
    pub fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        self.logits(x).mapv(sigmoid)
    }

    /// Mean binary cross-entropy over all samples and output bits.
    pub fn loss(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> f64 {
        let z = self.logits(x);
        let total: f64 = z
            .iter()
            .zip(y.iter())
            .map(|(&z, &t)| softplus(z) - t * z)
            .sum();
        total / z.len() as f64
    }

    /// Loss and its gradient for every layer as `(dW, db)`.
    pub fn gradients(
        &self,
        x: ArrayView2<f64>,
        y: ArrayView2<f64>,
    ) -> (f64, Vec<(Array2<f64>, Array1<f64>)>) {
        let mut trace = self.trace(x);
        let z = trace.activations.pop().expect("nonempty trace");
        let count = z.len() as f64;
        let loss = z
            .iter()
            .zip(y.iter())
            .map(|(&z, &t)| softplus(z) - t * z)
            .sum::<f64>()
            / count;
        let mut delta = z.mapv(sigmoid);
        delta -= &y;
        delta /= count;

        let mut grads = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let input = &trace.activations[i];
            let dw = input.t().dot(&delta);
            let db = delta.sum_axis(Axis(0));
            if i > 0 {
                let mut back = delta.dot(&layer.weights.t());
                back.zip_mut_with(input, |g, &a| {
                    if a <= 0.0 {
                        *g = 0.0
                    }
                });
                delta = back;
            }
            grads.push((dw, db));
        }
        grads.reverse();
        (loss, grads)
    }

    fn check_input(&self, syndrome: &BitVec) {
        assert_eq!(
            syndrome.len(),
            self.input_dim(),
            "syndrome length does not match the network input"
        );
    }

    fn result_from_row(row: impl Iterator<Item = f64>) -> DecodeResult {
        let probs: Vec<f64> = row.collect();
        DecodeResult {
            label: BitVec::from_bools(&probs.iter().map(|&q| q >= 0.5).collect::<Vec<_>>()),
            posterior: None,
            tie_broken: probs.iter().any(|&q| q == 0.5),
        }
    }

    /// Thresholds each output at 0.5; exactly 0.5 maps to 1.
    pub fn predict(&self, syndrome: &BitVec) -> DecodeResult {
        self.predict_batch(std::slice::from_ref(syndrome))
            .pop()
            .expect("one result")
    }

    pub fn predict_batch(&self, syndromes: &[BitVec]) -> Vec<DecodeResult> {
        syndromes.iter().for_each(|s| self.check_input(s));
        let x = Array2::from_shape_fn((syndromes.len(), self.input_dim()), |(i, j)| {
            syndromes[i].get(j) as u8 as f64
        });
        self.forward(x.view())
            .rows()
            .into_iter()
            .map(|row| Self::result_from_row(row.iter().copied()))
            .collect()
    }
}

impl Decoder for MlpSpec {
    fn name(&self) -> String {
        "nn".into()
    }

    fn decode(&self, syndrome: &BitVec) -> DecodeResult {
        self.predict(syndrome)
    }
}
