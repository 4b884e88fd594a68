use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smhc::nn::MlpSpec;

pub const GRAD_STEP: f64 = 1e-5;
pub const GRAD_RTOL: f64 = 1e-4;

/// Random 0/1 inputs and targets.
pub fn random_batch(rows: usize, inputs: usize, outputs: usize, seed: u64) -> (Array2<f64>, Array2<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_simple_fn((rows, inputs), || rng.random_bool(0.3) as u8 as f64);
    let y = Array2::from_shape_simple_fn((rows, outputs), || rng.random_bool(0.4) as u8 as f64);
    (x, y)
}

/// Copy of `net` with small random biases, so no pre-activation sits exactly
/// on the rectifier kink (zero biases and an all-zero input row put every
/// hidden unit there).
pub fn with_random_biases(net: &MlpSpec, seed: u64) -> MlpSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = net.layers().to_vec();
    for l in &mut layers {
        l.bias.mapv_inplace(|_| rng.random_range(-0.1..0.1));
    }
    MlpSpec::from_layers(net.level(), layers).unwrap()
}

/// Largest relative error between backpropagated and central-difference
/// gradients over `per_layer` random weights and one bias of every layer.
pub fn worst_gradient_error(net: &MlpSpec, x: &Array2<f64>, y: &Array2<f64>, per_layer: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, grads) = net.gradients(x.view(), y.view());
    let mut worst: f64 = 0.0;
    let mut compare = |analytic: f64, plus: &MlpSpec, minus: &MlpSpec| {
        let numeric = (plus.loss(x.view(), y.view()) - minus.loss(x.view(), y.view())) / (2.0 * GRAD_STEP);
        let scale = analytic.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((analytic - numeric).abs() / scale);
    };
    for (li, layer) in net.layers().iter().enumerate() {
        let (rows, cols) = layer.weights.dim();
        for _ in 0..per_layer {
            let (i, j) = (rng.random_range(0..rows), rng.random_range(0..cols));
            let shifted = |d: f64| {
                let mut layers = net.layers().to_vec();
                layers[li].weights[[i, j]] += d;
                MlpSpec::from_layers(net.level(), layers).unwrap()
            };
            compare(grads[li].0[[i, j]], &shifted(GRAD_STEP), &shifted(-GRAD_STEP));
        }
        let j = rng.random_range(0..cols);
        let shifted = |d: f64| {
            let mut layers = net.layers().to_vec();
            layers[li].bias[j] += d;
            MlpSpec::from_layers(net.level(), layers).unwrap()
        };
        compare(grads[li].1[j], &shifted(GRAD_STEP), &shifted(-GRAD_STEP));
    }
    worst
}
