use ndarray::{Array1, Array2, Zip};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Dataset, MlpSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Flip probability the dataset was drawn at.
    pub p_train: f64,
    pub num_samples: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Multiplies the learning rate after every epoch.
    pub lr_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            p_train: 0.04,
            num_samples: 1 << 20,
            batch_size: 256,
            epochs: 4,
            learning_rate: 1e-3,
            lr_decay: 0.5,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::Config("num_samples must be positive".into()));
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::Config("batch_size and epochs must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("invalid learning rate {}", self.learning_rate)));
        }
        if !(0.0..=0.5).contains(&self.p_train) {
            return Err(Error::Config(format!("p_train {} outside [0, 0.5]", self.p_train)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainReport {
    /// Mean training-set loss before training, then after each epoch.
    pub loss_history: Vec<f64>,
}

impl TrainReport {
    pub fn initial_loss(&self) -> f64 {
        self.loss_history[0]
    }

    pub fn final_loss(&self) -> f64 {
        *self.loss_history.last().expect("nonempty history")
    }
}

struct Adam {
    m: Vec<(Array2<f64>, Array1<f64>)>,
    v: Vec<(Array2<f64>, Array1<f64>)>,
    t: i32,
}

impl Adam {
    fn new(net: &MlpSpec) -> Self {
        let zeros = || {
            net.layers()
                .iter()
                .map(|l| (Array2::zeros(l.weights.raw_dim()), Array1::zeros(l.bias.len())))
                .collect::<Vec<_>>()
        };
        Self {
            m: zeros(),
            v: zeros(),
            t: 0,
        }
    }

    fn step(
        &mut self,
        net: &mut MlpSpec,
        grads: &[(Array2<f64>, Array1<f64>)],
        lr: f64,
        cfg: &TrainConfig,
    ) {
        self.t += 1;
        let (b1, b2) = (cfg.beta1, cfg.beta2);
        let c1 = 1.0 - b1.powi(self.t);
        let c2 = 1.0 - b2.powi(self.t);
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: &f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + cfg.eps);
        };
        for (i, layer) in net.layers_mut().iter_mut().enumerate() {
            let (gw, gb) = &grads[i];
            let (mw, mb) = &mut self.m[i];
            let (vw, vb) = &mut self.v[i];
            Zip::from(&mut layer.weights)
                .and(mw)
                .and(vw)
                .and(gw)
                .for_each(update);
            Zip::from(&mut layer.bias)
                .and(mb)
                .and(vb)
                .and(gb)
                .for_each(update);
        }
    }
}

/// Mean loss over the whole dataset, evaluated in chunks.
fn dataset_loss(net: &MlpSpec, data: &Dataset) -> f64 {
    const CHUNK: usize = 1 << 14;
    let n = data.len();
    let mut total = 0.0;
    for start in (0..n).step_by(CHUNK) {
        let rows: Vec<usize> = (start..(start + CHUNK).min(n)).collect();
        let (x, y) = data.batch(&rows);
        total += net.loss(x.view(), y.view()) * rows.len() as f64;
    }
    total / n as f64
}

/// Mini-batch Adam on mean binary cross-entropy. Sample order is reshuffled
/// every epoch from a stream seeded by `cfg.seed`.
pub fn train(net: &MlpSpec, cfg: &TrainConfig, data: &Dataset) -> Result<(MlpSpec, TrainReport)> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Config("dataset is empty".into()));
    }
    if data.syndrome_bits() != net.input_dim() || data.label_bits() != net.output_dim() {
        return Err(Error::Usage(format!(
            "dataset has {}→{} bits, network is {}→{}",
            data.syndrome_bits(),
            data.label_bits(),
            net.input_dim(),
            net.output_dim()
        )));
    }
    let mut net = net.clone();
    let mut adam = Adam::new(&net);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut lr = cfg.learning_rate;
    let mut history = vec![dataset_loss(&net, data)];
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for (b, rows) in order.chunks(cfg.batch_size).enumerate() {
            let (x, y) = data.batch(rows);
            let (loss, grads) = net.gradients(x.view(), y.view());
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "loss became {loss} at epoch {epoch}, batch {b} (learning rate {lr})"
                )));
            }
            adam.step(&mut net, &grads, lr, cfg);
        }
        let loss = dataset_loss(&net, data);
        if !loss.is_finite() || !net.is_finite() {
            return Err(Error::Training(format!(
                "parameters diverged after epoch {epoch} (loss {loss})"
            )));
        }
        history.push(loss);
        lr *= cfg.lr_decay;
    }
    Ok((net, TrainReport { loss_history: history }))
}
