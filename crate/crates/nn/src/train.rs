//! Batch training with Adam, seeded shuffling and early stopping on the
//! validation loss. Given the same seed, data and options, training is
//! bit-reproducible: the parameter trajectory and the recorded history are
//! identical across runs.

use romkit_core::rng::Rng;

use crate::error::{NnError, Result};
use crate::feature::Feature;
use crate::loss::loss_and_grad;
use crate::network::Network;
use crate::windows::{RollingWindowDataset, Split, Window};

/// Optimiser and schedule settings.
#[derive(Clone, Debug)]
pub struct TrainOptions {
    pub learning_rate: f64,
    /// Windows per gradient step.
    pub batch: usize,
    /// Maximum epochs.
    pub epochs: usize,
    /// Early stopping: epochs without validation improvement before halting.
    pub patience: usize,
    /// Contiguous train/val/test fractions of the snapshot axis.
    pub split: Split,
}

impl TrainOptions {
    pub fn new(learning_rate: f64, batch: usize, epochs: usize, split: Split) -> Self {
        TrainOptions {
            learning_rate,
            batch,
            epochs,
            patience: 20,
            split,
        }
    }
}

/// Per-epoch record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochStats {
    pub train_loss: f64,
    pub val_loss: f64,
}

/// A trained network carrying its provenance.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    /// Network holding the best-epoch weights.
    pub network: Network,
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
}

impl TrainedModel {
    pub fn predict(&self, input: &Feature) -> Result<Feature> {
        self.network.forward(input)
    }
}

fn mean_loss(net: &Network, windows: &[Window]) -> Result<f64> {
    let loss = net.spec().loss;
    let mut total = 0.0;
    for w in windows {
        let pred = net.forward(&w.input)?;
        let (v, _) = loss_and_grad(loss, &pred, &w.target);
        total += v;
    }
    Ok(total / windows.len() as f64)
}

/// Adam state: first/second moment estimates plus the step counter.
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(len: usize, lr: f64) -> Self {
        Adam {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            lr,
        }
    }

    fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let b1t = 1.0 - Self::BETA1.powi(self.t as i32);
        let b2t = 1.0 - Self::BETA2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = Self::BETA1 * self.m[i] + (1.0 - Self::BETA1) * g;
            self.v[i] = Self::BETA2 * self.v[i] + (1.0 - Self::BETA2) * g * g;
            let mhat = self.m[i] / b1t;
            let vhat = self.v[i] / b2t;
            params[i] -= self.lr * mhat / (vhat.sqrt() + Self::EPS);
        }
    }
}

/// Train a freshly built network on the dataset's train block, early-stopping
/// on the validation block, and return the weights of the best epoch.
pub fn train(
    mut network: Network,
    data: &RollingWindowDataset,
    opts: &TrainOptions,
) -> Result<TrainedModel> {
    if data.train.is_empty() || data.val.is_empty() {
        return Err(NnError::InvalidOptions(
            "training needs non-empty train and validation blocks".into(),
        ));
    }
    if opts.batch == 0 || opts.batch > data.train.len() {
        return Err(NnError::InvalidOptions(format!(
            "batch size {} must be in [1, {}]",
            opts.batch,
            data.train.len()
        )));
    }
    if opts.epochs == 0 {
        return Err(NnError::InvalidOptions("epoch count must be >= 1".into()));
    }
    if !(opts.learning_rate > 0.0) {
        return Err(NnError::InvalidOptions("learning rate must be positive".into()));
    }
    let loss = network.spec().loss;
    // Separate stream from the one that initialised the weights.
    let mut rng = Rng::seed_from(network.spec().seed.wrapping_add(0x9E37_79B9_7F4A_7C15));

    let n_params = network.params().len();
    let mut adam = Adam::new(n_params, opts.learning_rate);
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    let mut grads = vec![0.0; n_params];

    let mut history: Vec<EpochStats> = Vec::with_capacity(opts.epochs);
    let mut best_params = network.params().to_vec();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut stale = 0usize;

    for epoch in 0..opts.epochs {
        rng.shuffle(&mut order);
        for chunk in order.chunks(opts.batch) {
            grads.iter_mut().for_each(|g| *g = 0.0);
            for &wi in chunk {
                let w = &data.train[wi];
                let (pred, caches) = network.forward_cached(&w.input)?;
                let (_, dloss) = loss_and_grad(loss, &pred, &w.target);
                let grad_out = Feature::row_vector(dloss);
                network.backward(&caches, &grad_out, &mut grads);
            }
            let scale = 1.0 / chunk.len() as f64;
            grads.iter_mut().for_each(|g| *g *= scale);
            adam.step(network.params_mut(), &grads);
        }

        let train_loss = mean_loss(&network, &data.train)?;
        let val_loss = mean_loss(&network, &data.val)?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            let last_finite = if history.is_empty() {
                None
            } else {
                Some(history.len() - 1)
            };
            return Err(NnError::NanLoss {
                epoch,
                last_finite,
            });
        }
        history.push(EpochStats {
            train_loss,
            val_loss,
        });

        if val_loss < best_val {
            best_val = val_loss;
            best_epoch = epoch;
            best_params.copy_from_slice(network.params());
            stale = 0;
        } else {
            stale += 1;
            if stale > opts.patience {
                break;
            }
        }
    }

    network.set_params(&best_params)?;
    Ok(TrainedModel {
        network,
        history,
        best_epoch,
    })
}
