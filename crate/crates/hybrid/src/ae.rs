//! Autoencoder pattern identification: train a feed-forward autoencoder on
//! the snapshots, then rank the latent units by how well each one alone
//! reconstructs the database.
//!
//! A shallow autoencoder with linear activations spans the same subspace as
//! the leading POD modes, so the rank-one case doubles as a PCA cross-check.

use nalgebra::DMatrix;
use romkit_core::metrics::rrmse_mat;
use romkit_core::tensor::SnapshotMatrix;
use romkit_nn::{
    train, Activation, Feature, LayerSpec, Loss, Network, NetworkSpec, RollingWindowDataset,
    Split, TrainOptions, TrainedModel, Window,
};

use crate::error::{HybridError, Result};

/// Autoencoder configuration.
#[derive(Clone, Debug)]
pub struct AeConfig {
    /// Latent width `M`; must stay below the training snapshot count.
    pub encoding_dim: usize,
    /// Encoder hidden widths (decoder mirrors them); empty gives the shallow
    /// encoder/decoder pair.
    pub hidden: Vec<usize>,
    /// Activation of the hidden layers; latent and output stay linear.
    pub activation: Activation,
    /// Fraction of snapshots used for training (the rest is held out).
    pub train_fraction: f64,
    pub batch: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

/// Trained autoencoder with ranked latent patterns.
#[derive(Clone, Debug)]
pub struct AeOutcome {
    pub model: TrainedModel,
    /// Latent unit indices, best single-unit reconstruction first.
    pub ranked_units: Vec<usize>,
    /// Spatial pattern of each ranked unit: decoder response to a unit
    /// latent impulse, one column per ranked unit (`J x M`).
    pub patterns: DMatrix<f64>,
    /// Single-unit reconstruction RRMSE per ranked unit.
    pub unit_rrmse: Vec<f64>,
    /// Full-latent reconstruction of every snapshot (`J x K`).
    pub reconstruction: DMatrix<f64>,
    /// RRMSE of that reconstruction against the input database.
    pub rrmse: f64,
    /// Index of the first layer of the decoder within the network.
    pub decoder_start: usize,
}

fn snapshot_windows(m: &SnapshotMatrix, k_train: usize, k_val: usize) -> RollingWindowDataset {
    let j = m.spatial_dim();
    let window_of = |k: usize| {
        let col: Vec<f64> = m.data().column(k).iter().copied().collect();
        Window {
            input: Feature::row_vector(col.clone()),
            target: Feature::from_vec(1, j, col),
            start: k,
        }
    };
    RollingWindowDataset {
        q: 1,
        p: 1,
        n: j,
        train: (0..k_train).map(window_of).collect(),
        val: (k_train..k_train + k_val).map(window_of).collect(),
        test: (k_train + k_val..m.times()).map(window_of).collect(),
        counts: (k_train, k_val, m.times() - k_train - k_val),
    }
}

/// Train an autoencoder and rank its latent units by single-unit
/// reconstruction quality (ascending RRMSE).
pub fn ae_identify_patterns(m: &SnapshotMatrix, cfg: &AeConfig) -> Result<AeOutcome> {
    let j = m.spatial_dim();
    let k = m.times();
    if !(0.0 < cfg.train_fraction && cfg.train_fraction < 1.0) {
        return Err(HybridError::InvalidConfig(format!(
            "train fraction must be in (0, 1), got {}",
            cfg.train_fraction
        )));
    }
    let k_train = ((cfg.train_fraction * k as f64).floor() as usize).max(1);
    if cfg.encoding_dim == 0 || cfg.encoding_dim >= k_train {
        return Err(HybridError::InvalidConfig(format!(
            "encoding dimension {} must satisfy 1 <= M < K_training = {k_train}",
            cfg.encoding_dim
        )));
    }
    // Early stopping needs a validation block: carve it from the tail of the
    // training region.
    let k_val = (k_train / 5).max(1);
    let k_fit = k_train - k_val;
    if k_fit == 0 {
        return Err(HybridError::InsufficientSnapshots(format!(
            "{k} snapshots leave no training data at fraction {}",
            cfg.train_fraction
        )));
    }

    let mut layers = Vec::new();
    for &h in &cfg.hidden {
        layers.push(LayerSpec::Dense {
            units: h,
            activation: cfg.activation,
        });
    }
    layers.push(LayerSpec::Dense {
        units: cfg.encoding_dim,
        activation: Activation::Linear,
    });
    let decoder_start = layers.len();
    for &h in cfg.hidden.iter().rev() {
        layers.push(LayerSpec::Dense {
            units: h,
            activation: cfg.activation,
        });
    }
    layers.push(LayerSpec::Dense {
        units: j,
        activation: Activation::Linear,
    });
    let spec = NetworkSpec {
        layers,
        loss: Loss::Mse,
        seed: cfg.seed,
    };
    let network = Network::new(spec, (1, j))?;

    let data = snapshot_windows(m, k_fit, k_val);
    let opts = TrainOptions {
        learning_rate: cfg.learning_rate,
        batch: cfg.batch.min(data.train.len()).max(1),
        epochs: cfg.epochs,
        patience: 20,
        split: Split::new(1.0, 0.0, 0.0)?,
    };
    let model = train(network, &data, &opts)?;

    // Full reconstruction of every snapshot.
    let mut reconstruction = DMatrix::<f64>::zeros(j, k);
    for kk in 0..k {
        let col: Vec<f64> = m.data().column(kk).iter().copied().collect();
        let out = model.predict(&Feature::row_vector(col))?;
        for r in 0..j {
            reconstruction[(r, kk)] = out.get(0, r);
        }
    }
    let rrmse = rrmse_mat(m.data(), &reconstruction)?;

    // Latent coordinates of every snapshot.
    let net = &model.network;
    let m_dim = cfg.encoding_dim;
    let mut latents = DMatrix::<f64>::zeros(m_dim, k);
    for kk in 0..k {
        let col: Vec<f64> = m.data().column(kk).iter().copied().collect();
        let latent = encode(net, decoder_start, &Feature::row_vector(col))?;
        for r in 0..m_dim {
            latents[(r, kk)] = latent.get(0, r);
        }
    }

    // Single-unit reconstructions: zero every other latent, decode.
    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(m_dim);
    for unit in 0..m_dim {
        let mut rec = DMatrix::<f64>::zeros(j, k);
        for kk in 0..k {
            let mut z = vec![0.0; m_dim];
            z[unit] = latents[(unit, kk)];
            let out = net.forward_from(decoder_start, &Feature::row_vector(z))?;
            for r in 0..j {
                rec[(r, kk)] = out.get(0, r);
            }
        }
        scored.push((unit, rrmse_mat(m.data(), &rec)?));
    }
    scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let ranked_units: Vec<usize> = scored.iter().map(|&(u, _)| u).collect();
    let unit_rrmse: Vec<f64> = scored.iter().map(|&(_, e)| e).collect();

    // Pattern of a unit: decoder response to its impulse above the decoder
    // bias level.
    let bias_field = net.forward_from(decoder_start, &Feature::row_vector(vec![0.0; m_dim]))?;
    let mut patterns = DMatrix::<f64>::zeros(j, m_dim);
    for (c, &unit) in ranked_units.iter().enumerate() {
        let mut z = vec![0.0; m_dim];
        z[unit] = 1.0;
        let out = net.forward_from(decoder_start, &Feature::row_vector(z))?;
        for r in 0..j {
            patterns[(r, c)] = out.get(0, r) - bias_field.get(0, r);
        }
    }

    Ok(AeOutcome {
        model,
        ranked_units,
        patterns,
        unit_rrmse,
        reconstruction,
        rrmse,
        decoder_start,
    })
}

/// Forward through the encoder half only.
fn encode(net: &Network, decoder_start: usize, input: &Feature) -> Result<Feature> {
    let mut x = input.clone();
    for i in 0..decoder_start {
        x = net.forward_layer(i, &x)?;
    }
    Ok(x)
}
