//! Field reconstruction from sparse sensors.
//!
//! Each snapshot of the down-sampled database is factorised with a rank-`P'`
//! SVD. Two dense decoder stacks, sharing weights across snapshots and
//! working in parallel, stretch the left and right factor matrices to the
//! full grid; the output layer recombines them with the (frozen) singular
//! values, so the reconstruction is `W Sigma_DS T^T` per snapshot. Training
//! drives the squared error between that output and the original field,
//! which minimises the reconstruction RRMSE; evaluation is reported on the
//! held-out snapshots.
//!
//! Per-snapshot fields are matricised with the first spatial axis as rows
//! and (component x remaining spatial axes) as columns.

use nalgebra::DMatrix;
use romkit_core::linalg;
use romkit_core::metrics::rrmse_slice;
use romkit_core::rng::Rng;
use romkit_core::tensor::{NdArray, SnapshotTensor};
use romkit_nn::{Activation, Feature, LayerSpec, Loss, Network, NetworkSpec, Split};

use crate::error::{HybridError, Result};

#[derive(Clone, Debug)]
pub struct ReconstructionConfig {
    /// Singular values retained per snapshot (`P'`).
    pub rank: usize,
    /// Total dense layers per decoder branch (including the output layer).
    pub decoder_layers: usize,
    /// Hidden width of the decoder branches.
    pub neurons: usize,
    pub activation: Activation,
    pub learning_rate: f64,
    pub batch: usize,
    pub epochs: usize,
    pub patience: usize,
    /// Contiguous train/val/test fractions over the snapshot axis.
    pub split: Split,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct ReconstructionOutcome {
    /// Reconstruction of every snapshot at full resolution.
    pub reconstructed: SnapshotTensor,
    /// RRMSE over the held-out (test) snapshots.
    pub rrmse: f64,
    /// Per-snapshot RRMSE over the whole time axis.
    pub per_snapshot_rrmse: Vec<f64>,
    /// First held-out snapshot index.
    pub test_start: usize,
    /// Training history (train loss, validation loss) per epoch.
    pub history: Vec<(f64, f64)>,
}

/// Matricise snapshot `k`: rows follow the first spatial axis, columns run
/// over (component, remaining spatial axes) row-major. The time axis is last,
/// so its stride is one and `k` adds directly to the flat index.
fn snapshot_matrix(t: &SnapshotTensor, k: usize) -> DMatrix<f64> {
    let space = t.space_dims();
    let rows = space[0];
    let rest: usize = space[1..].iter().product::<usize>().max(1);
    let cols = t.components() * rest;
    let strides = t.array().strides();
    let data = t.array().data();
    DMatrix::from_fn(rows, cols, |r, c| {
        let comp = c / rest;
        let mut idx = comp * strides[0] + r * strides[1];
        let mut rem = c % rest;
        for ax in 1..space.len() {
            let block: usize = space[ax + 1..].iter().product::<usize>().max(1);
            idx += (rem / block) * strides[ax + 1];
            rem %= block;
        }
        data[idx + k]
    })
}

/// Take every `stride`-th point along each spatial axis.
pub fn downsample(t: &SnapshotTensor, strides: &[usize]) -> Result<SnapshotTensor> {
    if strides.len() != t.space_dims().len() {
        return Err(HybridError::InvalidConfig(format!(
            "{} strides for {} spatial axes",
            strides.len(),
            t.space_dims().len()
        )));
    }
    if strides.contains(&0) {
        return Err(HybridError::InvalidConfig("zero stride".into()));
    }
    let new_dims: Vec<usize> = t
        .space_dims()
        .iter()
        .zip(strides)
        .map(|(&d, &s)| d.div_ceil(s))
        .collect();
    let mut shape = vec![t.components()];
    shape.extend_from_slice(&new_dims);
    shape.push(t.times());
    let order = t.order();
    let len: usize = shape.iter().product();
    let mut idx = vec![0usize; order];
    let mut out_data = vec![0.0; len];
    // Row-major walk over the output shape, fetching the strided source.
    for (flat, slot) in out_data.iter_mut().enumerate() {
        let mut rem = flat;
        for a in (0..order).rev() {
            idx[a] = rem % shape[a];
            rem /= shape[a];
        }
        let mut src = vec![idx[0]];
        for (ax, &s) in strides.iter().enumerate() {
            src.push(idx[ax + 1] * s);
        }
        src.push(idx[order - 1]);
        *slot = t.array().get(&src);
    }
    let out = NdArray::from_vec(shape, out_data).map_err(HybridError::Core)?;
    SnapshotTensor::from_array(out, t.dt()).map_err(HybridError::Core)
}

fn dense_stack(widths: &[usize], activation: Activation, out_units: usize, seed: u64) -> NetworkSpec {
    let mut layers: Vec<LayerSpec> = widths
        .iter()
        .map(|&w| LayerSpec::Dense {
            units: w,
            activation,
        })
        .collect();
    layers.push(LayerSpec::Dense {
        units: out_units,
        activation: Activation::Linear,
    });
    NetworkSpec {
        layers,
        loss: Loss::Mse,
        seed,
    }
}

struct Branch {
    net: Network,
    grads: Vec<f64>,
    adam_m: Vec<f64>,
    adam_v: Vec<f64>,
}

impl Branch {
    fn new(net: Network) -> Self {
        let n = net.params().len();
        Branch {
            net,
            grads: vec![0.0; n],
            adam_m: vec![0.0; n],
            adam_v: vec![0.0; n],
        }
    }

    fn zero_grads(&mut self) {
        self.grads.iter_mut().for_each(|g| *g = 0.0);
    }

    fn adam_step(&mut self, lr: f64, t: u64) {
        let (b1, b2, eps) = (0.9, 0.999, 1e-8);
        let b1t = 1.0 - b1f64(b1, t);
        let b2t = 1.0 - b1f64(b2, t);
        let params = self.net.params_mut();
        for i in 0..params.len() {
            let g = self.grads[i];
            self.adam_m[i] = b1 * self.adam_m[i] + (1.0 - b1) * g;
            self.adam_v[i] = b2 * self.adam_v[i] + (1.0 - b2) * g * g;
            let mhat = self.adam_m[i] / b1t;
            let vhat = self.adam_v[i] / b2t;
            params[i] -= lr * mhat / (vhat.sqrt() + eps);
        }
    }
}

fn b1f64(beta: f64, t: u64) -> f64 {
    beta.powi(t as i32)
}

/// One training sample: the factor matrices of a down-sampled snapshot plus
/// the full-resolution target field.
struct Sample {
    w_in: Feature,
    t_in: Feature,
    sigma: Vec<f64>,
    target: DMatrix<f64>,
}

/// Reconstruct a full-resolution database from its stride-sampled version,
/// training on the leading snapshots and reporting error on the held-out
/// tail. `full` provides supervision; `strides` defines the sensor grid.
pub fn reconstruct_from_sensors(
    full: &SnapshotTensor,
    strides: &[usize],
    cfg: &ReconstructionConfig,
) -> Result<ReconstructionOutcome> {
    let ds = downsample(full, strides)?;
    let k = full.times();
    let rank = cfg.rank;
    if rank == 0 {
        return Err(HybridError::InvalidConfig("rank must be >= 1".into()));
    }
    if cfg.decoder_layers < 2 {
        return Err(HybridError::InvalidConfig(
            "decoder needs at least two layers".into(),
        ));
    }

    // Factorise every down-sampled snapshot at fixed rank.
    let ds0 = snapshot_matrix(&ds, 0);
    let (n1, n2) = ds0.shape();
    if rank > n1.min(n2) {
        return Err(HybridError::InvalidConfig(format!(
            "rank {rank} exceeds the down-sampled snapshot rank bound {}",
            n1.min(n2)
        )));
    }
    let full0 = snapshot_matrix(full, 0);
    let (f1, f2) = full0.shape();

    let mut samples: Vec<Sample> = Vec::with_capacity(k);
    for kk in 0..k {
        let ds_mat = snapshot_matrix(&ds, kk);
        let svd = linalg::truncated_svd(&ds_mat, 0.0, Some(rank)).map_err(HybridError::Core)?;
        let mut w_in = vec![0.0; n1 * rank];
        for r in 0..n1 {
            for c in 0..rank {
                w_in[r * rank + c] = svd.u[(r, c)];
            }
        }
        let mut t_in = vec![0.0; n2 * rank];
        for r in 0..n2 {
            for c in 0..rank {
                t_in[r * rank + c] = svd.v[(r, c)];
            }
        }
        samples.push(Sample {
            w_in: Feature::row_vector(w_in),
            t_in: Feature::row_vector(t_in),
            sigma: svd.sigma.iter().copied().collect(),
            target: snapshot_matrix(full, kk),
        });
    }

    // Two parallel decoder branches.
    let hidden = vec![cfg.neurons; cfg.decoder_layers - 1];
    let w_spec = dense_stack(&hidden, cfg.activation, f1 * rank, cfg.seed);
    let t_spec = dense_stack(&hidden, cfg.activation, f2 * rank, cfg.seed.wrapping_add(1));
    let mut w_branch = Branch::new(Network::new(w_spec, (1, n1 * rank))?);
    let mut t_branch = Branch::new(Network::new(t_spec, (1, n2 * rank))?);

    let (k_train, k_val, k_test) = cfg.split.counts(k);
    if k_train == 0 || k_val == 0 {
        return Err(HybridError::InsufficientSnapshots(
            "reconstruction training needs non-empty train and validation blocks".into(),
        ));
    }
    let batch = cfg.batch.clamp(1, k_train);

    // Forward/backward through the bilinear head O = W Sigma T^T.
    let forward = |wb: &Network, tb: &Network, s: &Sample| -> Result<(DMatrix<f64>, Feature, Feature)> {
        let w_out = wb.forward(&s.w_in)?;
        let t_out = tb.forward(&s.t_in)?;
        let w = DMatrix::from_fn(f1, rank, |r, c| w_out.data()[r * rank + c]);
        let t = DMatrix::from_fn(f2, rank, |r, c| t_out.data()[r * rank + c]);
        let mut ws = w;
        for c in 0..rank {
            ws.column_mut(c).scale_mut(s.sigma[c]);
        }
        Ok((&ws * t.transpose(), w_out, t_out))
    };

    let sample_loss = |wb: &Network, tb: &Network, s: &Sample| -> Result<f64> {
        let (out, _, _) = forward(wb, tb, s)?;
        let diff = &out - &s.target;
        Ok(diff.norm_squared() / (f1 * f2) as f64)
    };

    let block_loss = |wb: &Network, tb: &Network, range: std::ops::Range<usize>| -> Result<f64> {
        let mut total = 0.0;
        for kk in range.clone() {
            total += sample_loss(wb, tb, &samples[kk])?;
        }
        Ok(total / range.len() as f64)
    };

    let mut rng = Rng::seed_from(cfg.seed.wrapping_add(0x9E37_79B9_7F4A_7C15));
    let mut order: Vec<usize> = (0..k_train).collect();
    let mut history: Vec<(f64, f64)> = Vec::new();
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut stale = 0usize;
    let mut step: u64 = 0;

    for _epoch in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for chunk in order.chunks(batch) {
            w_branch.zero_grads();
            t_branch.zero_grads();
            for &kk in chunk {
                let s = &samples[kk];
                let (w_out, w_caches) = w_branch.net.forward_cached(&s.w_in)?;
                let (t_out, t_caches) = t_branch.net.forward_cached(&s.t_in)?;
                let w = DMatrix::from_fn(f1, rank, |r, c| w_out.data()[r * rank + c]);
                let t = DMatrix::from_fn(f2, rank, |r, c| t_out.data()[r * rank + c]);
                let mut ws = w.clone();
                for c in 0..rank {
                    ws.column_mut(c).scale_mut(s.sigma[c]);
                }
                let out = &ws * t.transpose();
                // dL/dO for L = ||O - V||^2 / (f1 f2).
                let scale = 2.0 / (f1 * f2) as f64;
                let g_out = (&out - &s.target) * scale;
                // dL/dW = G T Sigma, dL/dT = G^T W Sigma.
                let mut g_w = &g_out * &t;
                let mut g_t = g_out.transpose() * &w;
                for c in 0..rank {
                    g_w.column_mut(c).scale_mut(s.sigma[c]);
                    g_t.column_mut(c).scale_mut(s.sigma[c]);
                }
                let g_w_flat: Vec<f64> = (0..f1 * rank)
                    .map(|i| g_w[(i / rank, i % rank)])
                    .collect();
                let g_t_flat: Vec<f64> = (0..f2 * rank)
                    .map(|i| g_t[(i / rank, i % rank)])
                    .collect();
                w_branch.net.backward(
                    &w_caches,
                    &Feature::row_vector(g_w_flat),
                    &mut w_branch.grads,
                );
                t_branch.net.backward(
                    &t_caches,
                    &Feature::row_vector(g_t_flat),
                    &mut t_branch.grads,
                );
            }
            let inv = 1.0 / chunk.len() as f64;
            w_branch.grads.iter_mut().for_each(|g| *g *= inv);
            t_branch.grads.iter_mut().for_each(|g| *g *= inv);
            step += 1;
            w_branch.adam_step(cfg.learning_rate, step);
            t_branch.adam_step(cfg.learning_rate, step);
        }
        let train_loss = block_loss(&w_branch.net, &t_branch.net, 0..k_train)?;
        let val_loss = block_loss(&w_branch.net, &t_branch.net, k_train..k_train + k_val)?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(HybridError::Nn(romkit_nn::NnError::NanLoss {
                epoch: history.len(),
                last_finite: history.len().checked_sub(1),
            }));
        }
        history.push((train_loss, val_loss));
        let improved = best.as_ref().map(|(b, _, _)| val_loss < *b).unwrap_or(true);
        if improved {
            best = Some((
                val_loss,
                w_branch.net.params().to_vec(),
                t_branch.net.params().to_vec(),
            ));
            stale = 0;
        } else {
            stale += 1;
            if stale > cfg.patience {
                break;
            }
        }
    }
    if let Some((_, wp, tp)) = &best {
        w_branch.net.set_params(wp)?;
        t_branch.net.set_params(tp)?;
    }

    // Reconstruct every snapshot and assemble the output tensor.
    let mut out_tensor = NdArray::zeros(full.shape().to_vec());
    let mut per_snapshot = Vec::with_capacity(k);
    let space = full.space_dims().to_vec();
    let rest: usize = space[1..].iter().product::<usize>().max(1);
    let strides_full = out_tensor.strides();
    for (kk, s) in samples.iter().enumerate() {
        let (out, _, _) = forward(&w_branch.net, &t_branch.net, s)?;
        // Scatter the matricised snapshot back into the tensor.
        for r in 0..f1 {
            for c in 0..f2 {
                let comp = c / rest;
                let mut idx = comp * strides_full[0] + r * strides_full[1];
                let mut rem = c % rest;
                for ax in 1..space.len() {
                    let block: usize = space[ax + 1..].iter().product::<usize>().max(1);
                    idx += (rem / block) * strides_full[ax + 1];
                    rem %= block;
                }
                out_tensor.data_mut()[idx + kk] = out[(r, c)];
            }
        }
        let truth: Vec<f64> = s.target.iter().copied().collect();
        let pred: Vec<f64> = out.iter().copied().collect();
        per_snapshot.push(rrmse_slice(&truth, &pred).unwrap_or(f64::NAN));
    }

    // Held-out error: RRMSE over the test snapshots.
    let test_start = k_train + k_val;
    let mut num = 0.0;
    let mut den = 0.0;
    for s in samples.iter().skip(test_start) {
        let (out, _, _) = forward(&w_branch.net, &t_branch.net, s)?;
        num += (&out - &s.target).norm_squared();
        den += s.target.norm_squared();
    }
    let rrmse = if k_test > 0 && den > 0.0 {
        (num / den).sqrt()
    } else {
        f64::NAN
    };

    Ok(ReconstructionOutcome {
        reconstructed: SnapshotTensor::from_array(out_tensor, full.dt())
            .map_err(HybridError::Core)?,
        rrmse,
        per_snapshot_rrmse: per_snapshot,
        test_start,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Smooth rank-limited flow on a modest grid.
    fn smooth_tensor(nx: usize, ny: usize, k: usize, rank: usize) -> SnapshotTensor {
        let mut rng = Rng::seed_from(71);
        let xs: Vec<Vec<f64>> = (0..rank)
            .map(|m| {
                (0..nx)
                    .map(|i| ((m + 1) as f64 * std::f64::consts::PI * i as f64 / nx as f64).sin())
                    .collect()
            })
            .collect();
        let ys: Vec<Vec<f64>> = (0..rank)
            .map(|m| {
                (0..ny)
                    .map(|j| ((m + 1) as f64 * 2.2 * j as f64 / ny as f64).cos())
                    .collect()
            })
            .collect();
        let amp: Vec<f64> = (0..rank).map(|m| 2.0 / (m + 1) as f64).collect();
        let phase: Vec<f64> = (0..rank).map(|_| rng.uniform(0.0, 6.28)).collect();
        let mut data = vec![0.0; nx * ny * k];
        for i in 0..nx {
            for j in 0..ny {
                for kk in 0..k {
                    let t = 0.1 * kk as f64;
                    let mut v = 0.0;
                    for m in 0..rank {
                        v += amp[m] * xs[m][i] * ys[m][j] * (0.7 * (m + 1) as f64 * t + phase[m]).cos();
                    }
                    data[(i * ny + j) * k + kk] = v;
                }
            }
        }
        SnapshotTensor::new(1, vec![nx, ny], k, 0.1, data).unwrap()
    }

    #[test]
    fn downsample_takes_every_nth_point() {
        let t = smooth_tensor(12, 9, 5, 2);
        let ds = downsample(&t, &[3, 2]).unwrap();
        assert_eq!(ds.shape(), &[1, 4, 5, 5]);
        for i in 0..4 {
            for j in 0..5 {
                for kk in 0..5 {
                    assert_eq!(
                        ds.array().get(&[0, i, j, kk]),
                        t.array().get(&[0, 3 * i, 2 * j, kk])
                    );
                }
            }
        }
    }

    /// Field assembled from fixed orthonormal spatial profiles with strictly
    /// ordered positive amplitudes: the per-snapshot SVD factors are stable
    /// across time, so the decoders face a well-posed mapping.
    fn orthonormal_profile_tensor(nx: usize, ny: usize, k: usize, rank: usize) -> SnapshotTensor {
        let mut rng = Rng::seed_from(72);
        let qx = DMatrix::from_fn(nx, rank, |_, _| rng.normal()).qr().q();
        let qy = DMatrix::from_fn(ny, rank, |_, _| rng.normal()).qr().q();
        let mut data = vec![0.0; nx * ny * k];
        for kk in 0..k {
            let t = 0.1 * kk as f64;
            for m in 0..rank {
                // Strictly ordered, always positive amplitudes.
                let a = 4.0 / (m + 1) as f64 + 0.3 * (0.9 * (m + 1) as f64 * t).sin();
                for i in 0..nx {
                    for j in 0..ny {
                        data[(i * ny + j) * k + kk] += a * qx[(i, m)] * qy[(j, m)];
                    }
                }
            }
        }
        SnapshotTensor::new(1, vec![nx, ny], k, 0.1, data).unwrap()
    }

    #[test]
    fn identity_downsample_learns_near_identity() {
        // Stride 1 with the field's full rank: the decoders only need to
        // reproduce their inputs, so the reconstruction becomes nearly exact.
        let t = orthonormal_profile_tensor(10, 8, 60, 2);
        let cfg = ReconstructionConfig {
            rank: 2,
            decoder_layers: 2,
            neurons: 24,
            activation: Activation::Linear,
            learning_rate: 0.01,
            batch: 8,
            epochs: 400,
            patience: 400,
            split: Split::new(0.6, 0.2, 0.2).unwrap(),
            seed: 13,
        };
        let out = reconstruct_from_sensors(&t, &[1, 1], &cfg).unwrap();
        assert!(out.rrmse < 1e-3, "identity reconstruction RRMSE {}", out.rrmse);
    }

    #[test]
    fn output_dims_match_target_grid() {
        let t = smooth_tensor(15, 12, 20, 2);
        let cfg = ReconstructionConfig {
            rank: 2,
            decoder_layers: 3,
            neurons: 10,
            activation: Activation::Relu,
            learning_rate: 0.005,
            batch: 4,
            epochs: 5,
            patience: 5,
            split: Split::new(0.6, 0.2, 0.2).unwrap(),
            seed: 3,
        };
        let out = reconstruct_from_sensors(&t, &[4, 3], &cfg).unwrap();
        assert_eq!(out.reconstructed.shape(), t.shape());
        assert_eq!(out.per_snapshot_rrmse.len(), 20);
    }

    #[test]
    fn oversized_rank_rejected() {
        let t = smooth_tensor(10, 8, 10, 2);
        let cfg = ReconstructionConfig {
            rank: 6,
            decoder_layers: 2,
            neurons: 8,
            activation: Activation::Linear,
            learning_rate: 0.01,
            batch: 2,
            epochs: 2,
            patience: 2,
            split: Split::new(0.6, 0.2, 0.2).unwrap(),
            seed: 1,
        };
        // Down-sampled snapshots are 4x3: rank 6 cannot be factorised.
        assert!(matches!(
            reconstruct_from_sensors(&t, &[3, 3], &cfg),
            Err(HybridError::InvalidConfig(_))
        ));
    }
}
