//! Forecasting reduced order models.
//!
//! Two frameworks share one pipeline shape:
//!
//! * `HybridDl` — scale the variables, flatten to the snapshot matrix, reduce
//!   with a fixed-rank SVD, scale the reduced coefficients, train a CNN/RNN
//!   on rolling windows of the coefficients, roll the model forward over the
//!   test block autoregressively, then lift through the SVD basis and invert
//!   both scalings back to physical space.
//! * `FullyDl` — the same, minus reduction and scaling: windows run directly
//!   over the flattened snapshots.
//!
//! The predictor is injectable so the surrounding pipeline can be validated
//! with an oracle that returns the true coefficients: in that configuration
//! the lifted error must equal the SVD truncation error exactly.

use nalgebra::DMatrix;
use romkit_core::decompose;
use romkit_core::metrics::{rrmse_mat, rrmse_slice};
use romkit_core::scaling::{apply_scaler, equal_blocks, fit_scaler, invert_scaler, ScaleKind, ScalerSpec};
use romkit_core::tensor::{SnapshotMatrix, SnapshotTensor};
use romkit_nn::{
    make_windows, train, Activation, Feature, LayerSpec, Loss, Network, NetworkSpec,
    TrainOptions, TrainedModel,
};

use crate::error::{HybridError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Framework {
    HybridDl,
    FullyDl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Cnn,
    Rnn,
}

/// Scaling request: kind plus whether the variables are centred first.
#[derive(Clone, Copy, Debug)]
pub struct ScalingStep {
    pub kind: ScaleKind,
    pub centering: bool,
}

#[derive(Clone, Debug)]
pub struct ForecastRomConfig {
    pub framework: Framework,
    pub model: ModelKind,
    /// SVD rank `N` (HybridDl only).
    pub svd_rank: usize,
    /// Per-variable scaling of the raw snapshots (HybridDl only).
    pub first_scaling: Option<ScalingStep>,
    /// Per-mode scaling of the reduced coefficients (HybridDl only).
    pub second_scaling: Option<ScaleKind>,
    /// Window length (inputs) and predictions per window (targets).
    pub q: usize,
    pub p: usize,
    /// LSTM units / dense width.
    pub neurons: usize,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub loss: Loss,
    pub train: TrainOptions,
    pub seed: u64,
}

/// Anything that maps a `q x n` window to the next `p` snapshots.
pub trait Predictor {
    fn predict(&self, window: &Feature) -> Result<Feature>;
}

impl Predictor for TrainedModel {
    fn predict(&self, window: &Feature) -> Result<Feature> {
        Ok(TrainedModel::predict(self, window)?)
    }
}

#[derive(Clone, Debug)]
pub struct ForecastOutcome {
    /// Physical-space predictions over the test block, `J x K_test`.
    pub predicted: SnapshotMatrix,
    /// RRMSE against the held-out truth.
    pub rrmse: f64,
    pub per_snapshot_rrmse: Vec<f64>,
    /// First test snapshot index.
    pub test_start: usize,
    /// The trained model (absent when an external predictor was injected).
    pub model: Option<TrainedModel>,
}

fn network_spec(cfg: &ForecastRomConfig, n: usize) -> Result<NetworkSpec> {
    let out_units = cfg.p * n;
    let layers = match cfg.model {
        ModelKind::Rnn => vec![
            LayerSpec::Lstm { units: cfg.neurons },
            LayerSpec::Dense {
                units: cfg.neurons,
                activation: cfg.hidden_activation,
            },
            LayerSpec::Dense {
                units: out_units,
                activation: cfg.output_activation,
            },
        ],
        ModelKind::Cnn => {
            // Two stride-1 valid convolutions need q >= 2*(kernel-1) + 1.
            let kernel = 3usize.min(cfg.q.div_ceil(2)).max(1);
            if cfg.q < 2 * (kernel - 1) + 1 {
                return Err(HybridError::InvalidConfig(format!(
                    "window q = {} too short for the convolutional model",
                    cfg.q
                )));
            }
            vec![
                LayerSpec::Conv1d {
                    filters: 32,
                    kernel,
                    activation: cfg.hidden_activation,
                },
                LayerSpec::Conv1d {
                    filters: 32,
                    kernel,
                    activation: cfg.hidden_activation,
                },
                LayerSpec::Flatten,
                LayerSpec::Dense {
                    units: cfg.neurons,
                    activation: cfg.hidden_activation,
                },
                LayerSpec::Dense {
                    units: out_units,
                    activation: cfg.output_activation,
                },
            ]
        }
    };
    Ok(NetworkSpec {
        layers,
        loss: cfg.loss,
        seed: cfg.seed,
    })
}

/// Roll the predictor forward over `k_test` snapshots starting from the last
/// `q` known columns, feeding predictions back in as inputs.
fn rollout(
    predictor: &dyn Predictor,
    known: &DMatrix<f64>,
    q: usize,
    p: usize,
    k_test: usize,
) -> Result<DMatrix<f64>> {
    let n = known.nrows();
    let k_known = known.ncols();
    debug_assert!(k_known >= q);
    let mut buffer: Vec<Vec<f64>> = (k_known - q..k_known)
        .map(|c| known.column(c).iter().copied().collect())
        .collect();
    let mut out = DMatrix::<f64>::zeros(n, k_test);
    let mut produced = 0usize;
    while produced < k_test {
        let mut window = Feature::zeros(q, n);
        for r in 0..q {
            for c in 0..n {
                window.set(r, c, buffer[buffer.len() - q + r][c]);
            }
        }
        let pred = predictor.predict(&window)?;
        if pred.len() != p * n {
            return Err(HybridError::InvalidConfig(format!(
                "predictor returned {} values, expected p*n = {}",
                pred.len(),
                p * n
            )));
        }
        for step in 0..p {
            if produced >= k_test {
                break;
            }
            let snap: Vec<f64> = (0..n).map(|c| pred.data()[step * n + c]).collect();
            for (r, &v) in snap.iter().enumerate() {
                out[(r, produced)] = v;
            }
            buffer.push(snap);
            produced += 1;
        }
    }
    Ok(out)
}

/// Train the configured model and forecast the test block.
pub fn forecast_rom(data: &SnapshotTensor, cfg: &ForecastRomConfig) -> Result<ForecastOutcome> {
    forecast_rom_impl(data, cfg, None)
}

/// Same pipeline with an injected predictor replacing training; used to
/// verify the pipeline in isolation from learning quality.
pub fn forecast_rom_with_predictor(
    data: &SnapshotTensor,
    cfg: &ForecastRomConfig,
    predictor: &dyn Predictor,
) -> Result<ForecastOutcome> {
    forecast_rom_impl(data, cfg, Some(predictor))
}

fn forecast_rom_impl(
    data: &SnapshotTensor,
    cfg: &ForecastRomConfig,
    injected: Option<&dyn Predictor>,
) -> Result<ForecastOutcome> {
    let m = data.to_matrix();
    let k = m.times();
    let (k_train, k_val, k_test) = cfg.train.split.counts(k);
    if k_test == 0 {
        return Err(HybridError::InvalidConfig(
            "forecast needs a non-empty test block".into(),
        ));
    }
    if k_train + k_val < cfg.q {
        return Err(HybridError::InsufficientSnapshots(format!(
            "rollout needs q = {} known snapshots, have {}",
            cfg.q,
            k_train + k_val
        )));
    }

    match cfg.framework {
        Framework::HybridDl => {
            if cfg.svd_rank == 0 {
                return Err(HybridError::InvalidConfig(
                    "hybrid framework needs svd_rank >= 1".into(),
                ));
            }
            // First scaling: per physical variable (tensor component).
            let blocks = equal_blocks(m.spatial_dim(), data.components())?;
            let first: Option<ScalerSpec> = match cfg.first_scaling {
                Some(step) => Some(fit_scaler(&m, step.kind, step.centering, &blocks)?),
                None => None,
            };
            let scaled = match &first {
                Some(s) => apply_scaler(&m, s)?,
                None => m.clone(),
            };

            // Fixed-rank reduction.
            let factors = decompose::svd_truncated(&scaled, 0.0, Some(cfg.svd_rank))?;
            let reduced = decompose::reduced_from_factors(&factors, scaled.dt());
            let n = reduced.data.nrows();

            // Second scaling: one variable per mode (row).
            let reduced_m = SnapshotMatrix::new(reduced.data.clone(), scaled.dt())
                .map_err(HybridError::Core)?;
            let mode_blocks = vec![1usize; n];
            let second: Option<ScalerSpec> = match cfg.second_scaling {
                Some(kind) => Some(fit_scaler(&reduced_m, kind, false, &mode_blocks)?),
                None => None,
            };
            let coeffs = match &second {
                Some(s) => apply_scaler(&reduced_m, s)?,
                None => reduced_m.clone(),
            };

            // Train (or accept the injected predictor).
            let (model, predictor): (Option<TrainedModel>, &dyn Predictor);
            let trained;
            match injected {
                Some(p) => {
                    model = None;
                    predictor = p;
                }
                None => {
                    let ds = make_windows(coeffs.data(), cfg.q, cfg.p, &cfg.train.split)?;
                    let spec = network_spec(cfg, n)?;
                    let net = Network::new(spec, (cfg.q, n))?;
                    trained = train(net, &ds, &cfg.train)?;
                    predictor = &trained;
                    model = Some(trained.clone());
                }
            }

            // Autoregressive rollout over the test block.
            let known = coeffs.data().columns(0, k_train + k_val).into_owned();
            let pred_coeffs = rollout(predictor, &known, cfg.q, cfg.p, k_test)?;

            // Lift back to physical space.
            let pred_m = SnapshotMatrix::new(pred_coeffs, scaled.dt())
                .map_err(HybridError::Core)?;
            let unscaled2 = match &second {
                Some(s) => invert_scaler(&pred_m, s)?,
                None => pred_m,
            };
            let lifted = &reduced.parent_w * unscaled2.data();
            let lifted_m = SnapshotMatrix::new(lifted, scaled.dt()).map_err(HybridError::Core)?;
            let physical = match &first {
                Some(s) => invert_scaler(&lifted_m, s)?,
                None => lifted_m,
            };

            finish(&m, physical, k_train + k_val, k_test, model)
        }
        Framework::FullyDl => {
            let n = m.spatial_dim();
            let (model, predictor): (Option<TrainedModel>, &dyn Predictor);
            let trained;
            match injected {
                Some(p) => {
                    model = None;
                    predictor = p;
                }
                None => {
                    let ds = make_windows(m.data(), cfg.q, cfg.p, &cfg.train.split)?;
                    let spec = network_spec(cfg, n)?;
                    let net = Network::new(spec, (cfg.q, n))?;
                    trained = train(net, &ds, &cfg.train)?;
                    predictor = &trained;
                    model = Some(trained.clone());
                }
            }
            let known = m.data().columns(0, k_train + k_val).into_owned();
            let pred = rollout(predictor, &known, cfg.q, cfg.p, k_test)?;
            let physical = SnapshotMatrix::new(pred, m.dt()).map_err(HybridError::Core)?;
            finish(&m, physical, k_train + k_val, k_test, model)
        }
    }
}

fn finish(
    truth: &SnapshotMatrix,
    predicted: SnapshotMatrix,
    test_start: usize,
    k_test: usize,
    model: Option<TrainedModel>,
) -> Result<ForecastOutcome> {
    let truth_block = truth.data().columns(test_start, k_test).into_owned();
    let rrmse = rrmse_mat(&truth_block, predicted.data())?;
    let mut per_snapshot = Vec::with_capacity(k_test);
    for c in 0..k_test {
        let t: Vec<f64> = truth_block.column(c).iter().copied().collect();
        let p: Vec<f64> = predicted.data().column(c).iter().copied().collect();
        per_snapshot.push(rrmse_slice(&t, &p).unwrap_or(f64::NAN));
    }
    Ok(ForecastOutcome {
        predicted,
        rrmse,
        per_snapshot_rrmse: per_snapshot,
        test_start,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use romkit_core::rng::Rng;
    use romkit_nn::Split;

    /// Rank-2 periodic synthetic flow on a small grid.
    fn periodic_tensor(k: usize) -> SnapshotTensor {
        let mut rng = Rng::seed_from(61);
        let j = 2 * 6 * 5;
        let a: Vec<f64> = (0..j).map(|_| rng.normal()).collect();
        let b: Vec<f64> = (0..j).map(|_| rng.normal()).collect();
        let mut data = vec![0.0; j * k];
        for (jj, (aj, bj)) in a.iter().zip(&b).enumerate() {
            for kk in 0..k {
                let t = kk as f64 * 0.1;
                data[jj * k + kk] = aj * (0.9 * t).sin() + bj * (0.9 * t).cos();
            }
        }
        SnapshotTensor::new(2, vec![6, 5], k, 0.1, data).unwrap()
    }

    fn base_cfg() -> ForecastRomConfig {
        ForecastRomConfig {
            framework: Framework::HybridDl,
            model: ModelKind::Rnn,
            svd_rank: 2,
            first_scaling: None,
            second_scaling: Some(ScaleKind::Mpm),
            q: 10,
            p: 1,
            neurons: 16,
            hidden_activation: Activation::Tanh,
            output_activation: Activation::Linear,
            loss: Loss::Mse,
            train: TrainOptions {
                learning_rate: 0.005,
                batch: 8,
                epochs: 200,
                patience: 40,
                split: Split::new(0.7, 0.15, 0.15).unwrap(),
            },
            seed: 5,
        }
    }

    /// Oracle predictor: looks up the true coefficients, ignoring the window.
    struct OraclePredictor {
        truth: DMatrix<f64>,
        cursor: std::cell::RefCell<usize>,
        p: usize,
    }

    impl Predictor for OraclePredictor {
        fn predict(&self, _window: &Feature) -> Result<Feature> {
            let mut cur = self.cursor.borrow_mut();
            let n = self.truth.nrows();
            let mut out = vec![0.0; self.p * n];
            for step in 0..self.p {
                let col = (*cur + step).min(self.truth.ncols() - 1);
                for r in 0..n {
                    out[step * n + r] = self.truth[(r, col)];
                }
            }
            *cur += self.p;
            Ok(Feature::row_vector(out))
        }
    }

    #[test]
    fn oracle_predictor_recovers_truncation_error() {
        // With a perfect predictor the pipeline error equals the SVD
        // truncation error of the test block.
        let t = periodic_tensor(120);
        let mut cfg = base_cfg();
        cfg.svd_rank = 1; // forces a visible truncation error
        cfg.first_scaling = Some(ScalingStep {
            kind: ScaleKind::Auto,
            centering: true,
        });
        let m = t.to_matrix();
        let (k_train, k_val, k_test) = cfg.train.split.counts(120);

        // Build the oracle: true scaled reduced coefficients of the test block.
        let blocks = equal_blocks(m.spatial_dim(), 2).unwrap();
        let first = fit_scaler(&m, ScaleKind::Auto, true, &blocks).unwrap();
        let scaled = apply_scaler(&m, &first).unwrap();
        let factors = decompose::svd_truncated(&scaled, 0.0, Some(1)).unwrap();
        let reduced = decompose::reduced_from_factors(&factors, 1.0);
        let reduced_m = SnapshotMatrix::new(reduced.data.clone(), 1.0).unwrap();
        let second = fit_scaler(&reduced_m, ScaleKind::Mpm, false, &[1usize]).unwrap();
        let coeffs = apply_scaler(&reduced_m, &second).unwrap();
        let oracle = OraclePredictor {
            truth: coeffs.data().columns(k_train + k_val, k_test).into_owned(),
            cursor: std::cell::RefCell::new(0),
            p: cfg.p,
        };
        let out = forecast_rom_with_predictor(&t, &cfg, &oracle).unwrap();

        // Truncation error computed independently.
        let lifted = &reduced.parent_w * reduced.data.columns(k_train + k_val, k_test);
        let lifted_m = SnapshotMatrix::new(lifted, 1.0).unwrap();
        let truncated = invert_scaler(&lifted_m, &first).unwrap();
        let truth_block = m.data().columns(k_train + k_val, k_test).into_owned();
        let expected = rrmse_mat(&truth_block, truncated.data()).unwrap();
        assert!(
            (out.rrmse - expected).abs() < 1e-10,
            "pipeline {} vs truncation {}",
            out.rrmse,
            expected
        );
    }

    #[test]
    fn trained_rnn_forecasts_periodic_flow() {
        let t = periodic_tensor(120);
        let cfg = base_cfg();
        let out = forecast_rom(&t, &cfg).unwrap();
        assert!(
            out.rrmse < 0.10,
            "rank-2 periodic forecast RRMSE {}",
            out.rrmse
        );
        assert_eq!(out.per_snapshot_rrmse.len(), 18);
    }

    #[test]
    fn fully_dl_runs_on_raw_snapshots() {
        let t = periodic_tensor(100);
        let mut cfg = base_cfg();
        cfg.framework = Framework::FullyDl;
        cfg.model = ModelKind::Cnn;
        cfg.train.epochs = 60;
        let out = forecast_rom(&t, &cfg).unwrap();
        assert!(out.rrmse.is_finite());
        assert_eq!(out.predicted.spatial_dim(), 60);
    }

    #[test]
    fn rollout_equals_chained_one_step_predictions() {
        let t = periodic_tensor(120);
        let mut cfg = base_cfg();
        cfg.train.epochs = 30;
        let out = forecast_rom(&t, &cfg).unwrap();
        let model = out.model.expect("trained model");

        // Rebuild the scaled reduced coefficients the pipeline trained on.
        let m = t.to_matrix();
        let factors = decompose::svd_truncated(&m, 0.0, Some(2)).unwrap();
        let reduced = decompose::reduced_from_factors(&factors, 0.1);
        let reduced_m = SnapshotMatrix::new(reduced.data.clone(), 0.1).unwrap();
        let second = fit_scaler(&reduced_m, ScaleKind::Mpm, false, &[1usize, 1]).unwrap();
        let coeffs = apply_scaler(&reduced_m, &second).unwrap();
        let (k_train, k_val, k_test) = cfg.train.split.counts(120);
        let known = coeffs.data().columns(0, k_train + k_val).into_owned();

        // Library rollout vs a manual chain of one-step predictions.
        let rolled = rollout(&model, &known, cfg.q, 1, k_test).unwrap();
        let n = known.nrows();
        let mut history: Vec<Vec<f64>> = (0..known.ncols())
            .map(|c| known.column(c).iter().copied().collect())
            .collect();
        for step in 0..k_test {
            let mut window = Feature::zeros(cfg.q, n);
            for r in 0..cfg.q {
                for c in 0..n {
                    window.set(r, c, history[history.len() - cfg.q + r][c]);
                }
            }
            let pred = Predictor::predict(&model, &window).unwrap();
            let snap: Vec<f64> = pred.data().to_vec();
            for (r, &v) in snap.iter().enumerate() {
                assert_eq!(rolled[(r, step)], v, "step {step} row {r}");
            }
            history.push(snap);
        }
    }

    #[test]
    fn missing_test_block_rejected() {
        let t = periodic_tensor(50);
        let mut cfg = base_cfg();
        cfg.train.split = Split::new(0.8, 0.2, 0.0).unwrap();
        assert!(matches!(
            forecast_rom(&t, &cfg),
            Err(HybridError::InvalidConfig(_))
        ));
    }
}
