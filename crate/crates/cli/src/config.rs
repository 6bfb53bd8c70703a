//! JSON run configurations, one struct per command. Every key is optional
//! with a documented default; unknown keys are rejected so typos fail fast.
//! Defaults follow the calibrations that ship with the toolkit's worked
//! examples (urban-flow decomposition, predictive wake ROM, combustion
//! forecasting, sensor reconstruction).

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

fn d_one() -> f64 {
    1.0
}

/// `decompose svd` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvdRunConfig {
    /// Truncation tolerance on singular value ratios.
    pub tolerance: f64,
    /// Optional hard rank cap (takes precedence over the tolerance).
    pub max_rank: Option<usize>,
    /// Snapshot spacing (the tensor file stores no time step).
    pub dt: f64,
}

impl Default for SvdRunConfig {
    fn default() -> Self {
        SvdRunConfig {
            tolerance: 1e-3,
            max_rank: None,
            dt: 1.0,
        }
    }
}

/// `decompose hosvd` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HosvdRunConfig {
    /// Shared per-axis tolerance.
    pub tolerance: f64,
    /// Per-axis tolerances overriding the shared one (one per tensor axis).
    pub per_axis: Option<Vec<f64>>,
    pub dt: f64,
}

impl Default for HosvdRunConfig {
    fn default() -> Self {
        HosvdRunConfig {
            tolerance: 1e-3,
            per_axis: None,
            dt: 1.0,
        }
    }
}

/// `decompose hodmd` / `decompose mdhodmd` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HodmdRunConfig {
    /// Delay parameter; the recommended window is K/10 <= d <= K/2.
    pub d: usize,
    pub eps_svd: f64,
    pub eps_amp: f64,
    /// Per-axis HOSVD tolerances (mdhodmd only).
    pub per_axis: Option<Vec<f64>>,
    /// Apply the iterative variant (mdhodmd only).
    pub iterative: bool,
    pub max_iters: usize,
    pub dt: f64,
}

impl Default for HodmdRunConfig {
    fn default() -> Self {
        HodmdRunConfig {
            d: 50,
            eps_svd: 1e-3,
            eps_amp: 1e-3,
            per_axis: None,
            iterative: false,
            max_iters: 20,
            dt: 1.0,
        }
    }
}

/// `repair gappy` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GappyRunConfig {
    /// Initial gap fill: "zero", "mean" or "linear_interp".
    pub init: String,
    /// Retained modes per reconstruction.
    pub rank: usize,
    /// Per-axis ranks for tensor (HOSVD) repair; `rank` everywhere if unset.
    pub per_axis_ranks: Option<Vec<usize>>,
    pub tol_gaps: f64,
    pub max_iters: usize,
    pub dt: f64,
}

impl Default for GappyRunConfig {
    fn default() -> Self {
        GappyRunConfig {
            init: "zero".into(),
            rank: 10,
            per_axis_ranks: None,
            tol_gaps: 1e-6,
            max_iters: 500,
            dt: 1.0,
        }
    }
}

/// `superres` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuperresRunConfig {
    /// Doubling passes `s`: output resolution is `2^s` times the input.
    pub doublings: usize,
    pub rank: usize,
    /// "linear" or "cubic" midpoint interpolation.
    pub interp: String,
    /// "hold" keeps the time axis; "enlarge" doubles it too.
    pub temporal: String,
    pub dt: f64,
}

impl Default for SuperresRunConfig {
    fn default() -> Self {
        SuperresRunConfig {
            doublings: 3,
            rank: 10,
            interp: "linear".into(),
            temporal: "hold".into(),
            dt: 1.0,
        }
    }
}

/// `forecast dmd` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForecastDmdRunConfig {
    pub d: usize,
    pub eps_svd: f64,
    pub eps_amp: f64,
    /// Growth-rate filter: modes with |delta| < eps_perm are kept.
    pub eps_perm: f64,
    /// Zero the retained growth rates before extrapolating.
    pub freeze_growth: bool,
    /// Extrapolation start, measured from the first training snapshot;
    /// defaults to the end of the training window.
    pub start_time: Option<f64>,
    /// Number of forecast snapshots.
    pub horizon: usize,
    pub dt: f64,
}

impl Default for ForecastDmdRunConfig {
    fn default() -> Self {
        ForecastDmdRunConfig {
            d: 250,
            eps_svd: 1e-4,
            eps_amp: 3e-3,
            eps_perm: 1e-3,
            freeze_growth: true,
            start_time: None,
            horizon: 100,
            dt: 1.0,
        }
    }
}

/// `forecast nn` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForecastNnRunConfig {
    /// "hybrid_dl" (SVD + network on reduced coefficients) or "fully_dl".
    pub framework: String,
    /// "rnn" (LSTM) or "cnn".
    pub model: String,
    /// Retained SVD modes (hybrid framework).
    pub svd_rank: usize,
    /// First scaling applied per variable: "none", "range", "auto", "pareto".
    pub first_scaling: String,
    pub centering: bool,
    /// Second scaling applied per mode: "none" or "mpm".
    pub second_scaling: String,
    /// Window length (input samples per window).
    pub q: usize,
    /// Time-ahead predictions per window.
    pub p: usize,
    pub neurons: usize,
    pub hidden_activation: String,
    pub output_activation: String,
    /// "mse" or "pa_mse".
    pub loss: String,
    pub pa_weight: f64,
    pub learning_rate: f64,
    pub batch: usize,
    pub epochs: usize,
    pub patience: usize,
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub seed: u64,
    pub dt: f64,
}

impl Default for ForecastNnRunConfig {
    fn default() -> Self {
        ForecastNnRunConfig {
            framework: "hybrid_dl".into(),
            model: "rnn".into(),
            svd_rank: 18,
            first_scaling: "auto".into(),
            centering: true,
            second_scaling: "mpm".into(),
            q: 10,
            p: 6,
            neurons: 100,
            hidden_activation: "elu".into(),
            output_activation: "tanh".into(),
            loss: "mse".into(),
            pa_weight: 1.0,
            learning_rate: 0.005,
            batch: 12,
            epochs: 400,
            patience: 20,
            train_fraction: 0.65,
            val_fraction: 0.15,
            seed: 0,
            dt: 1.0,
        }
    }
}

/// `reconstruct nn` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructRunConfig {
    /// Sensor strides, one per spatial axis.
    pub strides: Vec<usize>,
    /// Singular values retained per snapshot.
    pub rank: usize,
    /// Dense layers per decoder branch.
    pub decoder_layers: usize,
    pub neurons: usize,
    pub activation: String,
    pub learning_rate: f64,
    pub batch: usize,
    pub epochs: usize,
    pub patience: usize,
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub seed: u64,
    pub dt: f64,
}

impl Default for ReconstructRunConfig {
    fn default() -> Self {
        ReconstructRunConfig {
            strides: vec![30, 30],
            rank: 10,
            decoder_layers: 5,
            neurons: 13,
            activation: "relu".into(),
            learning_rate: 0.002,
            batch: 23,
            epochs: 500,
            patience: 20,
            train_fraction: 0.6,
            val_fraction: 0.2,
            seed: 0,
            dt: 1.0,
        }
    }
}

/// `autoencode` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AutoencodeRunConfig {
    /// Latent width `M` (must stay below the training snapshot count).
    pub modes: usize,
    /// Encoder hidden widths; the decoder mirrors them.
    pub hidden: Vec<usize>,
    pub activation: String,
    pub train_fraction: f64,
    pub batch: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub dt: f64,
}

impl Default for AutoencodeRunConfig {
    fn default() -> Self {
        AutoencodeRunConfig {
            modes: 10,
            hidden: vec![],
            activation: "linear".into(),
            train_fraction: 0.8,
            batch: 32,
            epochs: 200,
            learning_rate: 0.01,
            seed: 0,
            dt: 1.0,
        }
    }
}

/// One ground-truth mode of the synthetic generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticMode {
    pub amplitude: f64,
    pub omega: f64,
    pub delta: f64,
}

/// `generate synthetic` settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateRunConfig {
    /// Ground-truth modes; when empty, `mode_count` default modes are used.
    pub modes: Vec<SyntheticMode>,
    /// Number of auto-generated modes when `modes` is empty.
    pub mode_count: usize,
    pub components: usize,
    /// Spatial grid dimensions.
    pub dims: Vec<usize>,
    pub snapshots: usize,
    #[serde(default = "d_one")]
    pub dt: f64,
    /// Relative Gaussian noise level.
    pub noise: f64,
    pub seed: u64,
}

impl Default for GenerateRunConfig {
    fn default() -> Self {
        GenerateRunConfig {
            modes: vec![],
            mode_count: 2,
            components: 1,
            dims: vec![16, 12],
            snapshots: 200,
            dt: 0.1,
            noise: 0.0,
            seed: 0,
        }
    }
}

impl GenerateRunConfig {
    /// The effective mode list: explicit modes, or the deterministic default
    /// family (unit-spaced frequencies, neutral growth, halving amplitudes).
    pub fn effective_modes(&self) -> Vec<SyntheticMode> {
        if !self.modes.is_empty() {
            return self.modes.clone();
        }
        (0..self.mode_count.max(1))
            .map(|m| SyntheticMode {
                amplitude: 1.0 / (1 << m) as f64,
                omega: 0.5 + 0.4 * m as f64,
                delta: 0.0,
            })
            .collect()
    }
}

/// Parse a config file (or use defaults when no path is given).
pub fn load_config<T: Default + for<'de> Deserialize<'de>>(
    path: Option<&std::path::Path>,
) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configs_round_trip_losslessly() {
        let cfg = ForecastNnRunConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ForecastNnRunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn unknown_keys_rejected() {
        let res: std::result::Result<SvdRunConfig, _> =
            serde_json::from_str(r#"{"tolerance": 0.1, "tolarence": 0.2}"#);
        assert!(res.is_err());
    }

    #[test]
    fn every_key_optional() {
        let cfg: HodmdRunConfig = serde_json::from_str(r#"{"d": 7}"#).unwrap();
        assert_eq!(cfg.d, 7);
        assert_eq!(cfg.eps_svd, 1e-3);
        let cfg: GenerateRunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.effective_modes().len(), 2);
    }
}
