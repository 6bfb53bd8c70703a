//! Implementations of the CLI commands. Every analysis run reads tensor
//! file(s) plus an optional JSON config and writes an artifact directory:
//! factor/prediction tensor files, a spectrum CSV where applicable,
//! `report.json`, and optional SVG figures.

use std::path::Path;

use nalgebra::DMatrix;
use romkit_core::decompose::{self, AxisTols};
use romkit_core::hodmd::{self, DmdExpansion};
use romkit_core::metrics::rrmse_mat;
use romkit_core::repair::{self, GappyConfig, InitFill, Interp, SuperResConfig, TemporalMode};
use romkit_core::scaling::ScaleKind;
use romkit_core::tensor::{SnapshotMatrix, SnapshotTensor};
use romkit_hybrid::{
    ae_identify_patterns, downsample, forecast_rom, reconstruct_from_sensors, AeConfig,
    ForecastRomConfig, Framework, ModelKind, ReconstructionConfig, ScalingStep,
};
use romkit_nn::{checkpoint, Activation, Loss, Split, TrainOptions};

use crate::config::*;
use crate::error::{CliError, Result};
use crate::format::TensorFile;
use crate::plots;
use crate::report::{spectrum_csv, Report};
use crate::synthetic::generate_synthetic;

/// Create the artifact directory; an existing path is a collision error.
pub fn prepare_output(dir: &Path) -> Result<()> {
    if dir.exists() {
        return Err(CliError::Config(format!(
            "output directory {} already exists",
            dir.display()
        )));
    }
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Interpret a tensor file as a snapshot tensor (order 3 to 5 expected; a
/// 2-D file becomes a single-component tensor with one spatial axis).
/// Gappy files are only meaningful to `repair gappy`.
fn as_tensor(tf: &TensorFile, dt: f64) -> Result<SnapshotTensor> {
    if tf.gappy {
        return Err(CliError::Config(
            "input is flagged gappy; run `repair gappy` before analysing it".into(),
        ));
    }
    let shape = &tf.shape;
    match shape.len() {
        2 => SnapshotTensor::new(1, vec![shape[0]], shape[1], dt, tf.data.clone())
            .map_err(CliError::from),
        3..=5 => {
            let components = shape[0];
            let space = shape[1..shape.len() - 1].to_vec();
            let times = shape[shape.len() - 1];
            SnapshotTensor::new(components, space, times, dt, tf.data.clone())
                .map_err(CliError::from)
        }
        n => Err(CliError::MalformedFile(format!(
            "expected a 2-D to 5-D tensor, file has {n} axes"
        ))),
    }
}

/// Flatten any input file to a snapshot matrix.
fn as_matrix(tf: &TensorFile, dt: f64) -> Result<SnapshotMatrix> {
    if tf.gappy {
        return Err(CliError::Config(
            "input is flagged gappy; run `repair gappy` before analysing it".into(),
        ));
    }
    if tf.shape.len() == 2 {
        let (j, k) = (tf.shape[0], tf.shape[1]);
        let m = DMatrix::from_fn(j, k, |r, c| tf.data[r * k + c]);
        SnapshotMatrix::new(m, dt).map_err(CliError::from)
    } else {
        Ok(as_tensor(tf, dt)?.to_matrix())
    }
}

fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let (r, c) = m.shape();
    let data: Vec<f64> = (0..r * c).map(|i| m[(i / c, i % c)]).collect();
    TensorFile::new(vec![r, c], data, false)?.write(path)
}

fn write_tensor(path: &Path, t: &SnapshotTensor) -> Result<()> {
    TensorFile::new(t.shape().to_vec(), t.array().data().to_vec(), false)?.write(path)
}

fn parse_scale_kind(s: &str) -> Result<ScaleKind> {
    ScaleKind::parse(s).ok_or_else(|| CliError::Config(format!("unknown scaling kind '{s}'")))
}

fn parse_activation(s: &str) -> Result<Activation> {
    Activation::parse(s).ok_or_else(|| CliError::Config(format!("unknown activation '{s}'")))
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

pub fn decompose_svd(input: &Path, config: Option<&Path>, out: &Path, plots_on: bool) -> Result<()> {
    let cfg: SvdRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let m = as_matrix(&tf, cfg.dt)?;
    prepare_output(out)?;
    let factors = decompose::svd_truncated(&m, cfg.tolerance, cfg.max_rank)?;
    let pod = decompose::pod_expansion(&factors);
    write_matrix(&out.join("spatial_modes.mft"), &factors.w)?;
    write_matrix(&out.join("temporal_modes.mft"), &factors.t)?;
    write_matrix(
        &out.join("singular_values.mft"),
        &DMatrix::from_fn(factors.rank, 1, |i, _| factors.sigma[i]),
    )?;
    write_matrix(&out.join("pod_coefficients.mft"), &pod.coefficients)?;
    let recon_err = rrmse_mat(m.data(), &factors.reconstruct())?;
    let mut report = Report::new("decompose svd", &cfg);
    report.set("ranks", vec![factors.rank]);
    report.set("rrmse", recon_err);
    report.set(
        "singular_values",
        factors.sigma.iter().copied().collect::<Vec<f64>>(),
    );
    if plots_on && tf.shape.len() >= 3 {
        let rows = tf.shape[1];
        let cols: usize = tf.shape[2..tf.shape.len() - 1].iter().product::<usize>().max(1);
        let field: Vec<f64> = (0..rows * cols).map(|i| factors.w[(i, 0)]).collect();
        std::fs::write(out.join("mode0.svg"), plots::heatmap_svg(rows, cols, &field))?;
    }
    report.write(out)
}

pub fn decompose_hosvd(
    input: &Path,
    config: Option<&Path>,
    out: &Path,
    _plots_on: bool,
) -> Result<()> {
    let cfg: HosvdRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let t = as_tensor(&tf, cfg.dt)?;
    if t.order() < 3 {
        return Err(CliError::Config("hosvd needs a tensor input".into()));
    }
    prepare_output(out)?;
    let tols = match &cfg.per_axis {
        Some(v) => AxisTols::PerAxis(v.clone()),
        None => AxisTols::Shared(cfg.tolerance),
    };
    let f = decompose::hosvd(&t, &tols)?;
    TensorFile::new(f.core.shape().to_vec(), f.core.data().to_vec(), false)?
        .write(&out.join("core.mft"))?;
    for (axis, w) in f.factor_matrices.iter().enumerate() {
        write_matrix(&out.join(format!("factor_axis{axis}.mft")), w)?;
    }
    let recon = f.reconstruct()?;
    let err = romkit_core::metrics::rrmse_slice(t.array().data(), recon.data())?;
    let mut report = Report::new("decompose hosvd", &cfg);
    report.set("ranks", f.ranks.clone());
    report.set("rrmse", err);
    report.set("singular_values", f.singular_value_sets.clone());
    report.write(out)
}

fn expansion_artifacts(
    e: &DmdExpansion,
    out: &Path,
    report: &mut Report,
    plots_on: bool,
) -> Result<()> {
    let rows = hodmd::dmd_spectrum_report(e);
    std::fs::write(out.join("spectrum.csv"), spectrum_csv(&rows))?;
    let j = e.modes.first().map(|m| m.spatial_mode.len()).unwrap_or(0);
    let m_count = e.modes.len();
    let mut re = DMatrix::<f64>::zeros(j, m_count);
    let mut im = DMatrix::<f64>::zeros(j, m_count);
    for (c, mode) in e.modes.iter().enumerate() {
        for r in 0..j {
            re[(r, c)] = mode.spatial_mode[r].re;
            im[(r, c)] = mode.spatial_mode[r].im;
        }
    }
    write_matrix(&out.join("modes_real.mft"), &re)?;
    write_matrix(&out.join("modes_imag.mft"), &im)?;
    report.set("ranks", vec![e.spatial_rank, e.enlarged_rank, e.spectral_count]);
    report.set("rrmse", e.recon_rrmse);
    report.set(
        "mode_table",
        rows.iter()
            .map(|r| {
                serde_json::json!({
                    "omega": r.omega,
                    "delta": r.delta,
                    "amplitude": r.amplitude,
                })
            })
            .collect::<Vec<_>>(),
    );
    report.warn_all(&e.warnings);
    if plots_on {
        std::fs::write(out.join("spectrum.svg"), plots::spectrum_svg(&rows))?;
    }
    Ok(())
}

pub fn decompose_hodmd(
    input: &Path,
    config: Option<&Path>,
    out: &Path,
    plots_on: bool,
) -> Result<()> {
    let cfg: HodmdRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let m = as_matrix(&tf, cfg.dt)?;
    prepare_output(out)?;
    let e = hodmd::hodmd(&m, cfg.d, cfg.eps_svd, cfg.eps_amp)?;
    let mut report = Report::new("decompose hodmd", &cfg);
    expansion_artifacts(&e, out, &mut report, plots_on)?;
    report.write(out)
}

pub fn decompose_mdhodmd(
    input: &Path,
    config: Option<&Path>,
    out: &Path,
    plots_on: bool,
) -> Result<()> {
    let cfg: HodmdRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let t = as_tensor(&tf, cfg.dt)?;
    prepare_output(out)?;
    let tols = match &cfg.per_axis {
        Some(v) => AxisTols::PerAxis(v.clone()),
        None => AxisTols::Shared(cfg.eps_svd),
    };
    let mut report = Report::new("decompose mdhodmd", &cfg);
    let e = if cfg.iterative {
        let (e, iters) = hodmd::mdhodmd_iterative(&t, cfg.d, &tols, cfg.eps_amp, cfg.max_iters)?;
        report.set("iterations", iters);
        e
    } else {
        hodmd::mdhodmd(&t, cfg.d, &tols, cfg.eps_amp)?
    };
    expansion_artifacts(&e, out, &mut report, plots_on)?;
    report.write(out)
}

// ---------------------------------------------------------------------------
// repair / superres
// ---------------------------------------------------------------------------

pub fn repair_gappy(input: &Path, config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg: GappyRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let init = InitFill::parse(&cfg.init)
        .ok_or_else(|| CliError::Config(format!("unknown init fill '{}'", cfg.init)))?;
    prepare_output(out)?;
    let gcfg = GappyConfig {
        init_fill: init,
        rank: cfg.rank,
        tol_gaps: cfg.tol_gaps,
        max_iters: cfg.max_iters,
    };
    let mut report = Report::new("repair gappy", &cfg);

    if tf.shape.len() == 2 {
        // Single 2-D field.
        let (n1, n2) = (tf.shape[0], tf.shape[1]);
        let mask_vec: Vec<bool> = tf.data.iter().map(|x| x.is_nan()).collect();
        let mask = romkit_core::tensor::GapMask::from_vec(vec![n1, n2], mask_vec)?;
        let clean: Vec<f64> = tf
            .data
            .iter()
            .map(|x| if x.is_nan() { 0.0 } else { *x })
            .collect();
        let field = DMatrix::from_fn(n1, n2, |r, c| clean[r * n2 + c]);
        let outcome = repair::gappy_svd(&field, &mask, &gcfg)?;
        write_matrix(&out.join("repaired.mft"), &outcome.repaired)?;
        finish_gappy_report(&mut report, outcome.converged, &outcome.trace, mask.gap_fraction());
    } else {
        let components = tf.shape[0];
        let space = tf.shape[1..tf.shape.len() - 1].to_vec();
        let times = tf.shape[tf.shape.len() - 1];
        let (tensor, mask) =
            SnapshotTensor::from_nan_data(components, space, times, cfg.dt, tf.data.clone())?;
        let ranks: Vec<usize> = match &cfg.per_axis_ranks {
            Some(r) => {
                if r.len() != tensor.order() {
                    return Err(CliError::Config(format!(
                        "{} per-axis ranks for an order-{} tensor",
                        r.len(),
                        tensor.order()
                    )));
                }
                r.clone()
            }
            None => tensor
                .shape()
                .iter()
                .map(|&d| cfg.rank.min(d))
                .collect(),
        };
        let outcome = repair::gappy_hosvd(&tensor, &mask, &ranks, &gcfg)?;
        write_tensor(&out.join("repaired.mft"), &outcome.repaired)?;
        finish_gappy_report(&mut report, outcome.converged, &outcome.trace, mask.gap_fraction());
    }
    report.write(out)
}

fn finish_gappy_report(
    report: &mut Report,
    converged: bool,
    trace: &repair::IterationTrace,
    gap_fraction: f64,
) {
    report.set("converged", converged);
    report.set("iterations", trace.mse_gaps.len());
    report.set("gap_fraction", gap_fraction);
    report.set("mse_gaps", trace.mse_gaps.clone());
    report.set("rmse_gaps", trace.rmse_gaps.clone());
    if !converged {
        report.warn("gap update did not reach tol_gaps before max_iters");
    }
}

pub fn superres(input: &Path, config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg: SuperresRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    if tf.gappy {
        return Err(CliError::Config(
            "input is flagged gappy; run `repair gappy` before enlarging it".into(),
        ));
    }
    let interp = Interp::parse(&cfg.interp)
        .ok_or_else(|| CliError::Config(format!("unknown interpolation '{}'", cfg.interp)))?;
    let temporal = match cfg.temporal.as_str() {
        "hold" => TemporalMode::Hold,
        "enlarge" => TemporalMode::Enlarge,
        other => {
            return Err(CliError::Config(format!(
                "temporal mode must be 'hold' or 'enlarge', got '{other}'"
            )))
        }
    };
    prepare_output(out)?;
    let scfg = SuperResConfig {
        doublings: cfg.doublings,
        rank: cfg.rank,
        interp,
        temporal_mode: temporal,
    };
    let mut report = Report::new("superres", &cfg);
    if tf.shape.len() == 2 {
        let (n1, n2) = (tf.shape[0], tf.shape[1]);
        let field = DMatrix::from_fn(n1, n2, |r, c| tf.data[r * n2 + c]);
        let (enlarged, warnings) = repair::superres_svd(&field, &scfg)?;
        write_matrix(&out.join("enlarged.mft"), &enlarged)?;
        report.set("output_shape", vec![enlarged.nrows(), enlarged.ncols()]);
        report.warn_all(&warnings);
    } else {
        let t = as_tensor(&tf, cfg.dt)?;
        let (enlarged, warnings) = repair::superres_hosvd(&t, &scfg)?;
        write_tensor(&out.join("enlarged.mft"), &enlarged)?;
        report.set("output_shape", enlarged.shape().to_vec());
        report.warn_all(&warnings);
    }
    report.write(out)
}

// ---------------------------------------------------------------------------
// forecast
// ---------------------------------------------------------------------------

pub fn forecast_dmd(input: &Path, config: Option<&Path>, out: &Path, plots_on: bool) -> Result<()> {
    let cfg: ForecastDmdRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let m = as_matrix(&tf, cfg.dt)?;
    prepare_output(out)?;
    let e = hodmd::hodmd(&m, cfg.d, cfg.eps_svd, cfg.eps_amp)?;
    let start = cfg
        .start_time
        .unwrap_or_else(|| m.times() as f64 * cfg.dt);
    let times: Vec<f64> = (0..cfg.horizon)
        .map(|i| start + i as f64 * cfg.dt)
        .collect();
    let forecast = hodmd::dmd_forecast(&e, cfg.eps_perm, cfg.freeze_growth, &times)?;
    write_matrix(&out.join("forecast.mft"), forecast.data())?;
    let mut report = Report::new("forecast dmd", &cfg);
    let permanent = e
        .modes
        .iter()
        .filter(|md| md.growth_rate.abs() < cfg.eps_perm)
        .count();
    report.set("permanent_modes", permanent);
    report.set("start_time", start);
    expansion_artifacts(&e, out, &mut report, plots_on)?;
    report.write(out)
}

pub fn forecast_nn(input: &Path, config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg: ForecastNnRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let t = as_tensor(&tf, cfg.dt)?;
    prepare_output(out)?;
    let framework = match cfg.framework.as_str() {
        "hybrid_dl" => Framework::HybridDl,
        "fully_dl" => Framework::FullyDl,
        other => {
            return Err(CliError::Config(format!(
                "framework must be 'hybrid_dl' or 'fully_dl', got '{other}'"
            )))
        }
    };
    let model = match cfg.model.as_str() {
        "rnn" => ModelKind::Rnn,
        "cnn" => ModelKind::Cnn,
        other => {
            return Err(CliError::Config(format!(
                "model must be 'rnn' or 'cnn', got '{other}'"
            )))
        }
    };
    let first = match parse_scale_kind(&cfg.first_scaling)? {
        ScaleKind::None if !cfg.centering => None,
        kind => Some(ScalingStep {
            kind,
            centering: cfg.centering,
        }),
    };
    let second = match parse_scale_kind(&cfg.second_scaling)? {
        ScaleKind::None => None,
        kind => Some(kind),
    };
    let loss = match cfg.loss.as_str() {
        "mse" => Loss::Mse,
        "pa_mse" => Loss::PaMse {
            weight: cfg.pa_weight,
        },
        other => {
            return Err(CliError::Config(format!(
                "loss must be 'mse' or 'pa_mse', got '{other}'"
            )))
        }
    };
    let test_fraction = 1.0 - cfg.train_fraction - cfg.val_fraction;
    let split = Split::new(cfg.train_fraction, cfg.val_fraction, test_fraction)
        .map_err(CliError::from)?;
    let rom_cfg = ForecastRomConfig {
        framework,
        model,
        svd_rank: cfg.svd_rank,
        first_scaling: first,
        second_scaling: second,
        q: cfg.q,
        p: cfg.p,
        neurons: cfg.neurons,
        hidden_activation: parse_activation(&cfg.hidden_activation)?,
        output_activation: parse_activation(&cfg.output_activation)?,
        loss,
        train: TrainOptions {
            learning_rate: cfg.learning_rate,
            batch: cfg.batch,
            epochs: cfg.epochs,
            patience: cfg.patience,
            split,
        },
        seed: cfg.seed,
    };
    let outcome = forecast_rom(&t, &rom_cfg)?;
    // Predictions reshaped to the input's tensor layout.
    let pred_t = outcome
        .predicted
        .to_tensor(t.components(), t.space_dims())
        .map_err(CliError::from)?;
    write_tensor(&out.join("prediction.mft"), &pred_t)?;
    if let Some(model) = &outcome.model {
        std::fs::write(out.join("model.mfnn"), checkpoint::save_model(model))?;
    }
    let mut report = Report::new("forecast nn", &cfg);
    report.set("rrmse", outcome.rrmse);
    report.set("per_snapshot_rrmse", outcome.per_snapshot_rrmse.clone());
    report.set("test_start", outcome.test_start);
    if let Some(model) = &outcome.model {
        report.set("best_epoch", model.best_epoch);
        report.set("epochs_run", model.history.len());
    }
    report.write(out)
}

// ---------------------------------------------------------------------------
// reconstruct / autoencode
// ---------------------------------------------------------------------------

pub fn reconstruct_nn(input: &Path, config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg: ReconstructRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let t = as_tensor(&tf, cfg.dt)?;
    prepare_output(out)?;
    let test_fraction = 1.0 - cfg.train_fraction - cfg.val_fraction;
    let split = Split::new(cfg.train_fraction, cfg.val_fraction, test_fraction)
        .map_err(CliError::from)?;
    let rcfg = ReconstructionConfig {
        rank: cfg.rank,
        decoder_layers: cfg.decoder_layers,
        neurons: cfg.neurons,
        activation: parse_activation(&cfg.activation)?,
        learning_rate: cfg.learning_rate,
        batch: cfg.batch,
        epochs: cfg.epochs,
        patience: cfg.patience,
        split,
        seed: cfg.seed,
    };
    let ds = downsample(&t, &cfg.strides)?;
    write_tensor(&out.join("downsampled.mft"), &ds)?;
    let outcome = reconstruct_from_sensors(&t, &cfg.strides, &rcfg)?;
    write_tensor(&out.join("reconstructed.mft"), &outcome.reconstructed)?;
    let mut report = Report::new("reconstruct nn", &cfg);
    report.set("rrmse", outcome.rrmse);
    report.set("per_snapshot_rrmse", outcome.per_snapshot_rrmse.clone());
    report.set("test_start", outcome.test_start);
    report.set("epochs_run", outcome.history.len());
    report.write(out)
}

pub fn autoencode(input: &Path, config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg: AutoencodeRunConfig = load_config(config)?;
    let tf = TensorFile::read(input)?;
    let m = as_matrix(&tf, cfg.dt)?;
    prepare_output(out)?;
    let acfg = AeConfig {
        encoding_dim: cfg.modes,
        hidden: cfg.hidden.clone(),
        activation: parse_activation(&cfg.activation)?,
        train_fraction: cfg.train_fraction,
        batch: cfg.batch,
        epochs: cfg.epochs,
        learning_rate: cfg.learning_rate,
        seed: cfg.seed,
    };
    let outcome = ae_identify_patterns(&m, &acfg)?;
    write_matrix(&out.join("patterns.mft"), &outcome.patterns)?;
    write_matrix(&out.join("reconstruction.mft"), &outcome.reconstruction)?;
    std::fs::write(out.join("model.mfnn"), checkpoint::save_model(&outcome.model))?;
    let mut report = Report::new("autoencode", &cfg);
    report.set("rrmse", outcome.rrmse);
    report.set("ranked_units", outcome.ranked_units.clone());
    report.set("unit_rrmse", outcome.unit_rrmse.clone());
    report.set("best_epoch", outcome.model.best_epoch);
    report.write(out)
}

// ---------------------------------------------------------------------------
// generate / import / info
// ---------------------------------------------------------------------------

pub fn generate(
    config: Option<&Path>,
    out: &Path,
    mode_count: Option<usize>,
) -> Result<()> {
    let mut cfg: GenerateRunConfig = load_config(config)?;
    if let Some(n) = mode_count {
        if !cfg.modes.is_empty() {
            return Err(CliError::Config(
                "--modes conflicts with an explicit mode list in the config".into(),
            ));
        }
        cfg.mode_count = n;
    }
    prepare_output(out)?;
    let (tensor, manifest) = generate_synthetic(&cfg)?;
    write_tensor(&out.join("data.mft"), &tensor)?;
    std::fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    let mut report = Report::new("generate synthetic", &cfg);
    report.set("shape", tensor.shape().to_vec());
    report.set("mode_count", manifest.modes.len());
    report.write(out)
}

pub fn import_csv_file(
    input: &Path,
    shape: Option<Vec<usize>>,
    output: &Path,
) -> Result<()> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", input.display())))?;
    let tf = crate::format::import_csv(&text, shape)?;
    tf.write(output)?;
    println!(
        "wrote {} (shape {:?}, gappy: {})",
        output.display(),
        tf.shape,
        tf.gappy
    );
    Ok(())
}

pub fn info(input: &Path) -> Result<()> {
    let tf = TensorFile::read(input)?;
    let finite: Vec<f64> = tf.data.iter().copied().filter(|x| x.is_finite()).collect();
    let nan_count = tf.data.len() - finite.len();
    let (min, max) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    let mean = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
    println!("shape: {:?}", tf.shape);
    println!("dtype: float64{}", if tf.gappy { " (gappy)" } else { "" });
    println!("entries: {} ({} NaN)", tf.data.len(), nan_count);
    if !finite.is_empty() {
        println!("min/mean/max: {min:.6e} / {mean:.6e} / {max:.6e}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_collision_is_config_error() {
        let dir = std::env::temp_dir().join(format!("romkit-collide-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let err = prepare_output(&dir).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn as_tensor_classifies_shapes() {
        let tf = TensorFile::new(vec![2, 3, 4], vec![0.5; 24], false).unwrap();
        let t = as_tensor(&tf, 1.0).unwrap();
        assert_eq!(t.components(), 2);
        assert_eq!(t.space_dims(), &[3]);
        assert_eq!(t.times(), 4);
        let bad = TensorFile::new(vec![2; 6], vec![0.0; 64], false).unwrap();
        assert!(as_tensor(&bad, 1.0).is_err());
    }
}
