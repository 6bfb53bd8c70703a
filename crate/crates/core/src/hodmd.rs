//! High-order dynamic mode decomposition (DMD-d), its multidimensional and
//! iterative variants, and DMD-based extrapolation.
//!
//! The data is approximated by the expansion
//!
//! `v(t_k) ~ sum_m a_m u_m exp((delta_m + i omega_m) t_k)`
//!
//! with non-negative amplitudes `a_m`, unit-norm complex spatial modes `u_m`,
//! growth rates `delta_m` and angular frequencies `omega_m`. Times are
//! measured from the first training snapshot (`t_k = k * dt`).
//!
//! The fit proceeds in two steps. Step 1 reduces the snapshot matrix with a
//! truncated SVD. Step 2 stacks `d` time-delayed copies of the reduced
//! matrix, reduces again, fits the one-step operator by least squares on the
//! delay-reduced coefficients, and solves its eigenproblem; eigenvalues map
//! to `(delta, omega)` through the principal logarithm and amplitudes follow
//! from a least-squares fit over every snapshot with unit-norm modes. Modes
//! are sorted by amplitude and truncated at `a_{M+1}/a_1 < eps_amp`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::decompose::{self, AxisTols};
use crate::linalg;
use crate::metrics::rrmse_mat;
use crate::tensor::{SnapshotMatrix, SnapshotTensor};
use crate::{CoreError, Result};

/// One term of the DMD expansion.
#[derive(Clone, Debug)]
pub struct DmdMode {
    /// Non-negative amplitude.
    pub amplitude: f64,
    /// Angular frequency `omega` (rad / time unit).
    pub frequency: f64,
    /// Growth rate `delta` (1 / time unit).
    pub growth_rate: f64,
    /// Unit-norm complex spatial mode.
    pub spatial_mode: DVector<Complex64>,
}

/// Full DMD expansion with its bookkeeping.
#[derive(Clone, Debug)]
pub struct DmdExpansion {
    /// Modes sorted by descending amplitude.
    pub modes: Vec<DmdMode>,
    /// Delay parameter `d`.
    pub d: usize,
    /// SVD tolerance used in both reduction steps.
    pub eps_svd: f64,
    /// Amplitude truncation tolerance.
    pub eps_amp: f64,
    /// Spatial complexity `N` (rank of the first reduction).
    pub spatial_rank: usize,
    /// Enlarged rank `N'` (rank of the delay-stacked reduction).
    pub enlarged_rank: usize,
    /// Spectral complexity `M` = number of retained modes.
    pub spectral_count: usize,
    /// Snapshot spacing.
    pub dt: f64,
    /// RRMSE of the expansion over the training window.
    pub recon_rrmse: f64,
    pub warnings: Vec<String>,
}

impl DmdExpansion {
    /// Evaluate the expansion at arbitrary times (measured from the first
    /// training snapshot), returning the complex field.
    fn evaluate_complex(&self, times: &[f64]) -> DMatrix<Complex64> {
        let j = self
            .modes
            .first()
            .map(|m| m.spatial_mode.len())
            .unwrap_or(0);
        let mut out = DMatrix::<Complex64>::zeros(j, times.len());
        for mode in &self.modes {
            for (c, &t) in times.iter().enumerate() {
                let z = Complex64::new(mode.growth_rate * t, mode.frequency * t).exp()
                    * mode.amplitude;
                for r in 0..j {
                    out[(r, c)] += mode.spatial_mode[r] * z;
                }
            }
        }
        out
    }

    /// Real part of the expansion at the given times.
    pub fn evaluate(&self, times: &[f64]) -> DMatrix<f64> {
        self.evaluate_complex(times).map(|z| z.re)
    }

    /// Times of the training snapshots.
    pub fn training_times(&self, count: usize) -> Vec<f64> {
        (0..count).map(|k| k as f64 * self.dt).collect()
    }
}

/// One row of the spectrum report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumRow {
    pub omega: f64,
    pub delta: f64,
    pub amplitude: f64,
}

/// Tabular spectrum, ordered by descending amplitude (ties by frequency).
pub fn dmd_spectrum_report(e: &DmdExpansion) -> Vec<SpectrumRow> {
    let mut rows: Vec<SpectrumRow> = e
        .modes
        .iter()
        .map(|m| SpectrumRow {
            omega: m.frequency,
            delta: m.growth_rate,
            amplitude: m.amplitude,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.amplitude
            .partial_cmp(&a.amplitude)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.omega.partial_cmp(&b.omega).unwrap_or(std::cmp::Ordering::Equal))
    });
    rows
}

/// High-order DMD of a snapshot matrix.
pub fn hodmd(m: &SnapshotMatrix, d: usize, eps_svd: f64, eps_amp: f64) -> Result<DmdExpansion> {
    let factors = decompose::svd_truncated(m, eps_svd, None)?;
    let reduced = decompose::reduced_from_factors(&factors, m.dt());
    hodmd_from_reduced(
        &reduced.data,
        &reduced.parent_w,
        d,
        eps_svd,
        eps_amp,
        m.dt(),
        Some(m.data()),
    )
}

/// Multidimensional HODMD: HOSVD first, then the delay-stacked DMD step on
/// the temporal-mode matrix, with spatial modes lifted through the HOSVD
/// spatial basis.
pub fn mdhodmd(
    t: &SnapshotTensor,
    d: usize,
    tols: &AxisTols,
    eps_amp: f64,
) -> Result<DmdExpansion> {
    let (expansion, _ranks) = mdhodmd_with_ranks(t, d, tols, eps_amp)?;
    Ok(expansion)
}

fn mdhodmd_with_ranks(
    t: &SnapshotTensor,
    d: usize,
    tols: &AxisTols,
    eps_amp: f64,
) -> Result<(DmdExpansion, Vec<usize>)> {
    let factors = decompose::hosvd(t, tols)?;
    let modes = decompose::hosvd_spatial_temporal_modes(&factors)?;
    // Reduced snapshot matrix for the DMD step: temporal modes, one column
    // per snapshot.
    let vhat = modes.temporal.transpose();
    let time_tol = tols_last(tols, t.order())?;
    let m = t.to_matrix();
    let expansion = hodmd_from_reduced(
        &vhat,
        &modes.spatial,
        d,
        time_tol,
        eps_amp,
        t.dt(),
        Some(m.data()),
    )?;
    Ok((expansion, factors.ranks))
}

fn tols_last(tols: &AxisTols, order: usize) -> Result<f64> {
    match tols {
        AxisTols::Shared(t) => Ok(*t),
        AxisTols::PerAxis(v) => {
            if v.len() != order {
                return Err(CoreError::InvalidArgument(format!(
                    "{} per-axis tolerances for an order-{order} tensor",
                    v.len()
                )));
            }
            Ok(v[order - 1])
        }
    }
}

/// Iterative multidimensional HODMD: re-decompose the reconstructed data with
/// the same tolerances until the per-axis HOSVD rank vector repeats across
/// two consecutive iterations (or `max_iters` is hit, flagged in warnings).
pub fn mdhodmd_iterative(
    t: &SnapshotTensor,
    d: usize,
    tols: &AxisTols,
    eps_amp: f64,
    max_iters: usize,
) -> Result<(DmdExpansion, usize)> {
    let k = t.times();
    let (mut expansion, mut ranks) = mdhodmd_with_ranks(t, d, tols, eps_amp)?;
    let times: Vec<f64> = (0..k).map(|i| i as f64 * t.dt()).collect();
    for iter in 1..=max_iters.max(1) {
        let rec = expansion.evaluate(&times);
        let rec_m = SnapshotMatrix::new(rec, t.dt())?;
        let rec_t = rec_m.to_tensor(t.components(), t.space_dims())?;
        let (next, next_ranks) = mdhodmd_with_ranks(&rec_t, d, tols, eps_amp)?;
        let stable = next_ranks == ranks;
        expansion = next;
        ranks = next_ranks;
        if stable {
            return Ok((expansion, iter));
        }
    }
    expansion
        .warnings
        .push(format!("rank vector still changing after {max_iters} iterations"));
    Ok((expansion, max_iters))
}

/// DMD-based forecast: keep the modes with `|delta| < eps_perm`, optionally
/// freeze their growth rates to zero, and evaluate the expansion at `times`
/// (which may extend far beyond the training window).
pub fn dmd_forecast(
    e: &DmdExpansion,
    eps_perm: f64,
    freeze_growth: bool,
    times: &[f64],
) -> Result<SnapshotMatrix> {
    if !(eps_perm > 0.0) {
        return Err(CoreError::InvalidArgument(format!(
            "growth-rate filter must be positive, got {eps_perm}"
        )));
    }
    let kept: Vec<DmdMode> = e
        .modes
        .iter()
        .filter(|m| m.growth_rate.abs() < eps_perm)
        .map(|m| {
            let mut mode = m.clone();
            if freeze_growth {
                mode.growth_rate = 0.0;
            }
            mode
        })
        .collect();
    if kept.is_empty() {
        let mut nearest: Vec<f64> = e.modes.iter().map(|m| m.growth_rate).collect();
        nearest.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(std::cmp::Ordering::Equal));
        nearest.truncate(3);
        return Err(CoreError::EmptyModeSet {
            threshold: eps_perm,
            nearest,
        });
    }
    let filtered = DmdExpansion {
        modes: kept,
        ..e.clone()
    };
    let complex = filtered.evaluate_complex(times);
    let re_norm: f64 = complex.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
    let im_norm: f64 = complex.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
    if re_norm > 0.0 && im_norm > 1e-8 * re_norm {
        return Err(CoreError::ImaginaryResidue {
            residue: im_norm / re_norm,
            limit: 1e-8,
        });
    }
    SnapshotMatrix::new(complex.map(|z| z.re), e.dt)
}

/// The delay-stacked DMD step on an already reduced matrix.
///
/// `vhat` is `N x K` (one column per snapshot), `lift` is the `J x N` basis
/// mapping reduced coefficients back to physical space. `original`, when
/// given, is used for the training-window RRMSE.
pub fn hodmd_from_reduced(
    vhat: &DMatrix<f64>,
    lift: &DMatrix<f64>,
    d: usize,
    eps_svd: f64,
    eps_amp: f64,
    dt: f64,
    original: Option<&DMatrix<f64>>,
) -> Result<DmdExpansion> {
    let (n, k) = vhat.shape();
    if d == 0 {
        return Err(CoreError::InvalidArgument("delay parameter d must be >= 1".into()));
    }
    if k <= d {
        return Err(CoreError::InvalidArgument(format!(
            "need more snapshots ({k}) than delays ({d})"
        )));
    }
    if !(eps_amp >= 0.0) {
        return Err(CoreError::InvalidArgument("eps_amp must be non-negative".into()));
    }
    let mut warnings = Vec::new();
    let kf = k as f64;
    if (d as f64) < kf / 10.0 || (d as f64) > kf / 2.0 {
        warnings.push(format!(
            "d = {d} outside the recommended window [K/10, K/2] = [{:.1}, {:.1}]",
            kf / 10.0,
            kf / 2.0
        ));
    }

    // Modified (delay-stacked) snapshot matrix: d blocks of K-d+1 columns.
    let l = k - d + 1;
    let mut tilde = DMatrix::<f64>::zeros(d * n, l);
    for block in 0..d {
        for col in 0..l {
            for row in 0..n {
                tilde[(block * n + row, col)] = vhat[(row, block + col)];
            }
        }
    }

    // Second dimension reduction on the stacked matrix.
    let svd = linalg::truncated_svd(&tilde, eps_svd, None)?;
    if svd.sigma[0] <= 0.0 {
        return Err(CoreError::RankZero("delay-stacked matrix".into()));
    }
    let n_prime = svd.rank();
    // Reduced modified snapshots hatT = Sigma T^T.
    let mut hat_t = svd.v.transpose();
    for i in 0..n_prime {
        hat_t.row_mut(i).scale_mut(svd.sigma[i]);
    }

    // One-step operator on the reduced modified snapshots.
    let past = hat_t.columns(0, l - 1).into_owned();
    let future = hat_t.columns(1, l - 1).into_owned();
    let koopman = linalg::fit_operator(&future, &past, 1e-13)?;

    let (mu, vectors) = linalg::eig_complex(&koopman)?;

    // Map eigenvalues to growth rates and frequencies; lift the eigenvectors
    // back through the first delay block.
    let u_head = svd.u.rows(0, n).into_owned();
    let u_head_c: DMatrix<Complex64> = u_head.map(|x| Complex64::new(x, 0.0));
    let mu_max = mu.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let mut raw_modes: Vec<(Complex64, DVector<Complex64>)> = Vec::new();
    for (lambda, q) in mu.iter().zip(vectors) {
        if lambda.norm() <= 1e-12 * mu_max {
            warnings.push(format!(
                "discarded eigenvalue of magnitude {:.3e}: logarithm undefined",
                lambda.norm()
            ));
            continue;
        }
        let mode = &u_head_c * q;
        let norm = mode.norm();
        if norm <= 1e-12 {
            warnings.push("discarded eigenvector orthogonal to the leading delay block".into());
            continue;
        }
        raw_modes.push((*lambda, mode / Complex64::new(norm, 0.0)));
    }
    if raw_modes.is_empty() {
        return Err(CoreError::DefectiveEigenproblem(
            "no usable eigenvalues in the Koopman spectrum".into(),
        ));
    }

    // Amplitudes: least squares over all K snapshots, exploiting the
    // separable structure of the design matrix (Gram = mode Gram Hadamard
    // Vandermonde Gram).
    let m_count = raw_modes.len();
    let vhat_c: DMatrix<Complex64> = vhat.map(|x| Complex64::new(x, 0.0));
    let mut powers: Vec<Vec<Complex64>> = Vec::with_capacity(m_count);
    for (lambda, _) in &raw_modes {
        let mut pw = Vec::with_capacity(k);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..k {
            pw.push(acc);
            acc *= lambda;
        }
        powers.push(pw);
    }
    let mut gram = DMatrix::<Complex64>::zeros(m_count, m_count);
    let mut rhs = DVector::<Complex64>::zeros(m_count);
    for a in 0..m_count {
        for b in 0..m_count {
            let mode_dot = raw_modes[a].1.dotc(&raw_modes[b].1);
            let mut tsum = Complex64::new(0.0, 0.0);
            for kk in 0..k {
                tsum += powers[a][kk].conj() * powers[b][kk];
            }
            gram[(a, b)] = mode_dot * tsum;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for kk in 0..k {
            let proj = raw_modes[a].1.dotc(&vhat_c.column(kk).into_owned());
            acc += powers[a][kk].conj() * proj;
        }
        rhs[a] = acc;
    }
    let alphas = linalg::solve_complex(&gram, &rhs)?;

    // Assemble modes in physical space with real non-negative amplitudes.
    let lift_c: DMatrix<Complex64> = lift.map(|x| Complex64::new(x, 0.0));
    let mut modes: Vec<DmdMode> = Vec::with_capacity(m_count);
    for (i, (lambda, reduced_mode)) in raw_modes.iter().enumerate() {
        let alpha = alphas[i];
        let amplitude = alpha.norm();
        let mut spatial = &lift_c * reduced_mode;
        if amplitude > 0.0 {
            let phase = alpha / Complex64::new(amplitude, 0.0);
            spatial *= phase;
        }
        modes.push(DmdMode {
            amplitude,
            frequency: lambda.arg() / dt,
            growth_rate: lambda.norm().ln() / dt,
            spatial_mode: spatial,
        });
    }
    modes.sort_by(|a, b| {
        b.amplitude
            .partial_cmp(&a.amplitude)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.frequency.partial_cmp(&b.frequency).unwrap_or(std::cmp::Ordering::Equal))
    });

    // Amplitude truncation: keep modes with a_m / a_1 >= eps_amp.
    let a1 = modes.first().map(|m| m.amplitude).unwrap_or(0.0);
    if a1 <= 0.0 {
        return Err(CoreError::RankZero("amplitude spectrum".into()));
    }
    let spectral_count = modes
        .iter()
        .take_while(|m| m.amplitude / a1 >= eps_amp)
        .count()
        .max(1);
    modes.truncate(spectral_count);

    let mut expansion = DmdExpansion {
        modes,
        d,
        eps_svd,
        eps_amp,
        spatial_rank: n,
        enlarged_rank: n_prime,
        spectral_count,
        dt,
        recon_rrmse: 0.0,
        warnings,
    };
    if let Some(orig) = original {
        let times: Vec<f64> = (0..k).map(|i| i as f64 * dt).collect();
        let rec = expansion.evaluate(&times);
        expansion.recon_rrmse = rrmse_mat(orig, &rec)?;
    }
    Ok(expansion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    /// Build a snapshot matrix directly from the DMD expansion formula with
    /// random orthonormal spatial profiles: the test oracle for recovery.
    struct Synthetic {
        matrix: SnapshotMatrix,
        // One entry per conjugate pair: (amplitude, omega, delta).
        pairs: Vec<(f64, f64, f64)>,
    }

    fn synth(seed: u64, j: usize, k: usize, dt: f64, pairs: &[(f64, f64, f64)]) -> Synthetic {
        let mut rng = Rng::seed_from(seed);
        let raw = DMatrix::from_fn(j, 2 * pairs.len(), |_, _| rng.normal());
        let q = raw.qr().q();
        let mut data = DMatrix::<f64>::zeros(j, k);
        for (p, &(a, omega, delta)) in pairs.iter().enumerate() {
            let ur = q.column(2 * p).into_owned();
            let ui = q.column(2 * p + 1).into_owned();
            // Complex unit mode u = (ur + i ui)/sqrt(2); the pair sum
            // 2 Re[a u e^{(delta + i omega) t}] stays real.
            for col in 0..k {
                let t = col as f64 * dt;
                let growth = (delta * t).exp();
                let (s, c) = (omega * t).sin_cos();
                for row in 0..j {
                    data[(row, col)] += a
                        * growth
                        * std::f64::consts::SQRT_2
                        * (ur[row] * c - ui[row] * s);
                }
            }
        }
        Synthetic {
            matrix: SnapshotMatrix::new(data, dt).unwrap(),
            pairs: pairs.to_vec(),
        }
    }

    fn positive_freq_modes(e: &DmdExpansion) -> Vec<&DmdMode> {
        let mut v: Vec<&DmdMode> = e.modes.iter().filter(|m| m.frequency > 1e-9).collect();
        v.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).unwrap());
        v
    }

    #[test]
    fn constant_data_single_steady_mode() {
        let j = 12;
        let col = DVector::from_fn(j, |i, _| 1.0 + i as f64 * 0.1);
        let data = DMatrix::from_fn(j, 30, |r, _| col[r]);
        let m = SnapshotMatrix::new(data, 0.5).unwrap();
        let e = hodmd(&m, 5, 1e-10, 1e-8).unwrap();
        assert_eq!(e.spectral_count, 1);
        let mode = &e.modes[0];
        assert!(mode.frequency.abs() < 1e-8, "omega {}", mode.frequency);
        assert!(mode.growth_rate.abs() < 1e-8, "delta {}", mode.growth_rate);
        // Unit-norm mode convention: amplitude equals the column norm.
        assert!(
            (mode.amplitude - col.norm()).abs() < 1e-8 * col.norm(),
            "amplitude {} vs column norm {}",
            mode.amplitude,
            col.norm()
        );
        assert!(e.recon_rrmse < 1e-10);
    }

    #[test]
    fn two_mode_signal_recovered_to_1e6() {
        // (omega, delta) = (0.5, 0) and (1.3, -0.05), K = 300, d = 60.
        let pairs = vec![(1.0, 0.5, 0.0), (0.6, 1.3, -0.05)];
        let s = synth(31, 40, 300, 0.1, &pairs);
        let e = hodmd(&s.matrix, 60, 1e-9, 1e-6).unwrap();
        let got = positive_freq_modes(&e);
        assert_eq!(got.len(), 2, "expected 2 positive-frequency modes");
        for (i, &(a, omega, delta)) in s.pairs.iter().enumerate() {
            assert!(
                (got[i].frequency - omega).abs() < 1e-6,
                "omega {} vs {}",
                got[i].frequency,
                omega
            );
            assert!(
                (got[i].growth_rate - delta).abs() < 1e-6,
                "delta {} vs {}",
                got[i].growth_rate,
                delta
            );
            assert!(
                (got[i].amplitude - a).abs() < 1e-6 * a,
                "amplitude {} vs {}",
                got[i].amplitude,
                a
            );
        }
        // Conjugate pairing: negative twin with matching delta and amplitude.
        for m in got {
            let twin = e
                .modes
                .iter()
                .find(|x| (x.frequency + m.frequency).abs() < 1e-8)
                .expect("conjugate twin");
            assert!((twin.growth_rate - m.growth_rate).abs() < 1e-8);
            assert!((twin.amplitude - m.amplitude).abs() < 1e-8 * m.amplitude);
        }
    }

    #[test]
    fn exact_recovery_across_d_values() {
        let pairs = vec![(1.0, 0.7, 0.0), (0.5, 1.9, -0.02), (0.25, 3.1, 0.01)];
        let s = synth(32, 30, 240, 0.08, &pairs);
        for d in [6usize, 60, 120] {
            let e = hodmd(&s.matrix, d, 1e-9, 1e-7).unwrap();
            let got = positive_freq_modes(&e);
            assert_eq!(got.len(), 3, "d={d}");
            for (i, &(a, omega, delta)) in s.pairs.iter().enumerate() {
                assert!((got[i].frequency - omega).abs() < 1e-6, "d={d}");
                assert!((got[i].growth_rate - delta).abs() < 1e-6, "d={d}");
                assert!((got[i].amplitude - a).abs() < 1e-6 * a, "d={d}");
            }
        }
    }

    #[test]
    fn doubling_snapshots_and_d_keeps_spectrum() {
        let pairs = vec![(1.0, 0.9, 0.0), (0.4, 2.2, -0.03)];
        let s1 = synth(33, 25, 150, 0.1, &pairs);
        let s2 = synth(33, 25, 300, 0.1, &pairs);
        let e1 = hodmd(&s1.matrix, 30, 1e-9, 1e-6).unwrap();
        let e2 = hodmd(&s2.matrix, 60, 1e-9, 1e-6).unwrap();
        let g1 = positive_freq_modes(&e1);
        let g2 = positive_freq_modes(&e2);
        assert_eq!(g1.len(), g2.len());
        for (m1, m2) in g1.iter().zip(&g2) {
            assert!((m1.frequency - m2.frequency).abs() < 1e-6);
            assert!((m1.growth_rate - m2.growth_rate).abs() < 1e-6);
        }
    }

    #[test]
    fn d_outside_recommended_window_warns() {
        let pairs = vec![(1.0, 0.5, 0.0)];
        let s = synth(34, 10, 100, 0.1, &pairs);
        let e = hodmd(&s.matrix, 2, 1e-9, 1e-6).unwrap();
        assert!(e.warnings.iter().any(|w| w.contains("recommended")));
        let e2 = hodmd(&s.matrix, 20, 1e-9, 1e-6).unwrap();
        assert!(!e2.warnings.iter().any(|w| w.contains("recommended")));
    }

    #[test]
    fn reconstruction_rrmse_bounded_by_tolerances() {
        let pairs = vec![(1.0, 0.6, 0.0), (0.3, 1.7, -0.04)];
        let s = synth(35, 20, 200, 0.1, &pairs);
        let (eps_svd, eps_amp) = (1e-8, 1e-8);
        let e = hodmd(&s.matrix, 40, eps_svd, eps_amp).unwrap();
        assert!(
            e.recon_rrmse < 10.0 * (eps_svd + eps_amp),
            "training RRMSE {}",
            e.recon_rrmse
        );
    }

    #[test]
    fn forecast_constant_mode_any_horizon() {
        let j = 8;
        let data = DMatrix::from_fn(j, 40, |r, _| (r + 1) as f64);
        let m = SnapshotMatrix::new(data.clone(), 1.0).unwrap();
        let e = hodmd(&m, 8, 1e-10, 1e-8).unwrap();
        let horizon: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let fc = dmd_forecast(&e, 1e-3, true, &horizon).unwrap();
        for c in [0usize, 120, 199] {
            for r in 0..j {
                assert!(
                    (fc.data()[(r, c)] - data[(r, 0)]).abs() < 1e-8,
                    "drift at column {c}"
                );
            }
        }
    }

    #[test]
    fn forecast_filters_transient_and_tracks_attractor() {
        // Transient (delta = -0.1) plus permanent (delta = 0, omega = 0.8):
        // extrapolation to three times the training window must match the
        // analytic attractor.
        let pairs = vec![(0.8, 0.8, 0.0), (1.0, 1.9, -0.1)];
        let s = synth(36, 30, 200, 0.1, &pairs);
        let e = hodmd(&s.matrix, 40, 1e-9, 1e-7).unwrap();
        let times: Vec<f64> = (600..640).map(|i| i as f64 * 0.1).collect();
        let fc = dmd_forecast(&e, 1e-3, true, &times).unwrap();
        // Analytic attractor: only the permanent pair.
        let attractor = synth(36, 30, 640, 0.1, &[(0.8, 0.8, 0.0)]);
        let truth = attractor.matrix.data().columns(600, 40).into_owned();
        let err = rrmse_mat(&truth, fc.data()).unwrap();
        assert!(err < 1e-4, "attractor RRMSE {err}");
    }

    #[test]
    fn forecast_empty_filter_lists_nearest() {
        let pairs = vec![(1.0, 1.2, -0.2)];
        let s = synth(37, 10, 120, 0.1, &pairs);
        let e = hodmd(&s.matrix, 24, 1e-9, 1e-6).unwrap();
        match dmd_forecast(&e, 1e-6, true, &[0.0, 1.0]) {
            Err(CoreError::EmptyModeSet { nearest, .. }) => {
                assert!(!nearest.is_empty());
                assert!((nearest[0].abs() - 0.2).abs() < 1e-4);
            }
            other => panic!("expected EmptyModeSet, got {other:?}"),
        }
    }

    #[test]
    fn spectrum_report_sorted_and_symmetric() {
        let pairs = vec![(1.0, 0.5, 0.0), (0.5, 1.1, -0.01)];
        let s = synth(38, 15, 150, 0.1, &pairs);
        let e = hodmd(&s.matrix, 30, 1e-9, 1e-6).unwrap();
        let rows = dmd_spectrum_report(&e);
        assert_eq!(rows.len(), 4);
        for w in rows.windows(2) {
            assert!(w[0].amplitude >= w[1].amplitude - 1e-12);
        }
        // Conjugate pairs appear symmetrically about omega = 0.
        for row in &rows {
            assert!(rows
                .iter()
                .any(|r| (r.omega + row.omega).abs() < 1e-8
                    && (r.delta - row.delta).abs() < 1e-8));
        }
    }

    #[test]
    fn mdhodmd_separable_oscillating_tensor() {
        // Rank-(1,1,1,·) separable tensor oscillating at a single frequency.
        let (nc, nx, ny, nk) = (2usize, 6usize, 5usize, 120usize);
        let dt = 0.1;
        let omega = 0.9;
        let cprof = [1.0, -0.5];
        let xprof: Vec<f64> = (0..nx).map(|i| 1.0 + 0.3 * i as f64).collect();
        let yprof: Vec<f64> = (0..ny).map(|i| (0.2 * i as f64).cos() + 1.5).collect();
        let mut data = vec![0.0; nc * nx * ny * nk];
        let mut idx = 0;
        for c in 0..nc {
            for i in 0..nx {
                for j in 0..ny {
                    for k in 0..nk {
                        let t = k as f64 * dt;
                        data[idx] = cprof[c] * xprof[i] * yprof[j] * (omega * t).cos();
                        idx += 1;
                    }
                }
            }
        }
        let t = SnapshotTensor::new(nc, vec![nx, ny], nk, dt, data).unwrap();
        let e = mdhodmd(&t, 24, &AxisTols::Shared(1e-8), 1e-6).unwrap();
        let got = positive_freq_modes(&e);
        assert_eq!(got.len(), 1);
        assert!((got[0].frequency - omega).abs() < 1e-6);
        assert!(got[0].growth_rate.abs() < 1e-6);
        assert!(e.recon_rrmse < 1e-8, "training RRMSE {}", e.recon_rrmse);
    }

    #[test]
    fn mdhodmd_steady_tensor_single_mode() {
        let t = SnapshotTensor::new(2, vec![4, 3], 40, 0.2, {
            let mut v = Vec::with_capacity(2 * 4 * 3 * 40);
            for c in 0..2 {
                for i in 0..4 {
                    for j in 0..3 {
                        for _k in 0..40 {
                            v.push((c + i + j) as f64 + 1.0);
                        }
                    }
                }
            }
            v
        })
        .unwrap();
        let e = mdhodmd(&t, 8, &AxisTols::Shared(1e-10), 1e-8).unwrap();
        assert_eq!(e.spectral_count, 1);
        assert!(e.modes[0].frequency.abs() < 1e-8);
        assert!(e.modes[0].growth_rate.abs() < 1e-8);
    }

    #[test]
    fn iterative_converges_immediately_on_exact_data() {
        let pairs = vec![(1.0, 0.8, 0.0)];
        let s = synth(39, 24, 100, 0.1, &pairs);
        let t = s.matrix.to_tensor(2, &[3, 4]).unwrap();
        let (e, iters) = mdhodmd_iterative(&t, 20, &AxisTols::Shared(1e-8), 1e-6, 20).unwrap();
        assert_eq!(iters, 1, "noise-free data should stabilise immediately");
        assert!(e.warnings.iter().all(|w| !w.contains("still changing")));
    }

    #[test]
    fn iterative_denoises_low_rank_tensor() {
        // Rank-4 (two conjugate pairs) oscillating data plus 1% noise; with a
        // loose tolerance the ranks stabilise and the frequencies survive.
        let pairs = vec![(1.0, 0.6, 0.0), (0.7, 1.4, 0.0)];
        let s = synth(40, 24, 200, 0.1, &pairs);
        let mut noisy = s.matrix.data().clone();
        let scale = noisy.abs().max();
        let mut rng = Rng::seed_from(41);
        for x in noisy.iter_mut() {
            *x += 0.01 * scale * rng.normal();
        }
        let m = SnapshotMatrix::new(noisy, 0.1).unwrap();
        let t = m.to_tensor(2, &[3, 4]).unwrap();
        let (e, iters) = mdhodmd_iterative(&t, 40, &AxisTols::Shared(5e-2), 1e-3, 20).unwrap();
        assert!(iters <= 20);
        let got = positive_freq_modes(&e);
        assert!(got.len() >= 2, "retained {} positive modes", got.len());
        assert!((got[0].frequency - 0.6).abs() < 1e-2);
        assert!((got[1].frequency - 1.4).abs() < 1e-2);
    }

    #[test]
    fn d1_reduces_to_standard_dmd() {
        let pairs = vec![(1.0, 0.5, 0.0)];
        let s = synth(42, 10, 80, 0.1, &pairs);
        let e = hodmd(&s.matrix, 1, 1e-9, 1e-6).unwrap();
        let got = positive_freq_modes(&e);
        assert_eq!(got.len(), 1);
        assert!((got[0].frequency - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_delay() {
        let pairs = vec![(1.0, 0.5, 0.0)];
        let s = synth(43, 6, 30, 0.1, &pairs);
        assert!(hodmd(&s.matrix, 0, 1e-9, 1e-6).is_err());
        assert!(hodmd(&s.matrix, 30, 1e-9, 1e-6).is_err());
    }
}
