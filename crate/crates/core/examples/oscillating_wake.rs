//! Decompose a synthetic oscillating field with HODMD and extrapolate the
//! neutral modes beyond the sampled window.

use nalgebra::DMatrix;
use romkit_core::hodmd::{dmd_forecast, dmd_spectrum_report, hodmd};
use romkit_core::rng::Rng;
use romkit_core::tensor::SnapshotMatrix;

fn main() {
    // Two oscillations on random orthonormal spatial profiles: a neutral
    // wake-like mode and a decaying transient.
    let (j, k, dt) = (64usize, 240usize, 0.1f64);
    let mut rng = Rng::seed_from(7);
    let q = DMatrix::from_fn(j, 4, |_, _| rng.normal()).qr().q();
    let mut data = DMatrix::<f64>::zeros(j, k);
    for col in 0..k {
        let t = col as f64 * dt;
        for row in 0..j {
            data[(row, col)] += 1.0 * (q[(row, 0)] * (0.8 * t).cos() - q[(row, 1)] * (0.8 * t).sin());
            data[(row, col)] +=
                0.5 * (-0.15 * t).exp() * (q[(row, 2)] * (2.1 * t).cos() - q[(row, 3)] * (2.1 * t).sin());
        }
    }
    let snapshots = SnapshotMatrix::new(data, dt).unwrap();

    let expansion = hodmd(&snapshots, 48, 1e-8, 1e-6).unwrap();
    println!(
        "spatial rank N = {}, enlarged rank N' = {}, retained modes M = {}",
        expansion.spatial_rank, expansion.enlarged_rank, expansion.spectral_count
    );
    println!("training-window RRMSE = {:.3e}\n", expansion.recon_rrmse);

    println!("{:>10} {:>10} {:>12}", "omega", "delta", "amplitude");
    for row in dmd_spectrum_report(&expansion) {
        println!("{:>10.4} {:>10.4} {:>12.4e}", row.omega, row.delta, row.amplitude);
    }

    // Keep the neutral modes, freeze their growth and look far ahead.
    let horizon: Vec<f64> = (0..5).map(|i| 100.0 + i as f64 * dt).collect();
    let future = dmd_forecast(&expansion, 1e-3, true, &horizon).unwrap();
    println!(
        "\nforecast at t = 100: first spatial point over 5 steps: {:?}",
        future.data().row(0).iter().map(|x| (x * 1e3).round() / 1e3).collect::<Vec<_>>()
    );
}
