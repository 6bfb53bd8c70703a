//! Property tests for the structural invariants: reshape round-trips over
//! random shapes, scaler round-trips over every kind, and gappy repair of
//! random low-rank matrices whose gap pattern leaves each row and column
//! observed.

use nalgebra::DMatrix;
use proptest::prelude::*;
use romkit_core::decompose;
use romkit_core::metrics::rrmse_slice;
use romkit_core::repair::{gappy_svd, GappyConfig, InitFill};
use romkit_core::rng::Rng;
use romkit_core::scaling::{apply_scaler, fit_scaler, invert_scaler, ScaleKind};
use romkit_core::tensor::{GapMask, SnapshotMatrix, SnapshotTensor};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reshape_round_trip_exact(
        components in 1usize..4,
        s1 in 1usize..6,
        s2 in 1usize..6,
        times in 1usize..7,
        seed in 0u64..1000,
    ) {
        let len = components * s1 * s2 * times;
        let mut rng = Rng::seed_from(seed);
        let data: Vec<f64> = (0..len).map(|_| rng.uniform(-5.0, 5.0)).collect();
        let t = SnapshotTensor::new(components, vec![s1, s2], times, 0.5, data).unwrap();
        let m = t.to_matrix();
        let back = m.to_tensor(components, &[s1, s2]).unwrap();
        // Bit-identical round trip.
        prop_assert_eq!(t.array().data(), back.array().data());
    }

    #[test]
    fn scaler_round_trip_all_kinds(
        rows in 2usize..8,
        cols in 2usize..8,
        seed in 0u64..1000,
        kind_idx in 0usize..5,
        centering in any::<bool>(),
    ) {
        let kind = [
            ScaleKind::None,
            ScaleKind::Range,
            ScaleKind::Auto,
            ScaleKind::Pareto,
            ScaleKind::Mpm,
        ][kind_idx];
        let mut rng = Rng::seed_from(seed);
        let m = SnapshotMatrix::new(
            DMatrix::from_fn(rows * 2, cols, |_, _| rng.uniform(-3.0, 9.0)),
            1.0,
        )
        .unwrap();
        let blocks = vec![rows; 2];
        let s = fit_scaler(&m, kind, centering, &blocks).unwrap();
        let back = invert_scaler(&apply_scaler(&m, &s).unwrap(), &s).unwrap();
        let err = (back.data() - m.data()).abs().max();
        prop_assert!(err < 1e-12, "round-trip error {}", err);
    }

    #[test]
    fn centered_blocks_have_zero_mean(
        rows in 1usize..5,
        cols in 2usize..8,
        seed in 0u64..1000,
    ) {
        let mut rng = Rng::seed_from(seed);
        let m = SnapshotMatrix::new(
            DMatrix::from_fn(rows * 3, cols, |_, _| rng.uniform(0.0, 10.0)),
            1.0,
        )
        .unwrap();
        let blocks = vec![rows; 3];
        let s = fit_scaler(&m, ScaleKind::None, true, &blocks).unwrap();
        let centered = apply_scaler(&m, &s).unwrap();
        for b in 0..3 {
            let mut sum = 0.0;
            for r in b * rows..(b + 1) * rows {
                for c in 0..cols {
                    sum += centered.data()[(r, c)];
                }
            }
            let mean = sum / (rows * cols) as f64;
            prop_assert!(mean.abs() < 1e-12, "block {} mean {}", b, mean);
        }
    }

    #[test]
    fn eckart_young_on_random_matrices(
        rows in 4usize..12,
        cols in 4usize..12,
        seed in 0u64..500,
    ) {
        let mut rng = Rng::seed_from(seed);
        let m = SnapshotMatrix::new(
            DMatrix::from_fn(rows, cols, |_, _| rng.normal()),
            1.0,
        )
        .unwrap();
        let full = decompose::svd_truncated(&m, 0.0, None).unwrap();
        let n = 1 + (seed as usize % full.rank.max(1));
        let truncated = decompose::svd_truncated(&m, 0.0, Some(n)).unwrap();
        let resid = (m.data() - truncated.reconstruct()).norm();
        let expect: f64 = full
            .sigma
            .iter()
            .skip(n)
            .map(|s| s * s)
            .sum::<f64>()
            .sqrt();
        prop_assert!(
            (resid - expect).abs() <= 1e-8 * full.sigma[0].max(1.0),
            "rank {}: residual {} vs {}",
            n,
            resid,
            expect
        );
    }
}

proptest! {
    // Heavier cases: keep the count small.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn low_rank_gappy_repair_recovers(
        rank in 1usize..4,
        seed in 0u64..300,
    ) {
        let (rows, cols) = (30usize, 24usize);
        let mut rng = Rng::seed_from(seed.wrapping_add(99));
        let a = DMatrix::from_fn(rows, rank, |_, _| rng.normal());
        let b = DMatrix::from_fn(rank, cols, |_, _| rng.normal());
        let truth = a * b;
        // Random gaps, but every row and column keeps an observation.
        let mut mask = vec![false; rows * cols];
        for (i, slot) in mask.iter_mut().enumerate() {
            let (r, c) = (i / cols, i % cols);
            // Keep the main diagonal band always observed.
            if c != r % cols {
                *slot = rng.next_f64() < 0.3;
            }
        }
        let gap_mask = GapMask::from_vec(vec![rows, cols], mask).unwrap();
        // Small matrices with few observations per degree of freedom can
        // converge slowly (linear rate near 0.99), so the property gets a
        // generous iteration budget; quality at the fixed point is what is
        // being asserted.
        let cfg = GappyConfig {
            init_fill: InitFill::Zero,
            rank,
            tol_gaps: 1e-9,
            max_iters: 5000,
        };
        let out = gappy_svd(&truth, &gap_mask, &cfg).unwrap();
        let tv: Vec<f64> = (0..rows * cols).map(|i| truth[(i / cols, i % cols)]).collect();
        let gv: Vec<f64> = (0..rows * cols).map(|i| out.repaired[(i / cols, i % cols)]).collect();
        let err = rrmse_slice(&tv, &gv).unwrap();
        prop_assert!(err < 1e-3, "repair RRMSE {}", err);
    }
}
