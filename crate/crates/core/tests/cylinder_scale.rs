//! Reference-scale reshape checks on the wake-database geometry
//! (2 velocity components, 449 x 199 grid, 150 snapshots).
//!
//! The published description of that database once lists 100 snapshots and
//! elsewhere 150; the 150-snapshot figure matches the stated sampling and is
//! the one used here.

use romkit_core::tensor::SnapshotTensor;

#[test]
fn cylinder_sized_tensor_folds_to_matrix() {
    let (c, nx, ny, k) = (2usize, 449usize, 199usize, 150usize);
    let j = c * nx * ny;
    assert_eq!(j, 178_702);

    let mut data = vec![0.0; j * k];
    // Sentinels at known multi-indices to verify the fold order at scale.
    let idx = |j1: usize, j2: usize, j3: usize, kk: usize| ((j1 * nx + j2) * ny + j3) * k + kk;
    data[idx(1, 448, 198, 149)] = 7.0;
    data[idx(0, 300, 17, 42)] = -3.0;
    let t = SnapshotTensor::new(c, vec![nx, ny], k, 0.2, data).unwrap();

    let m = t.to_matrix();
    assert_eq!(m.spatial_dim(), 178_702);
    assert_eq!(m.times(), 150);
    // Component-major folding: j = (j1 * 449 + j2) * 199 + j3.
    assert_eq!(m.data()[((nx + 448) * ny + 198, 149)], 7.0);
    assert_eq!(m.data()[((300 * ny) + 17, 42)], -3.0);

    // And back: bit-identical round trip at full scale.
    let back = m.to_tensor(2, &[449, 199]).unwrap();
    assert_eq!(back.shape(), &[2, 449, 199, 150]);
    assert_eq!(back.array().data()[idx(1, 448, 198, 149)], 7.0);
    assert!(back.array().data() == t.array().data());
}
