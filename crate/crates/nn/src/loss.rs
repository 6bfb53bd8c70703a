//! Loss functions: `mse(t) = ||pred - target||^2 / n_out` per window, and the
//! physics-aware variant adding a penalty on the deviation of each predicted
//! snapshot's entry sum from one.

use crate::feature::Feature;
use crate::spec::Loss;

/// Loss value and gradient with respect to the prediction.
///
/// `target` carries the window's `p x n` block structure: for the penalty
/// term each target row is one predicted snapshot whose entries should sum
/// to one. The prediction is the flattened row vector of the same length.
pub fn loss_and_grad(loss: Loss, pred: &Feature, target: &Feature) -> (f64, Vec<f64>) {
    debug_assert_eq!(pred.len(), target.len(), "prediction/target length");
    let n = pred.len() as f64;
    let mut value = 0.0;
    let mut grad = vec![0.0; pred.len()];
    for (i, (p, t)) in pred.data().iter().zip(target.data()).enumerate() {
        let d = p - t;
        value += d * d / n;
        grad[i] = 2.0 * d / n;
    }
    if let Loss::PaMse { weight } = loss {
        let rows = target.rows();
        let cols = target.cols();
        for r in 0..rows {
            let s: f64 = pred.data()[r * cols..(r + 1) * cols].iter().sum();
            let dev = s - 1.0;
            value += weight * dev * dev / rows as f64;
            let g = 2.0 * weight * dev / rows as f64;
            for gi in &mut grad[r * cols..(r + 1) * cols] {
                *gi += g;
            }
        }
    }
    (value, grad)
}
