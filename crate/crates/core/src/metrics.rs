//! Error metrics. The relative root mean square error is the toolkit's
//! universal quality measure:
//!
//! `RRMSE = sqrt( sum_k ||v_k - v_k_approx||^2 / sum_k ||v_k||^2 )`

use nalgebra::DMatrix;

use crate::tensor::SnapshotMatrix;
use crate::{CoreError, Result};

/// RRMSE between two congruent snapshot matrices.
pub fn rrmse(truth: &SnapshotMatrix, approx: &SnapshotMatrix) -> Result<f64> {
    rrmse_mat(truth.data(), approx.data())
}

/// RRMSE between two congruent dense matrices.
pub fn rrmse_mat(truth: &DMatrix<f64>, approx: &DMatrix<f64>) -> Result<f64> {
    if truth.shape() != approx.shape() {
        return Err(CoreError::ShapeMismatch(format!(
            "truth is {:?}, approx is {:?}",
            truth.shape(),
            approx.shape()
        )));
    }
    rrmse_slice(truth.as_slice(), approx.as_slice())
}

/// RRMSE between two equally long slices.
pub fn rrmse_slice(truth: &[f64], approx: &[f64]) -> Result<f64> {
    if truth.len() != approx.len() {
        return Err(CoreError::ShapeMismatch(format!(
            "truth has {} entries, approx has {}",
            truth.len(),
            approx.len()
        )));
    }
    let denom: f64 = truth.iter().map(|x| x * x).sum();
    if denom == 0.0 {
        return Err(CoreError::ZeroNormReference);
    }
    let num: f64 = truth
        .iter()
        .zip(approx)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((num / denom).sqrt())
}
