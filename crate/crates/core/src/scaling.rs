//! Per-variable centering and scaling of snapshot matrices.
//!
//! A "variable" is a contiguous block of rows of the `J x K` matrix (for a
//! snapshot tensor, one component's worth of grid points; for a reduced
//! matrix, a single mode's time series). Centering subtracts each variable's
//! mean over all of its entries; scaling divides by a per-variable factor:
//!
//! * `range`  - max minus min of the variable,
//! * `auto`   - standard deviation of the variable,
//! * `pareto` - square root of the standard deviation,
//! * `mpm`    - "max per mode": one shared divisor, the sum over variables of
//!   each variable's max absolute value.

use crate::tensor::SnapshotMatrix;
use crate::{CoreError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleKind {
    None,
    Range,
    Auto,
    Pareto,
    Mpm,
}

impl ScaleKind {
    pub fn parse(s: &str) -> Option<ScaleKind> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "no" => Some(ScaleKind::None),
            "range" => Some(ScaleKind::Range),
            "auto" => Some(ScaleKind::Auto),
            "pareto" => Some(ScaleKind::Pareto),
            "mpm" => Some(ScaleKind::Mpm),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScaleKind::None => "none",
            ScaleKind::Range => "range",
            ScaleKind::Auto => "auto",
            ScaleKind::Pareto => "pareto",
            ScaleKind::Mpm => "mpm",
        }
    }
}

/// Fitted transform `x -> (x - mean_v) / factor_v` per variable block.
#[derive(Clone, Debug)]
pub struct ScalerSpec {
    pub kind: ScaleKind,
    pub centering: bool,
    /// Per-variable means (zero when centering is off).
    pub means: Vec<f64>,
    /// Per-variable divisors, strictly positive.
    pub factors: Vec<f64>,
    /// Rows per variable block, summing to the matrix row count.
    pub blocks: Vec<usize>,
}

impl ScalerSpec {
    /// Identity transform over a single block of `rows` rows.
    pub fn identity(rows: usize) -> Self {
        ScalerSpec {
            kind: ScaleKind::None,
            centering: false,
            means: vec![0.0],
            factors: vec![1.0],
            blocks: vec![rows],
        }
    }
}

/// Uniform layout: `n_variables` equal blocks covering `rows` rows.
pub fn equal_blocks(rows: usize, n_variables: usize) -> Result<Vec<usize>> {
    if n_variables == 0 || !rows.is_multiple_of(n_variables) {
        return Err(CoreError::InvalidArgument(format!(
            "{rows} rows cannot be split into {n_variables} equal variable blocks"
        )));
    }
    Ok(vec![rows / n_variables; n_variables])
}

fn check_layout(m: &SnapshotMatrix, blocks: &[usize]) -> Result<()> {
    let total: usize = blocks.iter().sum();
    if total != m.spatial_dim() || blocks.contains(&0) {
        return Err(CoreError::ShapeMismatch(format!(
            "variable blocks {:?} do not tile {} rows",
            blocks,
            m.spatial_dim()
        )));
    }
    Ok(())
}

/// Fit a scaler on `m` with the given variable layout.
pub fn fit_scaler(
    m: &SnapshotMatrix,
    kind: ScaleKind,
    centering: bool,
    blocks: &[usize],
) -> Result<ScalerSpec> {
    check_layout(m, blocks)?;
    let k = m.times();
    let data = m.data();

    let mut means = Vec::with_capacity(blocks.len());
    let mut maxabs = Vec::with_capacity(blocks.len());
    let mut factors = Vec::with_capacity(blocks.len());

    let mut row0 = 0usize;
    for (v, &rows) in blocks.iter().enumerate() {
        let n = (rows * k) as f64;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut amax = 0.0f64;
        for r in row0..row0 + rows {
            for c in 0..k {
                let x = data[(r, c)];
                sum += x;
                min = min.min(x);
                max = max.max(x);
                amax = amax.max(x.abs());
            }
        }
        let mean = sum / n;
        let mut sq = 0.0;
        for r in row0..row0 + rows {
            for c in 0..k {
                let d = data[(r, c)] - mean;
                sq += d * d;
            }
        }
        let std = (sq / n).sqrt();

        let factor = match kind {
            ScaleKind::None | ScaleKind::Mpm => 1.0,
            ScaleKind::Range => max - min,
            ScaleKind::Auto => std,
            ScaleKind::Pareto => std.sqrt(),
        };
        if matches!(kind, ScaleKind::Range | ScaleKind::Auto | ScaleKind::Pareto)
            && !(factor > 0.0)
        {
            return Err(CoreError::DegenerateVariable {
                index: v,
                reason: format!("constant block, {} factor would be 0", kind.name()),
            });
        }
        means.push(if centering { mean } else { 0.0 });
        maxabs.push(amax);
        factors.push(factor);
        row0 += rows;
    }

    if kind == ScaleKind::Mpm {
        // One shared divisor: the sum of per-variable max-abs values.
        let divisor: f64 = maxabs.iter().sum();
        if !(divisor > 0.0) {
            return Err(CoreError::DegenerateVariable {
                index: 0,
                reason: "all variables are identically zero, MpM divisor is 0".into(),
            });
        }
        factors = vec![divisor; blocks.len()];
    }

    Ok(ScalerSpec {
        kind,
        centering,
        means,
        factors,
        blocks: blocks.to_vec(),
    })
}

/// Apply `x -> (x - mean)/factor` blockwise.
pub fn apply_scaler(m: &SnapshotMatrix, s: &ScalerSpec) -> Result<SnapshotMatrix> {
    transform(m, s, |x, mean, factor| (x - mean) / factor)
}

/// Invert a fitted scaler: `x -> x*factor + mean`.
pub fn invert_scaler(m: &SnapshotMatrix, s: &ScalerSpec) -> Result<SnapshotMatrix> {
    transform(m, s, |x, mean, factor| x * factor + mean)
}

fn transform(
    m: &SnapshotMatrix,
    s: &ScalerSpec,
    f: impl Fn(f64, f64, f64) -> f64,
) -> Result<SnapshotMatrix> {
    check_layout(m, &s.blocks)?;
    if s.means.len() != s.blocks.len() || s.factors.len() != s.blocks.len() {
        return Err(CoreError::InvalidArgument(
            "scaler spec has inconsistent per-variable vectors".into(),
        ));
    }
    let mut out = m.data().clone();
    let k = m.times();
    let mut row0 = 0usize;
    for (v, &rows) in s.blocks.iter().enumerate() {
        for r in row0..row0 + rows {
            for c in 0..k {
                out[(r, c)] = f(out[(r, c)], s.means[v], s.factors[v]);
            }
        }
        row0 += rows;
    }
    SnapshotMatrix::new(out, m.dt())
}
