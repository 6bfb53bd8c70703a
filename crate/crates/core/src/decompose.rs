//! Truncated SVD/POD and Tucker (HOSVD) factorisations with tolerance-driven
//! rank selection.
//!
//! Rank selection everywhere follows the same rule: keep the smallest `N`
//! such that `sigma_{N+1}/sigma_1 <= tol`, falling back to full rank when no
//! index satisfies the bound. HOSVD applies that rule per axis and computes
//! the core by projecting the tensor onto every factor matrix (no HOOI
//! refinement), which is deterministic and matches the classical procedure.

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::tensor::{NdArray, SnapshotMatrix, SnapshotTensor};
use crate::{CoreError, Result};

/// Truncated factorisation `V ~ W diag(sigma) T^T` of a snapshot matrix.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    /// Spatial modes, `J x N`, orthonormal columns.
    pub w: DMatrix<f64>,
    /// Singular values, descending.
    pub sigma: DVector<f64>,
    /// Temporal modes, `K x N`, orthonormal columns.
    pub t: DMatrix<f64>,
    /// Retained rank (spatial complexity).
    pub rank: usize,
    /// Tolerance used for the truncation.
    pub tol: f64,
}

impl SvdFactors {
    /// `W diag(sigma) T^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut st = self.t.clone();
        for n in 0..self.rank {
            st.column_mut(n).scale_mut(self.sigma[n]);
        }
        &self.w * st.transpose()
    }
}

/// POD expansion `v(t_k) ~ sum_n c_n(t_k) Phi_n`.
#[derive(Clone, Debug)]
pub struct PodExpansion {
    /// Spatial POD modes `Phi_n`, one per column, `J x N`.
    pub modes: DMatrix<f64>,
    /// Temporal coefficients `c_n(t_k) = sigma_n T_{kn}`, `K x N`.
    pub coefficients: DMatrix<f64>,
}

impl PodExpansion {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.modes * self.coefficients.transpose()
    }
}

/// Reduced snapshot matrix `hat V = diag(sigma) T^T` together with the basis
/// that lifts it back to physical space.
#[derive(Clone, Debug)]
pub struct ReducedSnapshotMatrix {
    /// `N x K` reduced coefficients.
    pub data: DMatrix<f64>,
    /// `J x N` spatial basis with `V ~ parent_w * data`.
    pub parent_w: DMatrix<f64>,
    /// Time step carried over from the source matrix.
    pub dt: f64,
}

/// Truncated SVD of a snapshot matrix.
///
/// `tol` must lie in `[0, 1)`; `max_rank` (when given) wins over the
/// tolerance and requests that exact rank, clamped to what the matrix offers.
pub fn svd_truncated(
    m: &SnapshotMatrix,
    tol: f64,
    max_rank: Option<usize>,
) -> Result<SvdFactors> {
    if !(0.0..1.0).contains(&tol) {
        return Err(CoreError::InvalidArgument(format!(
            "svd tolerance must be in [0, 1), got {tol}"
        )));
    }
    let svd = linalg::truncated_svd(m.data(), tol, max_rank)?;
    if svd.sigma.is_empty() || svd.sigma[0] <= 0.0 {
        return Err(CoreError::RankZero("snapshot matrix".into()));
    }
    Ok(SvdFactors {
        rank: svd.rank(),
        tol,
        w: svd.u,
        sigma: svd.sigma,
        t: svd.v,
    })
}

/// POD modes and temporal coefficients from fitted factors.
pub fn pod_expansion(f: &SvdFactors) -> PodExpansion {
    let mut coeff = f.t.clone();
    for n in 0..f.rank {
        coeff.column_mut(n).scale_mut(f.sigma[n]);
    }
    PodExpansion {
        modes: f.w.clone(),
        coefficients: coeff,
    }
}

/// Reduce a snapshot matrix to `diag(sigma) T^T` at the given tolerance.
pub fn reduce(m: &SnapshotMatrix, tol: f64, max_rank: Option<usize>) -> Result<ReducedSnapshotMatrix> {
    let f = svd_truncated(m, tol, max_rank)?;
    Ok(reduced_from_factors(&f, m.dt()))
}

pub fn reduced_from_factors(f: &SvdFactors, dt: f64) -> ReducedSnapshotMatrix {
    let mut st = f.t.clone();
    for n in 0..f.rank {
        st.column_mut(n).scale_mut(f.sigma[n]);
    }
    ReducedSnapshotMatrix {
        data: st.transpose(),
        parent_w: f.w.clone(),
        dt,
    }
}

/// Per-axis tolerances for HOSVD: one shared value or one per tensor axis.
#[derive(Clone, Debug)]
pub enum AxisTols {
    Shared(f64),
    PerAxis(Vec<f64>),
}

impl AxisTols {
    fn get(&self, axis: usize, order: usize) -> Result<f64> {
        let tol = match self {
            AxisTols::Shared(t) => *t,
            AxisTols::PerAxis(v) => {
                if v.len() != order {
                    return Err(CoreError::InvalidArgument(format!(
                        "{} per-axis tolerances for an order-{order} tensor",
                        v.len()
                    )));
                }
                v[axis]
            }
        };
        if !(0.0..=1.0).contains(&tol) {
            return Err(CoreError::InvalidArgument(format!(
                "hosvd tolerance must be in [0, 1], got {tol}"
            )));
        }
        Ok(tol)
    }
}

/// Tucker factorisation of a snapshot tensor.
#[derive(Clone, Debug)]
pub struct HosvdFactors {
    /// Core tensor with shape `ranks`.
    pub core: NdArray,
    /// One orthonormal factor matrix per axis (`dim x rank`), time last.
    pub factor_matrices: Vec<DMatrix<f64>>,
    /// Full descending singular value set of each axis unfolding.
    pub singular_value_sets: Vec<Vec<f64>>,
    /// Retained rank per axis.
    pub ranks: Vec<usize>,
    /// Time step carried over from the source tensor.
    pub dt: f64,
}

impl HosvdFactors {
    /// Multiply the core back through every factor matrix.
    pub fn reconstruct(&self) -> Result<NdArray> {
        let mut out = self.core.clone();
        for (axis, w) in self.factor_matrices.iter().enumerate() {
            out = out.mode_product(axis, w)?;
        }
        Ok(out)
    }
}

/// HOSVD with per-axis tolerance truncation (optionally capped per axis).
pub fn hosvd(t: &SnapshotTensor, tols: &AxisTols) -> Result<HosvdFactors> {
    hosvd_capped(t.array(), tols, None, t.dt())
}

/// HOSVD of a bare array with optional per-axis rank caps.
pub fn hosvd_capped(
    array: &NdArray,
    tols: &AxisTols,
    rank_caps: Option<&[usize]>,
    dt: f64,
) -> Result<HosvdFactors> {
    let order = array.order();
    if !(3..=5).contains(&order) {
        return Err(CoreError::InvalidArgument(format!(
            "hosvd expects a tensor of order 3 to 5, got {order}"
        )));
    }
    let mut factors = Vec::with_capacity(order);
    let mut sigma_sets = Vec::with_capacity(order);
    let mut ranks = Vec::with_capacity(order);
    for axis in 0..order {
        let tol = tols.get(axis, order)?;
        let cap = rank_caps.map(|c| c[axis].min(array.shape()[axis]));
        let unfolding = array.unfold(axis);
        let (w, sigmas) = linalg_left_factors(&unfolding, tol, cap)
            .map_err(|e| axis_error(e, axis))?;
        ranks.push(w.ncols());
        factors.push(w);
        sigma_sets.push(sigmas);
    }
    // Core: project the tensor onto every factor matrix.
    let mut core = array.clone();
    for (axis, w) in factors.iter().enumerate() {
        core = core.mode_product(axis, &w.transpose())?;
    }
    Ok(HosvdFactors {
        core,
        factor_matrices: factors,
        singular_value_sets: sigma_sets,
        ranks,
        dt,
    })
}

fn axis_error(e: CoreError, axis: usize) -> CoreError {
    match e {
        CoreError::RankZero(_) => CoreError::RankZero(format!("tensor axis {axis} unfolding")),
        other => other,
    }
}

/// Left singular factors and the full singular value list of an unfolding.
fn linalg_left_factors(
    a: &DMatrix<f64>,
    tol: f64,
    max_rank: Option<usize>,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let (u, sigmas) = linalg::left_factors(a, tol, max_rank)?;
    if sigmas.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(CoreError::RankZero("unfolding".into()));
    }
    Ok((u, sigmas))
}

/// Spatial and temporal HOSVD modes: the core contracted with the spatial
/// factors over each temporal singular value, and the scaled temporal factor.
#[derive(Clone, Debug)]
pub struct HosvdModes {
    /// `J x N` spatial modes (flattened over components and space).
    pub spatial: DMatrix<f64>,
    /// `K x N` temporal modes `sigma_t_n T_{kn}`.
    pub temporal: DMatrix<f64>,
    /// Indices of modes dropped because their temporal singular value is zero.
    pub dropped: Vec<usize>,
}

impl HosvdModes {
    /// `V ~ spatial * temporal^T` as a `J x K` matrix.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.spatial * self.temporal.transpose()
    }
}

/// Form the truncated expansion modes from HOSVD factors.
pub fn hosvd_spatial_temporal_modes(f: &HosvdFactors) -> Result<HosvdModes> {
    let order = f.core.order();
    let time_axis = order - 1;
    let n_modes = f.ranks[time_axis];
    let sig_t = &f.singular_value_sets[time_axis];

    // Contract the core with every spatial factor matrix, keeping the
    // temporal axis of the core untouched.
    let mut contracted = f.core.clone();
    for axis in 0..time_axis {
        contracted = contracted.mode_product(axis, &f.factor_matrices[axis])?;
    }
    // Shape is now (J1, ..., Jd, N) row-major, so a J x N matrix view is a
    // straight reinterpretation.
    let j: usize = contracted.shape()[..time_axis].iter().product();
    let data = contracted.data();

    let keep: Vec<usize> = (0..n_modes).filter(|&n| sig_t[n] > 0.0).collect();
    let dropped: Vec<usize> = (0..n_modes).filter(|&n| sig_t[n] <= 0.0).collect();

    let spatial = DMatrix::from_fn(j, keep.len(), |r, c| {
        let n = keep[c];
        data[r * n_modes + n] / sig_t[n]
    });
    let t_factor = &f.factor_matrices[time_axis];
    let temporal = DMatrix::from_fn(t_factor.nrows(), keep.len(), |r, c| {
        let n = keep[c];
        t_factor[(r, n)] * sig_t[n]
    });
    Ok(HosvdModes {
        spatial,
        temporal,
        dropped,
    })
}
