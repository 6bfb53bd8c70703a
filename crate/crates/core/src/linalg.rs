//! Dense linear algebra kernels shared by the decomposition routines.
//!
//! Two SVD paths are used behind one interface: a direct bidiagonal SVD for
//! small or square-ish matrices, and the snapshot (Gram) method for strongly
//! rectangular ones, where the eigendecomposition of the small Gram matrix is
//! lifted to the long side. Factor signs are normalised so that each left
//! singular vector's entry of largest magnitude is positive, which makes the
//! factors deterministic and serialisable.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{CoreError, Result};

/// Truncated singular value decomposition `A ~ U diag(sigma) V^T`.
#[derive(Clone, Debug)]
pub struct TruncatedSvd {
    /// Left singular vectors, `rows x n`.
    pub u: DMatrix<f64>,
    /// Singular values, descending.
    pub sigma: DVector<f64>,
    /// Right singular vectors, `cols x n`.
    pub v: DMatrix<f64>,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut sv = self.v.clone();
        for n in 0..self.rank() {
            sv.column_mut(n).scale_mut(self.sigma[n]);
        }
        &self.u * sv.transpose()
    }
}

/// Smallest `n` such that `sigma[n] / sigma[0] <= tol`; the full count when no
/// index satisfies the bound. An explicit `max_rank` caps the result.
pub fn rank_by_tolerance(sigma: &[f64], tol: f64, max_rank: Option<usize>) -> usize {
    let full = sigma.len();
    let mut n = full;
    if full > 0 && sigma[0] > 0.0 {
        for (i, &s) in sigma.iter().enumerate().skip(1) {
            if s / sigma[0] <= tol {
                n = i;
                break;
            }
        }
    }
    if let Some(cap) = max_rank {
        n = n.min(cap);
    }
    n
}

/// Make the largest-magnitude entry of each `u` column positive, flipping the
/// matching `v` column to keep the product unchanged.
fn fix_signs(u: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    for n in 0..u.ncols() {
        let col = u.column(n);
        let mut best = 0usize;
        let mut best_abs = 0.0f64;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > best_abs {
                best_abs = x.abs();
                best = i;
            }
        }
        if u[(best, n)] < 0.0 {
            u.column_mut(n).neg_mut();
            v.column_mut(n).neg_mut();
        }
    }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
pub fn sym_eig_desc(g: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = g.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), n, |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (vals, vecs)
}

/// Truncated SVD with tolerance-driven rank selection.
///
/// Computed by the snapshot (Gram) method: the Gram matrix on the short side
/// is eigendecomposed and the factors are lifted to the long side. This is
/// exact for the orthonormal factors, deterministic, and robust on the
/// degenerate inputs (constant fields, repeated columns) that trip the
/// bidiagonal SVD; the price is that singular values below roughly
/// `sqrt(eps) * sigma_1` read as numerically zero, which the rank selection
/// treats as such.
///
/// Returns the smallest rank `n` with `sigma_{n+1}/sigma_1 <= tol` (full rank
/// when no index qualifies), optionally capped by `max_rank`. Solver failures
/// are surfaced, never silently truncated. An identically zero input keeps a
/// single null mode (`sigma[0] = 0`); callers decide whether that is an error.
pub fn truncated_svd(a: &DMatrix<f64>, tol: f64, max_rank: Option<usize>) -> Result<TruncatedSvd> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Err(CoreError::InvalidArgument("empty matrix".into()));
    }
    let (mut u, sigma, mut v) = gram_svd(a, tol, max_rank)?;
    fix_signs(&mut u, &mut v);
    Ok(TruncatedSvd { u, sigma, v })
}

#[cfg(test)]
#[allow(clippy::type_complexity)]
fn direct_svd(
    a: &DMatrix<f64>,
    tol: f64,
    max_rank: Option<usize>,
) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let svd = a
        .clone()
        .try_svd(true, true, f64::EPSILON, 100_000)
        .ok_or_else(|| CoreError::SolverConvergence("bidiagonal SVD did not converge".into()))?;
    let u_full = svd.u.expect("u requested");
    let vt_full = svd.v_t.expect("v_t requested");
    let sig: Vec<f64> = svd.singular_values.iter().copied().collect();
    let n = effective_rank(&sig, tol, max_rank, roundoff_floor(sig.len(), false));
    let u = u_full.columns(0, n).into_owned();
    let v = vt_full.rows(0, n).transpose().into_owned();
    let sigma = DVector::from_fn(n, |i, _| sig[i]);
    Ok((u, sigma, v))
}

#[allow(clippy::type_complexity)]
fn gram_svd(
    a: &DMatrix<f64>,
    tol: f64,
    max_rank: Option<usize>,
) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let (rows, cols) = a.shape();
    let tall = rows >= cols;
    // Gram matrix on the short side.
    let g = if tall {
        a.transpose() * a
    } else {
        a * a.transpose()
    };
    let (vals, vecs) = sym_eig_desc(g);
    let sig: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let floor = sig.first().copied().unwrap_or(0.0) * roundoff_floor(sig.len(), true);
    let n = effective_rank(&sig, tol, max_rank, roundoff_floor(sig.len(), true));
    // Directions below the Gram resolution are numerically zero; report them
    // as such so forced-width factorisations stay exact.
    let sigma = DVector::from_fn(n, |i, _| if sig[i] <= floor { 0.0 } else { sig[i] });
    let short = vecs.columns(0, n).into_owned();

    // Lift to the long side and re-orthonormalise to absorb the squared-
    // condition-number loss of the Gram route.
    let mut long = if tall { a * &short } else { a.transpose() * &short };
    for i in 0..n {
        let s = sigma[i];
        if s > 0.0 {
            long.column_mut(i).scale_mut(1.0 / s);
        }
    }
    orthonormalize_columns(&mut long);

    if tall {
        Ok((long, sigma, short))
    } else {
        Ok((short, sigma, long))
    }
}

/// Relative floor below which singular values are pure round-off. The Gram
/// route squares the spectrum, so anything under `sqrt(eps * n)` of the top
/// singular value is unresolvable there and must not survive a small
/// tolerance.
fn roundoff_floor(len: usize, squared_spectrum: bool) -> f64 {
    let base = f64::EPSILON * len.max(1) as f64;
    if squared_spectrum {
        base.sqrt()
    } else {
        base
    }
}

fn effective_rank(
    sig: &[f64],
    tol: f64,
    max_rank: Option<usize>,
    floor_ratio: f64,
) -> usize {
    let hard_floor = sig.first().copied().unwrap_or(0.0) * floor_ratio;
    let mut n = rank_by_tolerance(sig, tol, max_rank);
    while n > 1 && sig[n - 1] <= hard_floor {
        n -= 1;
    }
    if let Some(cap) = max_rank {
        // An explicit rank request wins over the round-off floor so that
        // fixed-rank factorisations keep exactly the asked-for width; null
        // directions come back with sigma = 0.
        n = cap.min(sig.len()).max(n);
    }
    n
}

/// Modified Gram-Schmidt with a second pass, in place.
fn orthonormalize_columns(m: &mut DMatrix<f64>) {
    let n = m.ncols();
    for _pass in 0..2 {
        for i in 0..n {
            for j in 0..i {
                let proj = m.column(i).dot(&m.column(j));
                let cj = m.column(j).into_owned();
                m.column_mut(i).axpy(-proj, &cj, 1.0);
            }
            let norm = m.column(i).norm();
            if norm > 0.0 {
                m.column_mut(i).scale_mut(1.0 / norm);
            }
        }
    }
}

/// Left singular vectors of `a` truncated by tolerance/`max_rank`, plus the
/// full singular-value list of the unfolding. The long-side factor is never
/// formed, which makes this the right call for tensor unfoldings whose
/// trailing dimension is huge.
pub fn left_factors(
    a: &DMatrix<f64>,
    tol: f64,
    max_rank: Option<usize>,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Err(CoreError::InvalidArgument("empty unfolding".into()));
    }
    if rows <= cols {
        // Gram on the row side: its eigenvectors are the left factors.
        let g = a * a.transpose();
        let (vals, vecs) = sym_eig_desc(g);
        let sig = floored_sigmas(&vals);
        let n = effective_rank(&sig, tol, max_rank, roundoff_floor(sig.len(), true));
        let mut u = vecs.columns(0, n).into_owned();
        fix_signs_left(&mut u);
        Ok((u, sig))
    } else {
        let g = a.transpose() * a;
        let (vals, vecs) = sym_eig_desc(g);
        let sig = floored_sigmas(&vals);
        let n = effective_rank(&sig, tol, max_rank, roundoff_floor(sig.len(), true));
        let v = vecs.columns(0, n).into_owned();
        let mut u = a * v;
        for i in 0..n {
            if sig[i] > 0.0 {
                u.column_mut(i).scale_mut(1.0 / sig[i]);
            }
        }
        orthonormalize_columns(&mut u);
        fix_signs_left(&mut u);
        Ok((u, sig))
    }
}

/// Singular values from Gram eigenvalues with sub-resolution values snapped
/// to exactly zero.
fn floored_sigmas(vals: &DVector<f64>) -> Vec<f64> {
    let sig: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let floor = sig.first().copied().unwrap_or(0.0) * roundoff_floor(sig.len(), true);
    sig.into_iter()
        .map(|s| if s <= floor { 0.0 } else { s })
        .collect()
}

/// Sign convention for a lone left factor: largest-magnitude entry positive.
fn fix_signs_left(u: &mut DMatrix<f64>) {
    for n in 0..u.ncols() {
        let col = u.column(n);
        let mut best = 0usize;
        let mut best_abs = 0.0f64;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > best_abs {
                best_abs = x.abs();
                best = i;
            }
        }
        if u[(best, n)] < 0.0 {
            u.column_mut(n).neg_mut();
        }
    }
}

/// Moore-Penrose pseudoinverse solve `X = B pinv(A)` used for operator fits,
/// with singular values below `rcond * sigma_1` discarded.
pub fn fit_operator(b: &DMatrix<f64>, a: &DMatrix<f64>, rcond: f64) -> Result<DMatrix<f64>> {
    let svd = truncated_svd(a, rcond, None)?;
    if svd.rank() == 0 {
        return Err(CoreError::RankZero("operator fit".into()));
    }
    // pinv(A) = V diag(1/sigma) U^T
    let mut vs = svd.v.clone();
    for i in 0..svd.rank() {
        vs.column_mut(i).scale_mut(1.0 / svd.sigma[i]);
    }
    Ok(b * vs * svd.u.transpose())
}

/// Complex eigendecomposition of a real square matrix.
///
/// Eigenvalues come from the real Schur form; eigenvectors are recovered by
/// inverse iteration with the (slightly shifted) eigenvalue, which is exact
/// for the well-separated spectra produced by Koopman operator fits. Each
/// eigenvector is unit norm with its largest-magnitude entry made real and
/// positive. Fails with diagnostics when an eigenvector does not converge,
/// which flags a defective or pathologically clustered eigenproblem.
pub fn eig_complex(a: &DMatrix<f64>) -> Result<(Vec<Complex64>, Vec<DVector<Complex64>>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(CoreError::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let schur = a
        .clone()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or_else(|| CoreError::SolverConvergence("Schur iteration did not converge".into()))?;
    let eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();

    let ac: DMatrix<Complex64> = a.map(|x| Complex64::new(x, 0.0));
    let norm_a = a.norm().max(f64::MIN_POSITIVE);
    let mut vectors = Vec::with_capacity(n);
    for &lambda in &eigenvalues {
        let vec = inverse_iteration(&ac, lambda, norm_a).ok_or_else(|| {
            CoreError::DefectiveEigenproblem(format!(
                "eigenvector for lambda = {lambda} did not converge; \
                 matrix norm {norm_a:.3e}, size {n}"
            ))
        })?;
        vectors.push(vec);
    }
    Ok((eigenvalues, vectors))
}

fn inverse_iteration(
    ac: &DMatrix<Complex64>,
    lambda: Complex64,
    norm_a: f64,
) -> Option<DVector<Complex64>> {
    let n = ac.nrows();
    // Shift slightly off the eigenvalue so the factorisation stays usable.
    let shift = lambda + Complex64::new(norm_a * 1e-13, norm_a * 1e-13);
    let mut b = ac.clone();
    for i in 0..n {
        b[(i, i)] -= shift;
    }
    let lu = b.lu();

    // Deterministic start vector with broken symmetry.
    let mut x = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.01 * i as f64, 0.0));
    x /= Complex64::new(x.norm(), 0.0);

    for _ in 0..5 {
        let mut y = lu.solve(&x)?;
        let norm = y.norm();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        y /= Complex64::new(norm, 0.0);
        let residual = (ac * &y - &y * lambda).norm() / norm_a;
        x = y;
        if residual < 1e-10 {
            return Some(normalize_phase(x));
        }
    }
    let residual = (ac * &x - &x * lambda).norm() / norm_a;
    if residual < 1e-8 {
        Some(normalize_phase(x))
    } else {
        None
    }
}

/// Rotate a unit vector so its largest-magnitude entry is real positive.
fn normalize_phase(mut v: DVector<Complex64>) -> DVector<Complex64> {
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best_abs {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best] / Complex64::new(best_abs, 0.0);
        v /= phase;
    }
    v
}

/// Solve the square complex system `G x = rhs` by LU with partial pivoting.
pub fn solve_complex(g: &DMatrix<Complex64>, rhs: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    g.clone().lu().solve(rhs).ok_or_else(|| {
        CoreError::DefectiveEigenproblem(
            "singular normal equations in amplitude fit (repeated DMD eigenvalues?)".into(),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_matrix(rng: &mut Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.normal())
    }

    #[test]
    fn identity_svd_full_rank() {
        let eye = DMatrix::<f64>::identity(3, 3);
        let svd = truncated_svd(&eye, 0.0, None).unwrap();
        assert_eq!(svd.rank(), 3);
        for i in 0..3 {
            assert!((svd.sigma[i] - 1.0).abs() < 1e-12);
        }
        assert!((svd.reconstruct() - eye).norm() < 1e-12);
    }

    #[test]
    fn tolerance_truncates_known_spectrum() {
        // Assemble from known factors with sigma = (10, 1, 1e-12); tol 1e-6
        // must retain exactly 2 modes.
        let mut rng = Rng::seed_from(1);
        let q1 = random_matrix(&mut rng, 8, 3).qr().q();
        let q2 = random_matrix(&mut rng, 6, 3).qr().q();
        let mut s = DMatrix::<f64>::zeros(3, 3);
        s[(0, 0)] = 10.0;
        s[(1, 1)] = 1.0;
        s[(2, 2)] = 1e-12;
        let a = &q1 * s * q2.transpose();
        let svd = truncated_svd(&a, 1e-6, None).unwrap();
        assert_eq!(svd.rank(), 2);
        assert!((svd.sigma[0] - 10.0).abs() < 1e-9);
        assert!((svd.sigma[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gram_route_matches_direct() {
        let mut rng = Rng::seed_from(2);
        // 1200 x 40 forces the Gram path; compare against the direct path.
        let a = random_matrix(&mut rng, 1200, 40);
        let gram = gram_svd(&a, 0.0, None).unwrap();
        let direct = direct_svd(&a, 0.0, None).unwrap();
        assert_eq!(gram.1.len(), direct.1.len());
        for i in 0..gram.1.len() {
            assert!(
                (gram.1[i] - direct.1[i]).abs() < 1e-8 * direct.1[0],
                "sigma {i}: {} vs {}",
                gram.1[i],
                direct.1[i]
            );
        }
        // Orthonormal factors and faithful reconstruction.
        let svd = truncated_svd(&a, 0.0, None).unwrap();
        let utu = svd.u.transpose() * &svd.u;
        assert!((utu - DMatrix::identity(40, 40)).norm() < 1e-10);
        assert!((svd.reconstruct() - &a).norm() / a.norm() < 1e-10);
    }

    #[test]
    fn sign_convention_is_deterministic() {
        let mut rng = Rng::seed_from(3);
        let a = random_matrix(&mut rng, 12, 5);
        let svd = truncated_svd(&a, 0.0, None).unwrap();
        for n in 0..svd.rank() {
            let col = svd.u.column(n);
            let max = col.iter().cloned().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(col.iter().any(|&x| (x.abs() - max).abs() < 1e-15 && x > 0.0));
        }
    }

    #[test]
    fn max_rank_caps_selection() {
        let mut rng = Rng::seed_from(4);
        let a = random_matrix(&mut rng, 10, 10);
        let svd = truncated_svd(&a, 0.0, Some(4)).unwrap();
        assert_eq!(svd.rank(), 4);
    }

    #[test]
    fn eckart_young_residual() {
        let mut rng = Rng::seed_from(5);
        let a = random_matrix(&mut rng, 15, 12);
        // Independent singular values via the Gram eigenvalues.
        let g = a.transpose() * &a;
        let (vals, _) = sym_eig_desc(g);
        let sig: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
        for n in [1usize, 3, 7] {
            let svd = truncated_svd(&a, 0.0, Some(n)).unwrap();
            let resid = (&a - svd.reconstruct()).norm();
            let expect: f64 = sig[n..].iter().map(|s| s * s).sum::<f64>().sqrt();
            assert!(
                (resid - expect).abs() <= 1e-8 * sig[0].max(1.0),
                "rank {n}: residual {resid} vs Eckart-Young {expect}"
            );
        }
    }

    #[test]
    fn zero_matrix_keeps_single_null_mode() {
        let z = DMatrix::<f64>::zeros(4, 3);
        let svd = truncated_svd(&z, 1e-8, None).unwrap();
        assert_eq!(svd.rank(), 1);
        assert_eq!(svd.sigma[0], 0.0);
    }

    #[test]
    fn complex_eigen_of_rotation() {
        // 2x2 rotation: eigenvalues cos(t) +- i sin(t).
        let t = 0.3f64;
        let a = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let (vals, vecs) = eig_complex(&a).unwrap();
        let mut angles: Vec<f64> = vals.iter().map(|z| z.arg()).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((angles[0] + t).abs() < 1e-12);
        assert!((angles[1] - t).abs() < 1e-12);
        let ac: DMatrix<Complex64> = a.map(|x| Complex64::new(x, 0.0));
        for (lam, v) in vals.iter().zip(&vecs) {
            let resid = (&ac * v - v * *lam).norm();
            assert!(resid < 1e-10, "residual {resid}");
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_eigen_random_residuals() {
        let mut rng = Rng::seed_from(6);
        let a = random_matrix(&mut rng, 9, 9);
        let ac: DMatrix<Complex64> = a.map(|x| Complex64::new(x, 0.0));
        let (vals, vecs) = eig_complex(&a).unwrap();
        for (lam, v) in vals.iter().zip(&vecs) {
            let resid = (&ac * v - v * *lam).norm() / a.norm();
            assert!(resid < 1e-9, "residual {resid} for lambda {lam}");
        }
    }

    #[test]
    fn operator_fit_recovers_linear_map() {
        let mut rng = Rng::seed_from(7);
        let r = random_matrix(&mut rng, 5, 5);
        let x = random_matrix(&mut rng, 5, 40);
        let y = &r * &x;
        let fitted = fit_operator(&y, &x, 1e-12).unwrap();
        assert!((fitted - r).norm() < 1e-9);
    }
}
