//! Dense linear-algebra helpers shared by the estimation and training code.
//!
//! The matrices involved are small (class-count or feature-dimension sized),
//! so everything here routes through straightforward dense factorizations.

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};

/// Default relative cutoff for singular values in [`pseudo_inverse`].
pub const DEFAULT_PINV_TOL: f64 = 1e-10;

pub(crate) fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub(crate) fn from_nalgebra(a: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| a[(i, j)])
}

/// Moore-Penrose pseudo-inverse via singular value decomposition.
///
/// Singular values below `tol` times the largest singular value are treated
/// as zero, so rank-deficient inputs yield the minimum-norm inverse instead
/// of amplifying noise along null directions. Fails if `a` contains
/// non-finite entries or the decomposition does not converge.
pub fn pseudo_inverse(a: &Array2<f64>, tol: f64) -> Result<Array2<f64>> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "pseudo-inverse tolerance must be finite and non-negative, got {tol}"
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "pseudo-inverse input contains non-finite entries".into(),
        ));
    }
    let m = to_nalgebra(a);
    let svd = m.svd(true, true);
    let max_sv = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let pinv = svd
        .pseudo_inverse(tol * max_sv)
        .map_err(|msg| Error::DegenerateSystem(format!("pseudo-inverse failed: {msg}")))?;
    Ok(from_nalgebra(&pinv))
}

/// Solves `A X = B` for symmetric positive-definite `A` via Cholesky.
///
/// Returns `None` when the factorization fails, which is how callers detect
/// a singular or indefinite system.
pub(crate) fn solve_spd(a: &Array2<f64>, b: &Array2<f64>) -> Option<Array2<f64>> {
    let chol = to_nalgebra(a).cholesky()?;
    let x = chol.solve(&to_nalgebra(b));
    Some(from_nalgebra(&x))
}

/// Frobenius norm of a dense matrix.
pub fn frobenius_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
