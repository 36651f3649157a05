//! Thin shared wrappers over nalgebra's dense symmetric routines.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Eigenvalues of a symmetric matrix, sorted ascending.
pub(crate) fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Forces exact symmetry; removes the rounding skew left by solves.
pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
pub(crate) fn spd_inverse(m: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularMatrix(context.to_string()))?;
    let mut inv = chol.inverse();
    symmetrize(&mut inv);
    Ok(inv)
}

/// Eigenvalues of A * X for symmetric positive definite A and symmetric X,
/// sorted ascending. Computed through the congruence L^T X L with A = L L^T,
/// which has the same spectrum and is exactly symmetric, so the result is
/// real by construction.
pub(crate) fn product_eigenvalues(
    a: &DMatrix<f64>,
    x: &DMatrix<f64>,
    context: &str,
) -> Result<Vec<f64>> {
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite(context.to_string()))?;
    let l = chol.l();
    let mut m = l.transpose() * x * &l;
    symmetrize(&mut m);
    Ok(sym_eigenvalues(&m))
}
