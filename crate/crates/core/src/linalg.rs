//! Internal wrappers around the dense symmetric eigensolver.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Eigendecomposition of a symmetric matrix: `(values, vectors)` with
/// eigenvectors in columns. Fails only on eigensolver breakdown.
pub(crate) fn sym_eigen(m: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 0).ok_or_else(|| {
        Error::Numerical(format!("symmetric eigendecomposition failed for {n}x{n} matrix"))
    })?;
    Ok((eig.eigenvalues, eig.eigenvectors))
}

pub(crate) fn min_eigenvalue(x: &SymMatrix) -> Result<f64> {
    min_eigenvalue_dm(x.to_dmatrix())
}

pub(crate) fn min_eigenvalue_dm(m: DMatrix<f64>) -> Result<f64> {
    let (values, _) = sym_eigen(m)?;
    Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
}
