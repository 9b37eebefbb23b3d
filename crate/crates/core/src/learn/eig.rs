use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix: eigenvalues in descending
/// order and the matching orthonormal eigenvectors as columns.
///
/// Asymmetry up to `1e-10` (relative to the largest entry) is symmetrized
/// away. Each eigenvector is signed so that its largest-magnitude component
/// is positive, which makes the output deterministic.
pub fn eig_sym(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if !a.is_square() {
        return Err(Error::param("eig_sym needs a square matrix"));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eig_sym input"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let scale = a.amax().max(1.0);
    let sym = (a + a.transpose()) * 0.5;
    if (a - &sym).amax() > 1e-10 * scale {
        return Err(Error::param("eig_sym input is not symmetric"));
    }
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let pivot = v.iamax();
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(col, &(v * sign));
    }
    Ok((values, vectors))
}
