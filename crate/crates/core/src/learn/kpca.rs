use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::eig_sym;

/// `H K H` with `H = I - (1/n) 1 1^T`.
pub fn center_gram(k: &DMatrix<f64>) -> DMatrix<f64> {
    let n = k.nrows();
    let row_means = k.row_mean();
    let col_means = k.column_mean();
    let total = k.mean();
    DMatrix::from_fn(n, n, |i, j| k[(i, j)] - col_means[i] - row_means[j] + total)
}

/// Kernel PCA coordinates: the top-`k` eigenvectors of the centered Gram
/// matrix scaled by `sqrt(lambda)`. Nonpositive eigenvalues give zero columns.
pub fn kernel_pca(gram: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let n = gram.nrows();
    if k == 0 || k > n {
        return Err(Error::param(format!(
            "kpca needs 1 <= k <= n = {n}, got {k}"
        )));
    }
    let (values, vectors) = eig_sym(&center_gram(gram))?;
    let mut coords = DMatrix::zeros(n, k);
    for c in 0..k {
        if values[c] > 0.0 {
            coords.set_column(c, &(vectors.column(c) * values[c].sqrt()));
        }
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_gram_gives_zero_coordinates() {
        let coords = kernel_pca(&DMatrix::from_element(5, 5, 1.0), 2).unwrap();
        assert!(coords.amax() < 1e-12);
    }

    #[test]
    fn collinear_features_have_one_component() {
        // features 0, 1, 3 on a line; Gram of inner products
        let f = [0.0, 1.0, 3.0];
        let g = DMatrix::from_fn(3, 3, |i, j| f[i] * f[j]);
        let coords = kernel_pca(&g, 2).unwrap();
        assert!(coords.column(1).amax() < 1e-7);
        // centered features -4/3, -1/3, 5/3 up to sign
        let c0: Vec<f64> = coords.column(0).iter().map(|v| v.abs()).collect();
        for (a, b) in c0.iter().zip([4.0 / 3.0, 1.0 / 3.0, 5.0 / 3.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn coordinates_reproduce_centered_gram() {
        let pts = [[0.0, 1.0], [2.0, 0.5], [1.0, 1.0], [3.0, 3.0]];
        let g = DMatrix::from_fn(4, 4, |i, j| pts[i][0] * pts[j][0] + pts[i][1] * pts[j][1]);
        let coords = kernel_pca(&g, 2).unwrap();
        let back = &coords * coords.transpose();
        assert!((back - center_gram(&g)).amax() < 1e-8);
    }

    #[test]
    fn k_out_of_range() {
        assert!(kernel_pca(&DMatrix::identity(3, 3), 4).is_err());
        assert!(kernel_pca(&DMatrix::identity(3, 3), 0).is_err());
    }
}
