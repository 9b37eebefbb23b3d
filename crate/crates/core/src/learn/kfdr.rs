use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;

use super::eig_sym;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KfdrParams {
    /// Regularizer of the within-class covariance.
    pub gamma: f64,
    /// Split indices closer than this to either end are not scanned.
    pub scan_margin: usize,
}

impl Default for KfdrParams {
    fn default() -> Self {
        Self {
            gamma: 1e-3,
            scan_margin: 2,
        }
    }
}

/// Kernel Fisher discriminant ratio between samples `0..ell` and `ell..n`.
///
/// With `P` the group-centering projector and `delta` the mean-difference
/// coefficients (`-1/ell` then `1/(n-ell)`):
///
/// `ell (n-ell) / (n gamma) * [d'Kd - d'KP (n gamma I + PKP)^-1 PKd]`
///
/// which is the regularized Fisher ratio `<m2 - m1, (S_w + gamma I)^-1 (m2 - m1)>`
/// in feature space rewritten through the Gram matrix. Clamped at zero.
pub fn kfdr(k: &DMatrix<f64>, ell: usize, params: &KfdrParams) -> Result<f64> {
    let n = k.nrows();
    if !k.is_square() {
        return Err(Error::param("kfdr needs a square gram matrix"));
    }
    if ell == 0 || ell >= n {
        return Err(Error::param(format!("split index {ell} outside 1..{n}")));
    }
    if !(params.gamma > 0.0) {
        return Err(Error::param("gamma must be positive"));
    }
    let (n1, n2) = (ell as f64, (n - ell) as f64);
    let delta = DVector::from_fn(n, |i, _| if i < ell { -1.0 / n1 } else { 1.0 / n2 });
    let p = DMatrix::from_fn(n, n, |i, j| {
        let same = (i < ell) == (j < ell);
        let diag = if i == j { 1.0 } else { 0.0 };
        if !same {
            diag
        } else if i < ell {
            diag - 1.0 / n1
        } else {
            diag - 1.0 / n2
        }
    });
    let k_delta = k * &delta;
    let quad = delta.dot(&k_delta);
    let pkp = &p * k * &p;
    let (values, vectors) = eig_sym(&((&pkp + pkp.transpose()) * 0.5))?;
    let proj = vectors.transpose() * (&p * &k_delta);
    let ngamma = n as f64 * params.gamma;
    let correction: f64 = proj
        .iter()
        .zip(values.iter())
        .map(|(q, lambda)| q * q / (ngamma + lambda))
        .sum();
    // differences at rounding level (e.g. a constant K) are reported as 0
    let noise = 256.0 * f64::EPSILON * n as f64 * k.amax();
    let gap = quad - correction;
    Ok(if gap <= noise {
        0.0
    } else {
        n1 * n2 / ngamma * gap
    })
}

/// KFDR over every admissible split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KfdrScan {
    /// Split index of `values[0]`.
    pub first: usize,
    pub values: Vec<f64>,
    /// `values / max(values)`, or zeros when the maximum is zero.
    pub normalized: Vec<f64>,
    /// Split index attaining the maximum (smallest on ties).
    pub argmax: usize,
}

impl KfdrScan {
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).map(|i| self.first + i)
    }
}

/// Scans `ell` over `[margin + 1, n - margin - 1]`.
pub fn change_point_scan(k: &DMatrix<f64>, params: &KfdrParams) -> Result<KfdrScan> {
    let n = k.nrows();
    let m = params.scan_margin;
    if m == 0 {
        return Err(Error::param("scan margin must be at least 1"));
    }
    if n < 2 * m + 2 {
        return Err(Error::param(format!("{n} samples too few for margin {m}")));
    }
    let first = m + 1;
    let last = n - m - 1;
    let values = par::map_range(last - first + 1, |i| kfdr(k, first + i, params))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let max = values[best];
    let normalized = if max > 0.0 {
        values.iter().map(|v| v / max).collect()
    } else {
        vec![0.0; values.len()]
    };
    Ok(KfdrScan {
        first,
        values,
        normalized,
        argmax: first + best,
    })
}
