use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{GramMatrix, KernelSpec};

/// Gram matrix with one `±1` label per row.
#[derive(Debug, Clone)]
pub struct LabeledGram {
    gram: GramMatrix,
    labels: Vec<i8>,
}

impl LabeledGram {
    pub fn new(gram: GramMatrix, labels: Vec<i8>) -> Result<Self> {
        if labels.len() != gram.n() {
            return Err(Error::DimensionMismatch {
                expected: gram.n(),
                found: labels.len(),
            });
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::param("labels must be +1 or -1"));
        }
        Ok(Self { gram, labels })
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub reg_c: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl SvmParams {
    pub fn new(reg_c: f64) -> Self {
        Self {
            reg_c,
            tol: 1e-4,
            max_iter: 10_000_000,
        }
    }
}

/// Trained soft-margin SVM on a precomputed kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    /// Dual coefficients, `0 <= alpha_i <= reg_c`.
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub labels: Vec<i8>,
    pub reg_c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<KernelSpec>,
    /// Training inputs, so that prediction can rebuild cross-grams.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub training_files: Vec<String>,
    pub iterations: usize,
    pub converged: bool,
}

impl SvmModel {
    /// `sum_i alpha_i y_i K(x, x_i) + b` for each row of the cross-gram.
    pub fn decision_values(&self, cross: &DMatrix<f64>) -> Result<Vec<f64>> {
        if cross.ncols() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                found: cross.ncols(),
            });
        }
        Ok((0..cross.nrows())
            .map(|r| {
                let s: f64 = (0..cross.ncols())
                    .filter(|&i| self.alpha[i] != 0.0)
                    .map(|i| self.alpha[i] * f64::from(self.labels[i]) * cross[(r, i)])
                    .sum();
                s + self.bias
            })
            .collect())
    }
}

pub fn svm_train(lg: &LabeledGram, reg_c: f64) -> Result<SvmModel> {
    svm_train_with(lg, &SvmParams::new(reg_c))
}

/// SMO with second-order working-set selection on the C-SVM dual
///
/// `min 1/2 a'Qa - 1'a` s.t. `y'a = 0`, `0 <= a <= C`, `Q_ij = y_i y_j K_ij`.
pub fn svm_train_with(lg: &LabeledGram, params: &SvmParams) -> Result<SvmModel> {
    let c = params.reg_c;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param("reg_c must be positive"));
    }
    let y: Vec<f64> = lg.labels.iter().map(|&v| f64::from(v)).collect();
    if !(y.iter().any(|&v| v > 0.0) && y.iter().any(|&v| v < 0.0)) {
        return Err(Error::SingleClass);
    }
    let k = lg.gram.psd_floor()?.into_entries();
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[(i, j)];
    const TAU: f64 = 1e-12;

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iter {
        // i maximizes -y_t G_t over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut gmax_idx = None;
        for t in 0..n {
            let in_up = if y[t] > 0.0 {
                !upper(alpha[t])
            } else {
                !lower(alpha[t])
            };
            if in_up && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                gmax_idx = Some(t);
            }
        }
        let Some(i) = gmax_idx else {
            converged = true;
            break;
        };
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best_j = None;
        let mut obj_min = f64::INFINITY;
        for t in 0..n {
            let in_low = if y[t] > 0.0 {
                !lower(alpha[t])
            } else {
                !upper(alpha[t])
            };
            if !in_low {
                continue;
            }
            let v = y[t] * grad[t];
            gmax2 = gmax2.max(v);
            let b = gmax + v;
            if b > 0.0 {
                let a = k[(i, i)] + k[(t, t)] - 2.0 * k[(i, t)];
                let obj = -(b * b) / if a > 0.0 { a } else { TAU };
                if obj <= obj_min {
                    obj_min = obj;
                    best_j = Some(t);
                }
            }
        }
        let j = match best_j {
            Some(j) if gmax + gmax2 >= params.tol => j,
            _ => {
                converged = true;
                break;
            }
        };
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = k[(i, i)] + k[(j, j)] + 2.0 * q(i, j);
            let delta = (-grad[i] - grad[j]) / if quad > 0.0 { quad } else { TAU };
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = k[(i, i)] + k[(j, j)] - 2.0 * q(i, j);
            let delta = (grad[i] - grad[j]) / if quad > 0.0 { quad } else { TAU };
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(i, t) * di + q(j, t) * dj;
        }
    }

    // bias from free vectors, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    };

    Ok(SvmModel {
        alpha,
        bias: -rho,
        labels: lg.labels.clone(),
        reg_c: c,
        spec: lg.gram.spec().copied(),
        training_files: lg.gram.labels().map(<[String]>::to_vec).unwrap_or_default(),
        iterations,
        converged,
    })
}

/// Sign of the decision value; exact zero predicts `+1`.
pub fn svm_predict(model: &SvmModel, cross: &DMatrix<f64>) -> Result<Vec<i8>> {
    Ok(model
        .decision_values(cross)?
        .into_iter()
        .map(|v| if v >= 0.0 { 1 } else { -1 })
        .collect())
}
