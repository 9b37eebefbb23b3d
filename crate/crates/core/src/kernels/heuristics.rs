use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

use super::gram::{check_collection, gram};
use super::spec::{KernelSpec, Rkhs, WeightParams};

/// Median with the midpoint convention for even lengths. Sorts in place.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Data-driven kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianHeuristics {
    pub sigma: f64,
    pub c: f64,
    /// Median pairwise RKHS distance under `(sigma, C, p)`. Zero when all
    /// diagrams coincide; callers must not use it as a bandwidth unguarded.
    pub tau_seed: f64,
}

/// Median over diagrams of the median pairwise distance between their
/// points. Diagrams with fewer than two points are skipped.
pub(crate) fn sigma_heuristic(diagrams: &[PersistenceDiagram]) -> Result<f64> {
    let mut per_diagram = Vec::new();
    for d in diagrams {
        let pts = d.finite_points()?;
        if pts.len() < 2 {
            continue;
        }
        let mut dists = Vec::with_capacity(pts.len() * (pts.len() - 1) / 2);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                dists.push(
                    ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt(),
                );
            }
        }
        per_diagram.push(median(&mut dists).expect("nonempty"));
    }
    let sigma = median(&mut per_diagram)
        .ok_or_else(|| Error::param("sigma heuristic needs a diagram with at least two points"))?;
    if !(sigma > 0.0) {
        return Err(Error::param(
            "sigma heuristic is zero (coincident generators)",
        ));
    }
    Ok(sigma)
}

pub(crate) fn c_heuristic(diagrams: &[PersistenceDiagram], p: f64) -> Result<f64> {
    let mut per_diagram = Vec::new();
    for d in diagrams {
        let mut pers: Vec<f64> = d.finite_points()?.iter().map(|x| x[1] - x[0]).collect();
        if let Some(m) = median(&mut pers) {
            per_diagram.push(m);
        }
    }
    let m = median(&mut per_diagram).ok_or_else(|| Error::param("all diagrams are empty"))?;
    if !(m > 0.0) {
        return Err(Error::param("median persistence is zero"));
    }
    Ok(m.powf(-p))
}

/// Median of `d(D_i, D_j)` over `i < j` under the base kernel of `spec`.
/// Returns 0 for fewer than two diagrams.
pub fn median_rkhs_distance(diagrams: &[PersistenceDiagram], spec: &KernelSpec) -> Result<f64> {
    check_collection(diagrams)?;
    let inner = gram(diagrams, &spec.with_rkhs(Rkhs::Linear))?.into_entries();
    let n = diagrams.len();
    let mut dists = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in i + 1..n {
            dists.push(
                (inner[(i, i)] + inner[(j, j)] - 2.0 * inner[(i, j)])
                    .max(0.0)
                    .sqrt(),
            );
        }
    }
    Ok(median(&mut dists).unwrap_or(0.0))
}

pub(crate) fn median_heuristics_with_sigma(
    diagrams: &[PersistenceDiagram],
    p: f64,
    sigma: f64,
    with_tau: bool,
) -> Result<MedianHeuristics> {
    let c = c_heuristic(diagrams, p)?;
    let tau_seed = if with_tau {
        let spec = KernelSpec::pwgk(sigma, Some(WeightParams::new(c, p)?), Rkhs::Linear)?;
        median_rkhs_distance(diagrams, &spec)?
    } else {
        0.0
    };
    Ok(MedianHeuristics { sigma, c, tau_seed })
}

/// `sigma`, `C = median(pers)^-p` and the median RKHS distance, in that order
/// (tau uses the already fixed `sigma` and `C`).
pub fn median_heuristics(diagrams: &[PersistenceDiagram], p: f64) -> Result<MedianHeuristics> {
    if !(p > 0.0) {
        return Err(Error::param("p must be positive"));
    }
    if diagrams.iter().all(PersistenceDiagram::is_empty) {
        return Err(Error::param("all diagrams are empty"));
    }
    let sigma = sigma_heuristic(diagrams)?;
    median_heuristics_with_sigma(diagrams, p, sigma, true)
}
