use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::build_cech2d;
use crate::geometry::PointCloud;
use crate::kernels::{gram, KernelSpecJson};
use crate::learn::{change_point_scan, kernel_pca, KfdrParams, KfdrScan};
use crate::par;
use crate::persistence::{compute_persistence, PersistenceDiagram};
use crate::rng::RandomSource;

const POINTS_PER_CIRCLE: usize = 40;
const RADIUS_NOISE: f64 = 0.03;
const ANGLE_JITTER: f64 = 0.25;
/// Filtration cutoff, past the death of a unit circle.
const R_MAX: f64 = 1.5;

fn noisy_circle(rng: &mut RandomSource, center: [f64; 2], out: &mut Vec<[f64; 2]>) {
    for k in 0..POINTS_PER_CIRCLE {
        let theta =
            2.0 * PI * (k as f64 + ANGLE_JITTER * (rng.uniform() - 0.5)) / POINTS_PER_CIRCLE as f64;
        let r = 1.0 + RADIUS_NOISE * rng.standard_normal();
        out.push([center[0] + r * theta.cos(), center[1] + r * theta.sin()]);
    }
}

/// `n_before` clouds sampled near one unit circle, then `n_after` clouds
/// near two disjoint unit circles.
pub fn gen_changepoint_sequence(
    n_before: usize,
    n_after: usize,
    rng: &mut RandomSource,
) -> Result<Vec<PointCloud>> {
    if n_before < 2 || n_after < 2 {
        return Err(Error::param("each regime needs at least two clouds"));
    }
    let mut clouds = Vec::with_capacity(n_before + n_after);
    for i in 0..n_before + n_after {
        let mut pts = Vec::new();
        if i < n_before {
            noisy_circle(rng, [0.0, 0.0], &mut pts);
        } else {
            noisy_circle(rng, [-1.5, 0.0], &mut pts);
            noisy_circle(rng, [1.5, 0.0], &mut pts);
        }
        clouds.push(PointCloud::from_points_2d(&pts)?);
    }
    Ok(clouds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChangepointConfig {
    pub n_before: usize,
    pub n_after: usize,
    pub seed: u64,
    pub gamma: f64,
    pub scan_margin: usize,
    pub kernel: KernelSpecJson,
}

impl Default for ChangepointConfig {
    fn default() -> Self {
        Self {
            n_before: 20,
            n_after: 20,
            seed: 0,
            gamma: 1e-3,
            scan_margin: 2,
            kernel: KernelSpecJson::parse(r#"{"rkhs":"gaussian"}"#).expect("valid literal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangepointResult {
    pub config: ChangepointConfig,
    /// Kernel with every median heuristic resolved.
    pub spec: KernelSpecJson,
    pub scan: KfdrScan,
    /// First two kernel PCA coordinates per cloud.
    pub kpca: Vec<[f64; 2]>,
    pub detected: usize,
}

pub(crate) fn d1_diagrams(clouds: &[PointCloud]) -> Result<Vec<PersistenceDiagram>> {
    par::map_slice(clouds, |x| {
        let f = build_cech2d(x, R_MAX)?;
        Ok(compute_persistence(&f, 1)?.swap_remove(1).reduced())
    })
    .into_iter()
    .collect()
}

/// Generates the sequence, embeds its degree-1 diagrams, and scans KFDR.
pub fn run_changepoint_experiment(cfg: &ChangepointConfig) -> Result<ChangepointResult> {
    let mut rng = RandomSource::new(cfg.seed);
    let clouds = gen_changepoint_sequence(cfg.n_before, cfg.n_after, &mut rng)?;
    let diagrams = d1_diagrams(&clouds)?;
    let spec = cfg.kernel.resolve(&diagrams)?;
    let k = gram(&diagrams, &spec)?.into_entries();
    let params = KfdrParams {
        gamma: cfg.gamma,
        scan_margin: cfg.scan_margin,
    };
    let scan = change_point_scan(&k, &params)?;
    let coords = kernel_pca(&k, 2)?;
    let kpca = (0..coords.nrows())
        .map(|i| [coords[(i, 0)], coords[(i, 1)]])
        .collect();
    Ok(ChangepointResult {
        config: cfg.clone(),
        spec: spec.to_json(),
        detected: scan.argmax,
        scan,
        kpca,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_determinism() {
        let a = gen_changepoint_sequence(2, 2, &mut RandomSource::new(3)).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a[0].len(), POINTS_PER_CIRCLE);
        assert_eq!(a[3].len(), 2 * POINTS_PER_CIRCLE);
        assert_eq!(
            a,
            gen_changepoint_sequence(2, 2, &mut RandomSource::new(3)).unwrap()
        );
        assert!(gen_changepoint_sequence(1, 2, &mut RandomSource::new(3)).is_err());
    }
}
