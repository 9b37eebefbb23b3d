use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

use super::spec::{BaseKernel, KernelSpec, Rkhs, WeightParams};

/// `arctan(C * pers^p)`: zero on the diagonal, increasing, below `pi/2`.
pub fn w_arc(pers: f64, w: &WeightParams) -> f64 {
    (w.c() * pers.powf(w.p())).atan()
}

/// Positive definite kernel on the birth–death plane.
pub trait PointKernel: Sync {
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> f64;
}

fn sq_dist(x: [f64; 2], y: [f64; 2]) -> f64 {
    let (a, b) = (x[0] - y[0], x[1] - y[1]);
    a * a + b * b
}

#[derive(Debug, Clone, Copy)]
pub struct GaussianPointKernel {
    pub sigma: f64,
}

impl PointKernel for GaussianPointKernel {
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        (-sq_dist(x, y) / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// `k^w(x, y) = w(x) w(y) k(x, y)` with `w = w_arc`.
#[derive(Debug, Clone, Copy)]
pub struct WeightedPointKernel<K> {
    pub base: K,
    pub weight: WeightParams,
}

impl<K: PointKernel> PointKernel for WeightedPointKernel<K> {
    fn eval(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let wx = w_arc(x[1] - x[0], &self.weight);
        let wy = w_arc(y[1] - y[0], &self.weight);
        wx * wy * self.base.eval(x, y)
    }
}

/// Inner product of the kernel embeddings of two weighted discrete measures.
pub fn measure_inner<K: PointKernel>(
    k: &K,
    xs: &[[f64; 2]],
    x_weights: &[f64],
    ys: &[[f64; 2]],
    y_weights: &[f64],
) -> f64 {
    let mut total = 0.0;
    for (&x, &wx) in xs.iter().zip(x_weights) {
        let mut row = 0.0;
        for (&y, &wy) in ys.iter().zip(y_weights) {
            row += wy * k.eval(x, y);
        }
        total += wx * row;
    }
    total
}

fn check_degrees(d: &PersistenceDiagram, e: &PersistenceDiagram) -> Result<()> {
    if d.degree() != e.degree() {
        return Err(Error::DegreeMismatch {
            left: d.degree(),
            right: e.degree(),
        });
    }
    Ok(())
}

/// Weighted-measure route: `<sum_x w(x) k(., x), sum_y w(y) k(., y)>` in the
/// RKHS of the Gaussian kernel.
pub fn embedding_inner_weighted_measure(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    sigma: f64,
    weight: &WeightParams,
) -> Result<f64> {
    check_degrees(d, e)?;
    let (dp, ep) = (d.finite_points()?, e.finite_points()?);
    let wd: Vec<f64> = dp.iter().map(|x| w_arc(x[1] - x[0], weight)).collect();
    let we: Vec<f64> = ep.iter().map(|x| w_arc(x[1] - x[0], weight)).collect();
    Ok(measure_inner(
        &GaussianPointKernel { sigma },
        &dp,
        &wd,
        &ep,
        &we,
    ))
}

/// Weighted-kernel route: unweighted measures embedded with `k^w`.
pub fn embedding_inner_weighted_kernel(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    sigma: f64,
    weight: &WeightParams,
) -> Result<f64> {
    check_degrees(d, e)?;
    let (dp, ep) = (d.finite_points()?, e.finite_points()?);
    let k = WeightedPointKernel {
        base: GaussianPointKernel { sigma },
        weight: *weight,
    };
    Ok(measure_inner(
        &k,
        &dp,
        &vec![1.0; dp.len()],
        &ep,
        &vec![1.0; ep.len()],
    ))
}

/// A diagram's finite points with their measure weights under a base kernel.
#[derive(Debug, Clone)]
pub(crate) struct EmbeddedDiagram {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl EmbeddedDiagram {
    /// Points on the diagonal carry no mass and are dropped.
    pub fn new(d: &PersistenceDiagram, base: &BaseKernel) -> Result<Self> {
        let mut points = d.finite_points()?;
        points.retain(|x| x[1] > x[0]);
        let weights = match base {
            BaseKernel::Pwgk {
                weight: Some(w), ..
            } => points.iter().map(|x| w_arc(x[1] - x[0], w)).collect(),
            _ => vec![1.0; points.len()],
        };
        Ok(Self { points, weights })
    }

    /// Inner product of two embeddings under `base`.
    pub fn inner(&self, other: &Self, base: &BaseKernel) -> f64 {
        match *base {
            BaseKernel::Pwgk { sigma, .. } => {
                let scale = 1.0 / (2.0 * sigma * sigma);
                let mut total = 0.0;
                for (&x, &wx) in self.points.iter().zip(&self.weights) {
                    if wx == 0.0 {
                        continue;
                    }
                    let mut row = 0.0;
                    for (&y, &wy) in other.points.iter().zip(&other.weights) {
                        row += wy * (-sq_dist(x, y) * scale).exp();
                    }
                    total += wx * row;
                }
                total
            }
            BaseKernel::Pssk { t } => {
                let scale = 1.0 / (8.0 * t);
                let mut total = 0.0;
                for &x in &self.points {
                    for &y in &other.points {
                        let mirror = [y[1], y[0]];
                        total +=
                            (-sq_dist(x, y) * scale).exp() - (-sq_dist(x, mirror) * scale).exp();
                    }
                }
                total / (8.0 * PI * t)
            }
        }
    }
}

/// Gaussian `exp(-|x-y|^2 / 8t)` underlying the PSSK.
pub(crate) fn pssk_mirror_kernel(t: f64) -> GaussianPointKernel {
    GaussianPointKernel {
        sigma: (4.0 * t).sqrt(),
    }
}

/// Inner product of the two diagrams' embeddings under `spec.base` (the
/// linear RKHS kernel). For the PWGK this is
/// `sum_x sum_y w(x) w(y) exp(-|x-y|^2 / 2 sigma^2)`.
pub fn kernel_linear(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    spec: &KernelSpec,
) -> Result<f64> {
    check_degrees(d, e)?;
    let a = EmbeddedDiagram::new(d, &spec.base)?;
    let b = EmbeddedDiagram::new(e, &spec.base)?;
    Ok(a.inner(&b, &spec.base))
}

/// Squared RKHS distance between the embeddings, clamped at zero.
pub fn rkhs_distance_sq(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    spec: &KernelSpec,
) -> Result<f64> {
    check_degrees(d, e)?;
    let a = EmbeddedDiagram::new(d, &spec.base)?;
    let b = EmbeddedDiagram::new(e, &spec.base)?;
    let base = &spec.base;
    Ok((a.inner(&a, base) + b.inner(&b, base) - 2.0 * a.inner(&b, base)).max(0.0))
}

/// `exp(-d^2 / 2 tau^2)` on the RKHS distance. Requires a Gaussian RKHS spec.
pub fn kernel_gaussian_rkhs(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    spec: &KernelSpec,
) -> Result<f64> {
    let Rkhs::Gaussian { tau } = spec.rkhs else {
        return Err(Error::param(
            "kernel_gaussian_rkhs needs a gaussian rkhs spec",
        ));
    };
    let d2 = rkhs_distance_sq(d, e, spec)?;
    Ok((-d2 / (2.0 * tau * tau)).exp())
}

/// Persistence scale space kernel with scale `t`.
pub fn kernel_pssk(d: &PersistenceDiagram, e: &PersistenceDiagram, t: f64) -> Result<f64> {
    let spec = KernelSpec::pssk(t, Rkhs::Linear)?;
    kernel_linear(d, e, &spec)
}

/// Kernel value under `spec`, dispatching on the RKHS mode.
pub fn kernel_value(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    spec: &KernelSpec,
) -> Result<f64> {
    match spec.rkhs {
        Rkhs::Linear => kernel_linear(d, e, spec),
        Rkhs::Gaussian { .. } => kernel_gaussian_rkhs(d, e, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dgm(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::from_points(1, points).unwrap()
    }

    fn pwgk(sigma: f64, c: f64, p: f64) -> KernelSpec {
        KernelSpec::pwgk(sigma, Some(WeightParams::new(c, p).unwrap()), Rkhs::Linear).unwrap()
    }

    #[test]
    fn w_arc_examples() {
        let w = WeightParams::new(1.0, 1.0).unwrap();
        assert_eq!(w_arc(0.0, &w), 0.0);
        assert_abs_diff_eq!(w_arc(1.0, &w), PI / 4.0, epsilon = 1e-15);
        let big = WeightParams::new(1e6, 5.0).unwrap();
        assert!(w_arc(1e3, &big) < PI / 2.0 + 1e-15);
        assert!(w_arc(2.0, &w) > w_arc(1.0, &w));
    }

    #[test]
    fn linear_examples() {
        let d = dgm(&[(0.0, 1.0)]);
        assert_abs_diff_eq!(
            kernel_linear(&d, &d, &pwgk(3.7, 1.0, 1.0)).unwrap(),
            PI * PI / 16.0,
            epsilon = 1e-15
        );
        assert_eq!(
            kernel_linear(&dgm(&[]), &d, &pwgk(1.0, 1.0, 1.0)).unwrap(),
            0.0
        );
        let e = dgm(&[(0.0, 2.0)]);
        // independent scalar evaluation
        let expected = 1f64.atan() * 2f64.atan() * (-0.5f64).exp();
        assert_abs_diff_eq!(expected, 0.527_410_29, epsilon = 1e-8);
        assert_abs_diff_eq!(
            kernel_linear(&d, &e, &pwgk(1.0, 1.0, 1.0)).unwrap(),
            expected,
            epsilon = 1e-15
        );
    }

    #[test]
    fn unweighted_uses_unit_weights() {
        let spec = KernelSpec::pwgk(1.0, None, Rkhs::Linear).unwrap();
        let d = dgm(&[(0.0, 1.0), (0.0, 1.0)]);
        assert_abs_diff_eq!(kernel_linear(&d, &d, &spec).unwrap(), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn distance_examples() {
        let d = dgm(&[(0.0, 1.0), (0.3, 0.9)]);
        let spec = pwgk(0.7, 2.0, 1.0);
        assert_eq!(rkhs_distance_sq(&d, &d, &spec).unwrap(), 0.0);
        let single = dgm(&[(0.0, 1.0)]);
        assert_abs_diff_eq!(
            rkhs_distance_sq(&single, &dgm(&[]), &spec).unwrap(),
            2f64.atan().powi(2),
            epsilon = 1e-15
        );
    }

    #[test]
    fn gaussian_rkhs_examples() {
        let d = dgm(&[(0.0, 1.0)]);
        let e = dgm(&[]);
        let lin = pwgk(1.0, 1.0, 1.0);
        let d2 = rkhs_distance_sq(&d, &e, &lin).unwrap();
        let tau = (d2 / 2.0).sqrt();
        let g = lin.with_rkhs(Rkhs::Gaussian { tau });
        assert_abs_diff_eq!(
            kernel_gaussian_rkhs(&d, &e, &g).unwrap(),
            (-1f64).exp(),
            epsilon = 1e-15
        );
        assert_eq!(kernel_gaussian_rkhs(&d, &d, &g).unwrap(), 1.0);
        let wider = lin.with_rkhs(Rkhs::Gaussian { tau: 2.0 * tau });
        assert!(
            kernel_gaussian_rkhs(&d, &e, &wider).unwrap()
                > kernel_gaussian_rkhs(&d, &e, &g).unwrap()
        );
        assert!(kernel_gaussian_rkhs(&d, &e, &lin).is_err());
    }

    #[test]
    fn pssk_examples() {
        let diag = dgm(&[(0.5, 0.5), (1.0, 1.0)]);
        let e = dgm(&[(0.0, 1.0), (0.2, 3.0)]);
        assert_abs_diff_eq!(kernel_pssk(&diag, &e, 0.3).unwrap(), 0.0, epsilon = 1e-15);
        let d = dgm(&[(0.0, 1.0)]);
        let t: f64 = 0.25;
        let expected = (1.0 - (-2.0 / (8.0 * t)).exp()) / (8.0 * PI * t);
        assert_abs_diff_eq!(kernel_pssk(&d, &d, t).unwrap(), expected, epsilon = 1e-15);
        assert!(expected > 0.0);
    }

    #[test]
    fn errors_on_essential_and_degree() {
        let inf = dgm(&[(0.0, f64::INFINITY)]);
        let spec = pwgk(1.0, 1.0, 1.0);
        assert!(matches!(
            kernel_linear(&inf, &inf, &spec),
            Err(Error::InfiniteDeath)
        ));
        let d0 = PersistenceDiagram::empty(0);
        assert!(matches!(
            kernel_linear(&d0, &dgm(&[]), &spec),
            Err(Error::DegreeMismatch { .. })
        ));
    }
}
