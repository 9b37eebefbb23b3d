//! Low-rank Gram approximations: random Fourier features for the PWGK and
//! Nyström for the PSSK.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{
    pssk_mirror_kernel, w_arc, BaseKernel, GramMatrix, KernelSpec, PointKernel, Rkhs, WeightParams,
};
use crate::learn::eig_sym;
use crate::par;
use crate::persistence::PersistenceDiagram;
use crate::rng::RandomSource;

/// Frequencies `z_1..z_M ~ N(0, sigma^-2 I)` on the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct RffSample {
    freqs: Vec<[f64; 2]>,
    sigma: f64,
    seed: u64,
}

impl RffSample {
    pub fn freqs(&self) -> &[[f64; 2]] {
        &self.freqs
    }

    pub fn m(&self) -> usize {
        self.freqs.len()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

pub fn sample_rff(sigma: f64, m: usize, seed: u64) -> Result<RffSample> {
    if m == 0 {
        return Err(Error::param("need at least one frequency"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma must be positive"));
    }
    let mut rng = RandomSource::new(seed);
    let scale = 1.0 / sigma;
    let freqs = (0..m)
        .map(|_| [rng.standard_normal() * scale, rng.standard_normal() * scale])
        .collect();
    Ok(RffSample { freqs, sigma, seed })
}

/// `B^a = sum_x w(x) exp(i z_a . x)` for every frequency `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct RffFeature {
    pub values: Vec<Complex64>,
}

/// Random Fourier feature of one reduced diagram. Diagonal points are dropped.
pub fn rff_feature(
    d: &PersistenceDiagram,
    weight: Option<&WeightParams>,
    s: &RffSample,
) -> Result<RffFeature> {
    let mut values = vec![Complex64::new(0.0, 0.0); s.m()];
    for x in d.finite_points()? {
        let pers = x[1] - x[0];
        if !(pers > 0.0) {
            continue;
        }
        let w = weight.map_or(1.0, |w| w_arc(pers, w));
        for (v, z) in values.iter_mut().zip(&s.freqs) {
            let phase = z[0] * x[0] + z[1] * x[1];
            *v += Complex64::from_polar(w, phase);
        }
    }
    Ok(RffFeature { values })
}

/// Approximate PWGK Gram matrix from random Fourier features.
///
/// Linear entries are `Re[(1/M) sum_a B_i^a conj(B_j^a)]`; the Gaussian RKHS
/// mode plugs the approximate inner products into the distance formula
/// (clamping negative squared distances at zero).
pub fn rff_gram(
    diagrams: &[PersistenceDiagram],
    spec: &KernelSpec,
    s: &RffSample,
) -> Result<GramMatrix> {
    let BaseKernel::Pwgk { sigma, weight } = spec.base else {
        return Err(Error::param(
            "random Fourier features need a shift-invariant (PWGK) base kernel",
        ));
    };
    if (sigma - s.sigma).abs() > 1e-12 * s.sigma {
        return Err(Error::param(format!(
            "spec sigma {sigma} does not match sample sigma {}",
            s.sigma
        )));
    }
    if diagrams.is_empty() {
        return Err(Error::param("empty diagram list"));
    }
    spec.validate()?;
    let degree = diagrams[0].degree();
    if let Some(d) = diagrams.iter().find(|d| d.degree() != degree) {
        return Err(Error::DegreeMismatch {
            left: degree,
            right: d.degree(),
        });
    }
    let features = par::map_slice(diagrams, |d| rff_feature(d, weight.as_ref(), s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let m = s.m();
    // real embedding [Re B, Im B] so that the Gram is F F^T / M
    let f = DMatrix::from_fn(diagrams.len(), 2 * m, |i, a| {
        let v = features[i].values[a % m];
        if a < m {
            v.re
        } else {
            v.im
        }
    });
    let inner = (&f * f.transpose()) / m as f64;
    let inner = (&inner + inner.transpose()) * 0.5;
    GramMatrix::new(crate::kernels::apply_rkhs(inner, spec.rkhs), Some(*spec))
}

/// Nyström-approximated PSSK Gram matrix.
///
/// `c` landmarks are drawn without replacement from the pooled generators of
/// all diagrams together with their mirror images. The base Gaussian
/// `exp(-|x-y|^2 / 8t)` is replaced by `k_x^T W^+ k_y`, with eigenvalues of
/// the landmark matrix `W` below `1e-10` discarded. Entries use the
/// mirror-antisymmetrized form `(1/16 pi t) <Psi_i, Psi_j>` with
/// `Psi = sum_x phi(x) - phi(mirror x)`, which equals the PSSK double sum
/// for the exact kernel and is positive semidefinite by construction.
pub fn nystrom_gram(
    diagrams: &[PersistenceDiagram],
    t: f64,
    c: usize,
    seed: u64,
) -> Result<GramMatrix> {
    nystrom_gram_with_rkhs(diagrams, &KernelSpec::pssk(t, Rkhs::Linear)?, c, seed)
}

/// [`nystrom_gram`] followed by the RKHS kernel of `spec`.
pub fn nystrom_gram_with_rkhs(
    diagrams: &[PersistenceDiagram],
    spec: &KernelSpec,
    c: usize,
    seed: u64,
) -> Result<GramMatrix> {
    let BaseKernel::Pssk { t } = spec.base else {
        return Err(Error::param(
            "Nyström approximation is implemented for the PSSK",
        ));
    };
    spec.validate()?;
    if diagrams.is_empty() {
        return Err(Error::param("empty diagram list"));
    }
    if c == 0 {
        return Err(Error::param("need at least one landmark"));
    }
    let points: Vec<Vec<[f64; 2]>> = diagrams
        .iter()
        .map(|d| {
            let mut p = d.finite_points()?;
            p.retain(|x| x[1] > x[0]);
            Ok(p)
        })
        .collect::<Result<_>>()?;
    let pool: Vec<[f64; 2]> = points
        .iter()
        .flatten()
        .flat_map(|&x| [x, [x[1], x[0]]])
        .collect();
    if c > pool.len() {
        return Err(Error::param(format!(
            "{c} landmarks requested from a pool of {}",
            pool.len()
        )));
    }
    let mut rng = RandomSource::new(seed);
    let landmarks: Vec<[f64; 2]> = rng
        .sample_indices(pool.len(), c)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    let k = pssk_mirror_kernel(t);
    let w = DMatrix::from_fn(c, c, |a, b| k.eval(landmarks[a], landmarks[b]));
    let (values, vectors) = eig_sym(&w)?;
    let keep: Vec<usize> = (0..c).filter(|&i| values[i] > 1e-10).collect();
    // projection phi(x) = Lambda^-1/2 U^T k_L(x), restricted to kept eigenpairs
    let proj = DMatrix::from_fn(keep.len(), c, |r, a| {
        vectors[(a, keep[r])] / values[keep[r]].sqrt()
    });

    let psi: Vec<DVector<f64>> = par::map_slice(&points, |pts| {
        let mut acc = DVector::zeros(c);
        for &x in pts {
            let mirror = [x[1], x[0]];
            for (a, &l) in landmarks.iter().enumerate() {
                acc[a] += k.eval(x, l) - k.eval(mirror, l);
            }
        }
        &proj * acc
    });
    let n = diagrams.len();
    let scale = 1.0 / (16.0 * PI * t);
    let inner = par::symmetric_matrix(n, |i, j| psi[i].dot(&psi[j]) * scale);
    GramMatrix::new(crate::kernels::apply_rkhs(inner, spec.rkhs), Some(*spec))
}
