use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::rng::RandomSource;

const R2: f64 = 0.2;
const N2: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    /// Birth threshold.
    #[serde(default = "default_a_b")]
    pub a_b: f64,
    /// Death threshold.
    #[serde(default = "default_a_d")]
    pub a_d: f64,
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_a_b() -> f64 {
    1.0
}
fn default_a_d() -> f64 {
    4.0
}
fn default_n_train() -> usize {
    100
}
fn default_n_test() -> usize {
    99
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            a_b: default_a_b(),
            a_d: default_a_d(),
            n_train: default_n_train(),
            n_test: default_n_test(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a_b > 0.0 && self.a_d > 0.0 && self.a_b < self.a_d) {
            return Err(Error::param("need 0 < a_b < a_d"));
        }
        Ok(())
    }
}

/// The latent draws behind one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Noiseless radius.
    pub r1o: f64,
    /// Noiseless point count.
    pub n1o: usize,
    pub r1: f64,
    pub n1: usize,
    pub center: [f64; 2],
    pub has_s2: bool,
    pub z0: bool,
    pub z1: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthInstance {
    pub cloud: PointCloud,
    /// `+1` iff exactly one of `z0`, `z1` holds.
    pub label: i8,
    pub provenance: Provenance,
}

/// Overrides for individual draws. The generator still consumes every draw
/// from the stream, so forcing one value never shifts the others.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ForcedDraws {
    pub t: Option<f64>,
    pub n1o: Option<usize>,
    pub w: Option<f64>,
    pub u: Option<f64>,
    pub v: Option<[f64; 2]>,
    pub has_s2: Option<bool>,
}

pub fn gen_instance(cfg: &SynthConfig, rng: &mut RandomSource) -> SynthInstance {
    gen_instance_forced(cfg, rng, &ForcedDraws::default())
}

fn circle(center: [f64; 2], radius: f64, n: usize) -> impl Iterator<Item = [f64; 2]> {
    (0..n).map(move |k| {
        let theta = 2.0 * PI * k as f64 / n as f64;
        [
            center[0] + radius * theta.cos(),
            center[1] + radius * theta.sin(),
        ]
    })
}

/// Draw order: `T`, `N1o`, `W`, `U`, `V1`, `V2`, then the `S2` coin.
pub fn gen_instance_forced(
    cfg: &SynthConfig,
    rng: &mut RandomSource,
    forced: &ForcedDraws,
) -> SynthInstance {
    let drawn_t = rng.standard_normal();
    let t = forced.t.unwrap_or(drawn_t);
    let r1o = (1.0 + 8.0 * t * t).min(10.0);
    let n_star = PI * r1o / cfg.a_b;
    let lo = (n_star / 2.0).ceil() as i64;
    let hi = ((4.0 * n_star).floor() as i64).max(lo);
    let drawn_n = rng.int_inclusive(lo, hi) as usize;
    let n1o = forced.n1o.unwrap_or(drawn_n).max(1);
    let drawn_w = rng.standard_normal();
    let drawn_u = rng.standard_normal();
    let w = forced.w.unwrap_or(drawn_w);
    let u = forced.u.unwrap_or(drawn_u);
    let drawn_v = [rng.normal(0.0, 2f64.sqrt()), rng.normal(0.0, 2f64.sqrt())];
    let v = forced.v.unwrap_or(drawn_v);
    let coin = rng.bernoulli(0.5);
    let has_s2 = forced.has_s2.unwrap_or(coin);

    let r1 = r1o + w * w;
    let n1 = ((n1o as f64 + 2.0 * u).ceil().max(3.0)) as usize;
    let center = [1.5 * r1 + v[0] * v[0], 1.5 * r1 + v[1] * v[1]];

    let mut pts: Vec<[f64; 2]> = circle(center, r1, n1).collect();
    if has_s2 {
        pts.extend(circle([0.0, 0.0], R2, N2));
    }
    let z0 = has_s2;
    let z1 = PI * r1o / n1o as f64 <= cfg.a_b && r1o >= cfg.a_d;
    SynthInstance {
        cloud: PointCloud::from_points_2d(&pts).expect("generated points are finite"),
        label: if z0 ^ z1 { 1 } else { -1 },
        provenance: Provenance {
            r1o,
            n1o,
            r1,
            n1,
            center,
            has_s2,
            z0,
            z1,
        },
    }
}

/// `n_train` then `n_test` instances from one stream seeded by `cfg.seed`.
pub fn gen_dataset(cfg: &SynthConfig) -> Result<(Vec<SynthInstance>, Vec<SynthInstance>)> {
    cfg.validate()?;
    let mut rng = RandomSource::new(cfg.seed);
    let train = (0..cfg.n_train)
        .map(|_| gen_instance(cfg, &mut rng))
        .collect();
    let test = (0..cfg.n_test)
        .map(|_| gen_instance(cfg, &mut rng))
        .collect();
    Ok((train, test))
}
