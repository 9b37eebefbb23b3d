use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

use super::heuristics::{median_heuristics_with_sigma, median_rkhs_distance, sigma_heuristic};

/// Weight exponent used unless configured otherwise (`p > d + 1` for `d = 3`).
pub const DEFAULT_P: f64 = 5.0;

/// Parameters of `w_arc(x) = arctan(C * pers(x)^p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    c: f64,
    p: f64,
}

impl WeightParams {
    pub fn new(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) || !(p > 0.0 && p.is_finite()) {
            return Err(Error::param(format!(
                "weight needs C > 0 and p > 0, got C={c}, p={p}"
            )));
        }
        Ok(Self { c, p })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Kernel on the plane that embeds a diagram as a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseKernel {
    /// Gaussian bandwidth `sigma`; `weight = None` is the unweighted Gaussian
    /// embedding.
    Pwgk {
        sigma: f64,
        weight: Option<WeightParams>,
    },
    /// Scale parameter `t`.
    Pssk { t: f64 },
}

/// Kernel applied on top of the embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rkhs {
    Linear,
    Gaussian { tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub base: BaseKernel,
    pub rkhs: Rkhs,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl KernelSpec {
    pub fn pwgk(sigma: f64, weight: Option<WeightParams>, rkhs: Rkhs) -> Result<Self> {
        let s = Self {
            base: BaseKernel::Pwgk { sigma, weight },
            rkhs,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn pssk(t: f64, rkhs: Rkhs) -> Result<Self> {
        let s = Self {
            base: BaseKernel::Pssk { t },
            rkhs,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self.base {
            BaseKernel::Pwgk { sigma, .. } => {
                positive("sigma", sigma)?;
            }
            BaseKernel::Pssk { t } => {
                positive("t", t)?;
            }
        }
        if let Rkhs::Gaussian { tau } = self.rkhs {
            positive("tau", tau)?;
        }
        Ok(())
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.base {
            BaseKernel::Pwgk { sigma, .. } => Some(sigma),
            BaseKernel::Pssk { .. } => None,
        }
    }

    pub fn with_rkhs(&self, rkhs: Rkhs) -> Self {
        Self { rkhs, ..*self }
    }

    pub fn to_json(&self) -> KernelSpecJson {
        let (sigma, c, p, weighted, t, rkhs) = match self.base {
            BaseKernel::Pwgk { sigma, weight } => (
                Some(sigma),
                weight.map(|w| w.c()),
                weight.map(|w| w.p()),
                Some(weight.is_some()),
                None,
                match self.rkhs {
                    Rkhs::Linear => "linear",
                    Rkhs::Gaussian { .. } => "gaussian",
                },
            ),
            BaseKernel::Pssk { t } => (None, None, None, None, Some(t), "pssk"),
        };
        let tau = match self.rkhs {
            Rkhs::Linear => None,
            Rkhs::Gaussian { tau } => Some(tau),
        };
        KernelSpecJson {
            sigma: sigma.map(ParamValue::Value),
            c: c.map(ParamValue::Value),
            p,
            rkhs: rkhs.into(),
            tau: tau.map(ParamValue::Value),
            t: t.map(ParamValue::Value),
            weighted,
        }
    }
}

/// A numeric parameter or the string `"median"` (resolved from data).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Value(f64),
    Named(MedianTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MedianTag {
    Median,
}

impl ParamValue {
    pub const MEDIAN: Self = ParamValue::Named(MedianTag::Median);

    fn value(&self) -> Option<f64> {
        match self {
            ParamValue::Value(v) => Some(*v),
            ParamValue::Named(_) => None,
        }
    }
}

/// JSON form of a kernel specification.
///
/// Keys: `sigma`, `C`, `p`, `rkhs` (`"linear"`, `"gaussian"` or `"pssk"`),
/// `tau`, `t`, `weighted`. `rkhs = "pssk"` selects the PSSK with a linear
/// RKHS kernel, or a Gaussian one when `tau` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpecJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<ParamValue>,
    #[serde(default, rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub rkhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted: Option<bool>,
}

impl KernelSpecJson {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// True if some parameter must be computed from data.
    pub fn needs_data(&self) -> bool {
        [self.sigma, self.c, self.tau, self.t]
            .iter()
            .any(|v| matches!(v, Some(ParamValue::Named(_))))
            || (self.rkhs == "gaussian" && self.tau.is_none())
            || (self.rkhs == "pssk" && self.t.is_none())
            || (self.rkhs != "pssk" && self.weighted != Some(false) && self.c.is_none())
    }

    /// Resolves `"median"` entries against `diagrams` and builds the spec.
    ///
    /// Defaults: `p = 5`, `weighted = true`, `C`/`sigma`/`tau` from the median
    /// heuristics, and PSSK `t = sigma^2 / 4`. A median `tau` of zero (all
    /// diagrams identical) falls back to `tau = 1`, which yields the all-ones
    /// Gram matrix.
    pub fn resolve(&self, diagrams: &[PersistenceDiagram]) -> Result<KernelSpec> {
        let p = positive("p", self.p.unwrap_or(DEFAULT_P))?;
        let sigma = match self.sigma {
            Some(ParamValue::Value(v)) => Some(positive("sigma", v)?),
            Some(ParamValue::Named(_)) => Some(sigma_heuristic(diagrams)?),
            None => None,
        };
        match self.rkhs.as_str() {
            "linear" | "gaussian" => {
                let sigma = match sigma {
                    Some(s) => s,
                    None => sigma_heuristic(diagrams)?,
                };
                let weighted = self.weighted.unwrap_or(true);
                let weight = if weighted {
                    let c = match self.c.and_then(|c| c.value()) {
                        Some(c) => c,
                        None => median_heuristics_with_sigma(diagrams, p, sigma, false)?.c,
                    };
                    Some(WeightParams::new(c, p)?)
                } else {
                    None
                };
                let base = BaseKernel::Pwgk { sigma, weight };
                let rkhs = if self.rkhs == "linear" {
                    Rkhs::Linear
                } else {
                    Rkhs::Gaussian {
                        tau: self.resolve_tau(base, diagrams)?,
                    }
                };
                let spec = KernelSpec { base, rkhs };
                spec.validate()?;
                Ok(spec)
            }
            "pssk" => {
                let t = match self.t.and_then(|t| t.value()) {
                    Some(t) => t,
                    None => {
                        let s = match sigma {
                            Some(s) => s,
                            None => sigma_heuristic(diagrams)?,
                        };
                        s * s / 4.0
                    }
                };
                let base = BaseKernel::Pssk { t };
                let rkhs = match self.tau {
                    None => Rkhs::Linear,
                    Some(_) => Rkhs::Gaussian {
                        tau: self.resolve_tau(base, diagrams)?,
                    },
                };
                let spec = KernelSpec { base, rkhs };
                spec.validate()?;
                Ok(spec)
            }
            other => Err(Error::param(format!("unknown rkhs {other:?}"))),
        }
    }

    fn resolve_tau(&self, base: BaseKernel, diagrams: &[PersistenceDiagram]) -> Result<f64> {
        match self.tau.and_then(|t| t.value()) {
            Some(t) => Ok(t),
            None => {
                let seed = median_rkhs_distance(
                    diagrams,
                    &KernelSpec {
                        base,
                        rkhs: Rkhs::Linear,
                    },
                )?;
                Ok(if seed > 0.0 { seed } else { 1.0 })
            }
        }
    }
}

impl TryFrom<KernelSpecJson> for KernelSpec {
    type Error = Error;

    /// Conversion for fully numeric specifications.
    fn try_from(j: KernelSpecJson) -> Result<Self> {
        if j.needs_data() {
            return Err(Error::param("kernel spec has data-dependent parameters"));
        }
        j.resolve(&[])
    }
}

impl Serialize for KernelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for KernelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = KernelSpecJson::deserialize(d)?;
        KernelSpec::try_from(j).map_err(serde::de::Error::custom)
    }
}
