use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::build_cech2d;
use crate::kernels::heuristics::{c_heuristic, sigma_heuristic};
use crate::kernels::{
    gram, median_rkhs_distance, GramMatrix, KernelSpec, KernelSpecJson, Rkhs, WeightParams,
};
use crate::learn::{cross_validate, svm_predict, svm_train, LabeledGram};
use crate::par;
use crate::persistence::{compute_persistence, PersistenceDiagram};
use crate::rng::RandomSource;

use super::generator::{gen_dataset, SynthConfig, SynthInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// Weighted Gaussian embedding.
    Pwgk,
    Pssk,
    /// Unweighted Gaussian embedding.
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub family: KernelFamily,
    /// `false` for the linear RKHS kernel.
    pub gaussian_rkhs: bool,
}

impl MethodSpec {
    pub fn all() -> Vec<MethodSpec> {
        [KernelFamily::Pwgk, KernelFamily::Pssk, KernelFamily::Gauss]
            .into_iter()
            .flat_map(|family| {
                [false, true].map(|gaussian_rkhs| MethodSpec {
                    family,
                    gaussian_rkhs,
                })
            })
            .collect()
    }

    pub fn name(&self) -> String {
        let family = match self.family {
            KernelFamily::Pwgk => "pwgk",
            KernelFamily::Pssk => "pssk",
            KernelFamily::Gauss => "gauss",
        };
        let rkhs = if self.gaussian_rkhs {
            "gauss"
        } else {
            "linear"
        };
        format!("{family}-{rkhs}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table1Options {
    pub folds: usize,
    pub reg_grid: Vec<f64>,
    pub p: f64,
    /// Multipliers of the median-heuristic bandwidth.
    pub sigma_multipliers: Vec<f64>,
    /// Multipliers of the median-heuristic weight constant.
    pub c_multipliers: Vec<f64>,
    /// Multipliers of `sigma^2 / 4` for the PSSK scale.
    pub t_multipliers: Vec<f64>,
    /// Permute the training labels (null check).
    pub shuffle_labels: bool,
}

impl Default for Table1Options {
    fn default() -> Self {
        Self {
            folds: 10,
            reg_grid: vec![0.1, 1.0, 10.0, 100.0],
            p: 5.0,
            sigma_multipliers: vec![0.1, 0.5, 1.0, 2.0, 10.0],
            c_multipliers: vec![0.1, 1.0, 10.0, 1e3, 1e5, 1e7],
            t_multipliers: vec![0.25, 1.0, 4.0],
            shuffle_labels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    /// Test accuracy in `[0, 1]`.
    pub accuracy: f64,
    pub cv_accuracy: f64,
    pub reg_c: f64,
    pub spec: KernelSpecJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Result {
    pub config: SynthConfig,
    pub options: Table1Options,
    pub methods: Vec<MethodResult>,
}

impl Table1Result {
    pub fn accuracy(&self, method: &MethodSpec) -> Option<f64> {
        let name = method.name();
        self.methods
            .iter()
            .find(|m| m.method == name)
            .map(|m| m.accuracy)
    }
}

/// Degree-1 Čech diagrams, filtered up to `r1 + 2` so the large circle dies
/// inside the filtration.
pub fn cech_d1_diagrams(instances: &[SynthInstance]) -> Result<Vec<PersistenceDiagram>> {
    par::map_slice(instances, |inst| {
        let f = build_cech2d(&inst.cloud, inst.provenance.r1 + 2.0)?;
        Ok(compute_persistence(&f, 1)?.swap_remove(1).reduced())
    })
    .into_iter()
    .collect()
}

fn candidates(
    method: &MethodSpec,
    train: &[PersistenceDiagram],
    opts: &Table1Options,
) -> Result<Vec<KernelSpec>> {
    let sigma = sigma_heuristic(train)?;
    let mut out = Vec::new();
    match method.family {
        KernelFamily::Pwgk => {
            let c = c_heuristic(train, opts.p)?;
            for &ms in &opts.sigma_multipliers {
                for &mc in &opts.c_multipliers {
                    let w = WeightParams::new(c * mc, opts.p)?;
                    out.push(KernelSpec::pwgk(sigma * ms, Some(w), Rkhs::Linear)?);
                }
            }
        }
        KernelFamily::Gauss => {
            for &ms in &opts.sigma_multipliers {
                out.push(KernelSpec::pwgk(sigma * ms, None, Rkhs::Linear)?);
            }
        }
        KernelFamily::Pssk => {
            for &mt in &opts.t_multipliers {
                out.push(KernelSpec::pssk(sigma * sigma / 4.0 * mt, Rkhs::Linear)?);
            }
        }
    }
    if method.gaussian_rkhs {
        out = out
            .into_iter()
            .map(|spec| {
                let tau = median_rkhs_distance(train, &spec)?;
                let tau = if tau > 0.0 { tau } else { 1.0 };
                Ok(spec.with_rkhs(Rkhs::Gaussian { tau }))
            })
            .collect::<Result<_>>()?;
    }
    Ok(out)
}

fn block(
    k: &DMatrix<f64>,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> DMatrix<f64> {
    k.view((rows.start, cols.start), (rows.len(), cols.len()))
        .into_owned()
}

fn evaluate(
    method: &MethodSpec,
    diagrams: &[PersistenceDiagram],
    n_train: usize,
    train_labels: &[i8],
    test_labels: &[i8],
    opts: &Table1Options,
    seed: u64,
) -> Result<MethodResult> {
    let n = diagrams.len();
    let grid = candidates(method, &diagrams[..n_train], opts)?;
    let full: Vec<DMatrix<f64>> = par::map_slice(&grid, |spec| {
        gram(diagrams, spec).map(GramMatrix::into_entries)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let index: Vec<usize> = (0..grid.len()).collect();
    let cv = cross_validate(
        opts.folds,
        &index,
        &opts.reg_grid,
        train_labels,
        seed,
        |&g| Ok(block(&full[g], 0..n_train, 0..n_train)),
    )?;
    let k = &full[cv.best];
    let lg = LabeledGram::new(
        GramMatrix::new(block(k, 0..n_train, 0..n_train), None)?,
        train_labels.to_vec(),
    )?;
    let model = svm_train(&lg, cv.best_reg_c)?;
    let pred = svm_predict(&model, &block(k, n_train..n, 0..n_train))?;
    let hits = pred.iter().zip(test_labels).filter(|(a, b)| a == b).count();
    let best_row = &cv.scores[cv.best];
    Ok(MethodResult {
        method: method.name(),
        accuracy: hits as f64 / test_labels.len() as f64,
        cv_accuracy: best_row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        reg_c: cv.best_reg_c,
        spec: grid[cv.best].to_json(),
    })
}

/// Generates the train/test split, computes diagrams, and for every method
/// selects hyperparameters by cross-validation on the training set before
/// scoring the test set.
pub fn run_table1_experiment(
    cfg: &SynthConfig,
    methods: &[MethodSpec],
    opts: &Table1Options,
) -> Result<Table1Result> {
    if methods.is_empty() {
        return Err(Error::param("no methods requested"));
    }
    if cfg.n_train == 0 || cfg.n_test == 0 {
        return Err(Error::param("train and test sets must be nonempty"));
    }
    let (train, test) = gen_dataset(cfg)?;
    let mut all = train.clone();
    all.extend(test.iter().cloned());
    let diagrams = cech_d1_diagrams(&all)?;
    let mut train_labels: Vec<i8> = train.iter().map(|i| i.label).collect();
    if opts.shuffle_labels {
        RandomSource::with_stream(cfg.seed, 1).shuffle(&mut train_labels);
    }
    let test_labels: Vec<i8> = test.iter().map(|i| i.label).collect();
    let results = par::map_slice(methods, |m| {
        evaluate(
            m,
            &diagrams,
            train.len(),
            &train_labels,
            &test_labels,
            opts,
            cfg.seed,
        )
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(Table1Result {
        config: *cfg,
        options: opts.clone(),
        methods: results,
    })
}
