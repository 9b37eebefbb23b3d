use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tdakernel::fmt::g17;
use tdakernel::kernels::{cross_gram, gram, BaseKernel, KernelSpec, KernelSpecJson};
use tdakernel::learn::{
    change_point_scan, kernel_pca, svm_predict, svm_train, KfdrParams, LabeledGram, SvmModel,
};
use tdakernel::persistence::{bottleneck_distance, compute_persistence, write_diagram_csv};
use tdakernel::rff::{nystrom_gram_with_rkhs, rff_gram, sample_rff};
use tdakernel::synth::{
    gen_dataset, run_changepoint_experiment, run_table1_experiment, write_dataset,
    ChangepointConfig, MethodSpec, SynthConfig, Table1Options,
};
use tdakernel::{build_cech2d, build_rips, Error, GramMatrix, PointCloud};

use crate::io::{
    emit, matrix_csv, parse_labels, parse_matrix, read_diagrams, read_spec, read_text,
};
use crate::{Approx, Cli, Command, Experiment, Mode};

/// `Input` maps to exit code 2, `Config` to exit code 3.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Config(String),
}

impl CliError {
    pub fn context(self, path: &Path) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Config(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if let Error::Json(j) = &e {
            return json_error(j);
        }
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn json_error(e: &serde_json::Error) -> CliError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => CliError::Config(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        json_error(&e)
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))? + "\n")
}

fn require_seed(cli: &Cli, what: &str) -> Result<u64, CliError> {
    cli.seed
        .ok_or_else(|| CliError::Config(format!("{what} is stochastic and needs --seed")))
}

fn out_dir(cli: &Cli) -> Result<&Path, CliError> {
    let dir = cli
        .out
        .as_deref()
        .ok_or_else(|| CliError::Config("--out <dir> is required".into()))?;
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn read_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T, CliError> {
    match path {
        Some(p) => {
            Ok(serde_json::from_str(&read_text(p)?).map_err(|e| CliError::from(e).context(p))?)
        }
        None => Ok(T::default()),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Diagram {
            cloud,
            mode,
            q_max,
            r_max,
        } => diagram(cli, cloud, *mode, *q_max, *r_max),
        Command::Gram {
            diagrams,
            spec,
            degree,
            approx,
            m,
            c,
            sidecar,
            header,
        } => gram_cmd(
            cli,
            diagrams,
            spec,
            *degree,
            *approx,
            *m,
            *c,
            sidecar.as_deref(),
            *header,
        ),
        Command::Bottleneck {
            left,
            right,
            degree,
        } => {
            let d = read_diagrams(&[left.clone(), right.clone()], *degree)?;
            emit(
                cli.out.as_deref(),
                &format!("{}\n", g17(bottleneck_distance(&d[0], &d[1])?)),
            )
        }
        Command::Kfdr {
            gram,
            gamma,
            margin,
        } => {
            let g = GramMatrix::read(gram).map_err(|e| CliError::from(e).context(gram))?;
            let params = KfdrParams {
                gamma: *gamma,
                scan_margin: *margin,
            };
            let scan = change_point_scan(g.entries(), &params)?;
            let mut csv = String::from("ell,kfdr,normalized\n");
            for (i, ell) in scan.indices().enumerate() {
                csv.push_str(&format!(
                    "{ell},{},{}\n",
                    g17(scan.values[i]),
                    g17(scan.normalized[i])
                ));
            }
            emit(cli.out.as_deref(), &csv)?;
            if cli.out.is_some() {
                println!("argmax {}", scan.argmax);
            } else {
                eprintln!("argmax {}", scan.argmax);
            }
            Ok(())
        }
        Command::Kpca { gram, k } => {
            let g = GramMatrix::read(gram).map_err(|e| CliError::from(e).context(gram))?;
            emit(
                cli.out.as_deref(),
                &matrix_csv(&kernel_pca(g.entries(), *k)?),
            )
        }
        Command::SvmTrain {
            gram,
            labels,
            reg_c,
            sidecar,
        } => svm_train_cmd(cli, gram, labels, *reg_c, sidecar.as_deref()),
        Command::SvmPredict {
            model,
            cross_gram,
            diagrams,
            degree,
        } => svm_predict_cmd(cli, model, cross_gram.as_deref(), diagrams, *degree),
        Command::Synth {
            config,
            n_train,
            n_test,
        } => {
            let mut cfg: SynthConfig = read_config(config.as_deref())?;
            if let Some(n) = n_train {
                cfg.n_train = *n;
            }
            if let Some(n) = n_test {
                cfg.n_test = *n;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            } else if config.is_none() {
                return Err(CliError::Config(
                    "synth needs --seed or a config with a seed".into(),
                ));
            }
            let (train, test) = gen_dataset(&cfg)?;
            let manifest = write_dataset(out_dir(cli)?, &cfg, &train, &test)?;
            println!("wrote {} clouds", manifest.instances.len());
            Ok(())
        }
        Command::Experiment { name, config } => match name {
            Experiment::Table1 => table1(cli, config.as_deref()),
            Experiment::Changepoint => changepoint(cli, config.as_deref()),
        },
    }
}

fn diagram(
    cli: &Cli,
    cloud: &Path,
    mode: Mode,
    q_max: usize,
    r_max: Option<f64>,
) -> Result<(), CliError> {
    let x = PointCloud::read(cloud).map_err(|e| CliError::from(e).context(cloud))?;
    let r_max = match r_max {
        Some(r) => r,
        None => x.diameter().max(f64::MIN_POSITIVE),
    };
    let f = match mode {
        Mode::Cech2d => {
            if q_max > 1 {
                return Err(CliError::Config("cech2d supports q_max <= 1".into()));
            }
            build_cech2d(&x, r_max)?
        }
        Mode::Rips => build_rips(&x, q_max, r_max)?,
    };
    let diagrams: Vec<_> = compute_persistence(&f, q_max)?
        .iter()
        .map(|d| d.reduced())
        .collect();
    emit(cli.out.as_deref(), &write_diagram_csv(&diagrams))?;
    let summary: Vec<String> = diagrams
        .iter()
        .map(|d| format!("H{}: {}", d.degree(), d.len()))
        .collect();
    if cli.out.is_some() {
        println!("{}", summary.join(", "));
    } else {
        eprintln!("{}", summary.join(", "));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    spec: KernelSpecJson,
    approx: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    degree: usize,
    diagrams: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
fn gram_cmd(
    cli: &Cli,
    paths: &[PathBuf],
    spec_arg: &str,
    degree: usize,
    approx: Approx,
    m: usize,
    c: usize,
    sidecar: Option<&Path>,
    header: bool,
) -> Result<(), CliError> {
    let spec_json = read_spec(spec_arg)?;
    let diagrams = read_diagrams(paths, degree)?;
    let spec = spec_json.resolve(&diagrams)?;
    let (g, m_used, c_used, seed) = match approx {
        Approx::Exact => (gram(&diagrams, &spec)?, None, None, None),
        Approx::Rff => {
            let BaseKernel::Pwgk { sigma, .. } = spec.base else {
                return Err(CliError::Config(
                    "rff approximation needs a PWGK spec".into(),
                ));
            };
            let seed = require_seed(cli, "rff")?;
            let sample = sample_rff(sigma, m, seed)?;
            (
                rff_gram(&diagrams, &spec, &sample)?,
                Some(m),
                None,
                Some(seed),
            )
        }
        Approx::Nystrom => {
            if !matches!(spec.base, BaseKernel::Pssk { .. }) {
                return Err(CliError::Config(
                    "nystrom approximation needs a PSSK spec".into(),
                ));
            }
            let seed = require_seed(cli, "nystrom")?;
            let g = nystrom_gram_with_rkhs(&diagrams, &spec, c, seed)?.psd_floor()?;
            (g, None, Some(c), Some(seed))
        }
    };
    let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    let g = if header {
        g.with_labels(names.clone())?
    } else {
        g
    };
    emit(cli.out.as_deref(), &g.to_csv())?;
    let sidecar_path = match (sidecar, cli.out.as_deref()) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(out)) => Some(PathBuf::from(format!("{}.json", out.display()))),
        (None, None) => None,
    };
    let record = Sidecar {
        spec: spec.to_json(),
        approx: format!("{approx:?}").to_lowercase(),
        m: m_used,
        c: c_used,
        seed,
        degree,
        diagrams: names,
    };
    match sidecar_path {
        Some(p) => emit(Some(&p), &to_json(&record)?),
        None => {
            eprint!("{}", to_json(&record)?);
            Ok(())
        }
    }
}

fn svm_train_cmd(
    cli: &Cli,
    gram: &Path,
    labels: &Path,
    reg_c: f64,
    sidecar: Option<&Path>,
) -> Result<(), CliError> {
    let g = GramMatrix::read(gram).map_err(|e| CliError::from(e).context(gram))?;
    let y = parse_labels(&read_text(labels)?).map_err(|e| e.context(labels))?;
    let (spec, files) = match sidecar {
        Some(p) => {
            let s: Sidecar =
                serde_json::from_str(&read_text(p)?).map_err(|e| CliError::from(e).context(p))?;
            (Some(KernelSpec::try_from(s.spec)?), s.diagrams)
        }
        None => (None, g.labels().map(<[String]>::to_vec).unwrap_or_default()),
    };
    let lg = LabeledGram::new(GramMatrix::new(g.entries().clone(), spec)?, y)?;
    let mut model = svm_train(&lg, reg_c)?;
    model.training_files = files;
    emit(cli.out.as_deref(), &to_json(&model)?)
}

fn svm_predict_cmd(
    cli: &Cli,
    model_path: &Path,
    cross: Option<&Path>,
    diagrams: &[PathBuf],
    degree: usize,
) -> Result<(), CliError> {
    let model: SvmModel = serde_json::from_str(&read_text(model_path)?)
        .map_err(|e| CliError::from(e).context(model_path))?;
    let k = match cross {
        Some(p) => parse_matrix(&read_text(p)?).map_err(|e| e.context(p))?,
        None => {
            if diagrams.is_empty() {
                return Err(CliError::Config(
                    "pass --cross-gram or test diagram files".into(),
                ));
            }
            let spec = model.spec.ok_or_else(|| {
                CliError::Config("model has no kernel spec; pass --cross-gram".into())
            })?;
            if model.training_files.is_empty() {
                return Err(CliError::Config(
                    "model lists no training diagrams; pass --cross-gram".into(),
                ));
            }
            let train_paths: Vec<PathBuf> =
                model.training_files.iter().map(PathBuf::from).collect();
            let train = read_diagrams(&train_paths, degree)?;
            let test = read_diagrams(diagrams, degree)?;
            cross_gram(&test, &train, &spec)?
        }
    };
    let pred = svm_predict(&model, &k)?;
    let text: String = pred.iter().map(|y| format!("{y}\n")).collect();
    emit(cli.out.as_deref(), &text)
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Table1Config {
    synth: SynthConfig,
    options: Table1Options,
    methods: Option<Vec<MethodSpec>>,
}

fn table1(cli: &Cli, config: Option<&Path>) -> Result<(), CliError> {
    let mut cfg: Table1Config = read_config(config)?;
    if let Some(s) = cli.seed {
        cfg.synth.seed = s;
    }
    let methods = cfg.methods.unwrap_or_else(MethodSpec::all);
    let result = run_table1_experiment(&cfg.synth, &methods, &cfg.options)?;
    let dir = out_dir(cli)?;
    emit(Some(&dir.join("results.json")), &to_json(&result)?)?;
    let mut csv = String::from("method,accuracy,cv_accuracy,reg_c\n");
    for m in &result.methods {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            m.method,
            g17(m.accuracy),
            g17(m.cv_accuracy),
            g17(m.reg_c)
        ));
        println!("{:<14} {:.3}", m.method, m.accuracy);
    }
    emit(Some(&dir.join("accuracy.csv")), &csv)
}

fn changepoint(cli: &Cli, config: Option<&Path>) -> Result<(), CliError> {
    let mut cfg: ChangepointConfig = read_config(config)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let result = run_changepoint_experiment(&cfg)?;
    let dir = out_dir(cli)?;
    emit(Some(&dir.join("results.json")), &to_json(&result)?)?;
    let mut scan = String::from("ell,kfdr,normalized\n");
    for (i, ell) in result.scan.indices().enumerate() {
        scan.push_str(&format!(
            "{ell},{},{}\n",
            g17(result.scan.values[i]),
            g17(result.scan.normalized[i])
        ));
    }
    emit(Some(&dir.join("kfdr.csv")), &scan)?;
    let mut kpca = String::from("index,regime,pc1,pc2\n");
    for (i, [a, b]) in result.kpca.iter().enumerate() {
        let regime = usize::from(i >= cfg.n_before);
        kpca.push_str(&format!("{i},{regime},{},{}\n", g17(*a), g17(*b)));
    }
    emit(Some(&dir.join("kpca.csv")), &kpca)?;
    println!("detected change point {}", result.detected);
    Ok(())
}
