//! `tdakernel` command-line interface.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "tdakernel",
    version,
    about = "Persistence diagrams, diagram kernels, and kernel methods"
)]
pub struct Cli {
    /// Seed for stochastic steps (random features, landmarks, data generation).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file (or directory for `synth` and `experiment`). Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Cech2d,
    Rips,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Approx {
    Exact,
    Rff,
    Nystrom,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Table1,
    Changepoint,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Persistence diagrams of a point cloud.
    Diagram {
        cloud: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Cech2d)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        q_max: usize,
        /// Filtration cutoff; defaults to the cloud diameter.
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// Gram matrix over diagram files.
    Gram {
        #[arg(required = true)]
        diagrams: Vec<PathBuf>,
        /// Kernel spec as a JSON file or an inline JSON object.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = Approx::Exact)]
        approx: Approx,
        /// Number of random Fourier features.
        #[arg(long = "M", visible_alias = "m", default_value_t = 1000)]
        m: usize,
        /// Number of Nyström landmarks.
        #[arg(long = "c", default_value_t = 100)]
        c: usize,
        /// Where to write resolved hyperparameters; defaults to `<out>.json`.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Write the diagram paths as a header row.
        #[arg(long)]
        header: bool,
    },
    /// Bottleneck distance between two diagram files.
    Bottleneck {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 1)]
        degree: usize,
    },
    /// KFDR change-point scan over a Gram matrix.
    Kfdr {
        gram: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        gamma: f64,
        #[arg(long, default_value_t = 2)]
        margin: usize,
    },
    /// Kernel PCA coordinates.
    Kpca {
        gram: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Train an SVM on a Gram matrix.
    SvmTrain {
        gram: PathBuf,
        /// One `+1` or `-1` per line.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        reg_c: f64,
        /// Sidecar JSON from `gram`, recorded in the model for prediction.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Predict labels with a trained SVM.
    SvmPredict {
        #[arg(long)]
        model: PathBuf,
        /// Test-by-train kernel matrix CSV.
        #[arg(long, conflicts_with = "diagrams")]
        cross_gram: Option<PathBuf>,
        /// Test diagram files; the cross-gram is rebuilt from the model.
        diagrams: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        degree: usize,
    },
    /// Generate the synthetic two-circle dataset.
    Synth {
        /// JSON config; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n_train: Option<usize>,
        #[arg(long)]
        n_test: Option<usize>,
    },
    /// Run an end-to-end experiment.
    Experiment {
        #[arg(value_enum)]
        name: Experiment,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Input(_) => 2,
                CliError::Config(_) => 3,
            })
        }
    }
}

fn configure_threads(n: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
}
