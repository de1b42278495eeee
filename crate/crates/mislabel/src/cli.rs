//! Command-line plumbing for the `mislabel` binary.
//!
//! Four subcommands cover the pipeline: `gen` writes synthetic datasets,
//! `corrupt` flips labels through a transition matrix, `train` fits one
//! model (optionally centroid-corrected), and `experiment` runs the
//! multi-trial harness from a config file. Exit codes: 0 on success, 1
//! for runtime or validation failures, 2 for command-line misuse. Every
//! subcommand prints its resolved seed so a run can be reproduced from
//! its log alone.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::centroid::{CorrectionMode, correct_centroid, empirical_centroid};
use crate::data::{
    Dataset, GaussianMixtureSpec, gen_gaussian_mixture, load_csv, load_csv_with_classes, save_csv,
};
use crate::error::{Error, Result};
use crate::eval::{ExperimentConfig, ReportFormat, accuracy, emit_report, run_experiment};
use crate::linalg::DEFAULT_PINV_TOL;
use crate::noise::{TransitionMatrix, estimate_priors, inject_noise, noisy_label_frequencies};
use crate::risk::{
    IterativeConfig, ModelMeta, RiskConfig, Solver, naive_mse_risk, objective, save_model_csv,
    train,
};

#[derive(Debug, Parser)]
#[command(
    name = "mislabel",
    version,
    about = "Train multi-class linear classifiers from noisily labeled data"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a Gaussian-mixture dataset CSV
    Gen(GenArgs),
    /// Corrupt dataset labels through a noise transition matrix
    Corrupt(CorruptArgs),
    /// Train one linear model, optionally correcting the centroid
    Train(TrainArgs),
    /// Run the multi-trial, multi-arm harness from a config file
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Number of classes
    #[arg(long)]
    classes: usize,
    /// Feature dimension
    #[arg(long)]
    dim: usize,
    /// Number of examples
    #[arg(long)]
    n: usize,
    /// Shared standard deviation of every mixture component
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Spacing between component means
    #[arg(long, default_value_t = 2.0)]
    separation: f64,
    /// Comma-separated class weights (default uniform)
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output dataset CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoiseArg {
    Symmetric,
    Pairflip,
    Explicit,
}

#[derive(Debug, Args)]
struct CorruptArgs {
    /// Input dataset CSV
    #[arg(long = "in")]
    input: PathBuf,
    /// Pin the class count instead of inferring it from the labels
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long, value_enum)]
    noise: NoiseArg,
    /// Flip probability: [0, 1) for symmetric, [0, 0.5) for pairflip
    #[arg(long)]
    rate: Option<f64>,
    /// Transition matrix CSV, required for --noise explicit
    #[arg(long)]
    t_in: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output noisy dataset CSV
    #[arg(long)]
    out: PathBuf,
    /// Also write the transition matrix that was applied
    #[arg(long)]
    t_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    PaperM,
    DirectT,
    None,
}

impl ModeArg {
    fn token(self) -> &'static str {
        match self {
            ModeArg::PaperM => "paper-m",
            ModeArg::DirectT => "direct-t",
            ModeArg::None => "none",
        }
    }

    fn correction(self) -> Option<CorrectionMode> {
        match self {
            ModeArg::PaperM => Some(CorrectionMode::PaperM),
            ModeArg::DirectT => Some(CorrectionMode::DirectT),
            ModeArg::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    #[value(alias = "closed-form", alias = "closed_form")]
    Closed,
    Iterative,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Training dataset CSV (typically noisy)
    #[arg(long)]
    train: PathBuf,
    /// Clean test dataset CSV for immediate evaluation
    #[arg(long)]
    test: Option<PathBuf>,
    /// Pin the class count instead of inferring it from the labels
    #[arg(long)]
    classes: Option<usize>,
    /// Transition matrix CSV, required unless --mode none
    #[arg(long)]
    t: Option<PathBuf>,
    /// Centroid correction route
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = SolverArg::Closed)]
    solver: SolverArg,
    /// Ridge regularizer
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[arg(long, default_value_t = IterativeConfig::default().step_size)]
    step_size: f64,
    #[arg(long, default_value_t = IterativeConfig::default().momentum)]
    momentum: f64,
    #[arg(long, default_value_t = IterativeConfig::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = IterativeConfig::default().batch_size)]
    batch_size: usize,
    #[arg(long, default_value_t = IterativeConfig::default().decay_start)]
    decay_start: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output model CSV
    #[arg(long)]
    out_model: PathBuf,
    /// Output metrics JSON
    #[arg(long)]
    out_metrics: PathBuf,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Experiment config file (flat key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Override the config's trial count
    #[arg(long)]
    trials: Option<usize>,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "report.json")]
    out_json: PathBuf,
    #[arg(long, default_value = "report.csv")]
    out_csv: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

type CliResult = std::result::Result<(), Failure>;

/// Parses the process arguments and runs the chosen subcommand.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Corrupt(args) => cmd_corrupt(&args),
        Command::Train(args) => cmd_train(&args),
        Command::Experiment(args) => cmd_experiment(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_gen(args: &GenArgs) -> CliResult {
    if args.classes < 2 {
        return Err(usage("--classes must be at least 2"));
    }
    if args.dim == 0 || args.n == 0 {
        return Err(usage("--dim and --n must be at least 1"));
    }
    if !(args.sigma.is_finite() && args.sigma > 0.0) {
        return Err(usage("--sigma must be a positive number"));
    }
    println!("seed={}", args.seed);

    let mut spec = GaussianMixtureSpec::axis_aligned(
        args.classes,
        args.dim,
        args.separation,
        args.sigma,
        args.seed,
    )?;
    if let Some(w) = &args.weights {
        spec.weights = w.clone();
        spec.validate()?;
    }
    let ds = gen_gaussian_mixture(&spec, args.n)?;
    save_csv(&ds, &args.out)?;
    println!(
        "wrote {}: n={} d={} c={}",
        args.out.display(),
        ds.n_examples(),
        ds.dim(),
        ds.class_count()
    );
    Ok(())
}

fn load_dataset(path: &PathBuf, classes: Option<usize>) -> Result<Dataset> {
    match classes {
        Some(c) => load_csv_with_classes(path, c),
        None => load_csv(path),
    }
}

fn cmd_corrupt(args: &CorruptArgs) -> CliResult {
    let rate = |bound: f64| -> std::result::Result<f64, Failure> {
        let r = args
            .rate
            .ok_or_else(|| usage("--rate is required for symmetric and pairflip noise"))?;
        if !(r.is_finite() && (0.0..bound).contains(&r)) {
            return Err(usage(format!(
                "--rate must lie in [0, {bound}) for this noise kind, got {r}"
            )));
        }
        Ok(r)
    };
    enum Plan {
        Rate(f64),
        File(PathBuf),
    }
    let plan = match args.noise {
        NoiseArg::Symmetric => Plan::Rate(rate(1.0)?),
        NoiseArg::Pairflip => Plan::Rate(rate(0.5)?),
        NoiseArg::Explicit => Plan::File(
            args.t_in
                .clone()
                .ok_or_else(|| usage("--t-in is required for --noise explicit"))?,
        ),
    };
    println!("seed={}", args.seed);

    let ds = load_dataset(&args.input, args.classes)?;
    let t = match (args.noise, plan) {
        (NoiseArg::Symmetric, Plan::Rate(r)) => TransitionMatrix::symmetric(ds.class_count(), r)?,
        (NoiseArg::Pairflip, Plan::Rate(r)) => TransitionMatrix::pairflip(ds.class_count(), r)?,
        (NoiseArg::Explicit, Plan::File(path)) => {
            let t = TransitionMatrix::from_csv(&path)?;
            if t.class_count() != ds.class_count() {
                return Err(Error::ShapeMismatch(format!(
                    "transition matrix is {0}x{0} but the dataset has {1} classes",
                    t.class_count(),
                    ds.class_count()
                ))
                .into());
            }
            t
        }
        _ => unreachable!("plan is derived from the noise kind"),
    };

    let noisy = inject_noise(&ds, &t, args.seed)?;
    save_csv(&noisy, &args.out)?;
    let flipped = ds
        .labels()
        .iter()
        .zip(noisy.labels())
        .filter(|(a, b)| a != b)
        .count();
    println!(
        "wrote {}: flipped {flipped} of {} labels",
        args.out.display(),
        ds.n_examples()
    );
    if let Some(t_out) = &args.t_out {
        t.to_csv(t_out)?;
        println!("wrote {}", t_out.display());
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TrainMetrics {
    seed: u64,
    mode: String,
    solver: String,
    lambda: f64,
    classes: usize,
    dim: usize,
    n_train: usize,
    priors: Option<Vec<f64>>,
    objective: f64,
    naive_risk: f64,
    test_accuracy: Option<f64>,
}

fn cmd_train(args: &TrainArgs) -> CliResult {
    if args.mode != ModeArg::None && args.t.is_none() {
        return Err(usage(format!(
            "--t is required with --mode {}",
            args.mode.token()
        )));
    }
    if !(args.lambda.is_finite() && args.lambda >= 0.0) {
        return Err(usage("--lambda must be a non-negative number"));
    }
    println!("seed={}", args.seed);

    let ds = load_dataset(&args.train, args.classes)?;
    let noisy_mu = empirical_centroid(&ds);
    let (mu, priors) = match (args.mode.correction(), &args.t) {
        (Some(mode), Some(t_path)) => {
            let t = TransitionMatrix::from_csv(t_path)?;
            let freqs = noisy_label_frequencies(&ds);
            let priors = estimate_priors(&t, &freqs, DEFAULT_PINV_TOL)?;
            let mu = correct_centroid(&noisy_mu, &t, &priors, mode, DEFAULT_PINV_TOL)?;
            (mu, Some(priors.as_slice().to_vec()))
        }
        _ => (noisy_mu, None),
    };

    let config = RiskConfig {
        lambda: args.lambda,
        correction: args.mode.correction(),
        solver: match args.solver {
            SolverArg::Closed => Solver::ClosedForm,
            SolverArg::Iterative => Solver::Iterative,
        },
        iterative: IterativeConfig {
            step_size: args.step_size,
            momentum: args.momentum,
            epochs: args.epochs,
            batch_size: args.batch_size,
            decay_start: args.decay_start,
        },
        seed: args.seed,
    };
    config.validate()?;
    let model = train(ds.features(), &mu, &config)?;

    let obj = objective(&model, ds.features(), &mu, args.lambda)?;
    let naive = naive_mse_risk(&model, &ds)?;
    let test_accuracy = match &args.test {
        Some(path) => {
            let test = load_csv_with_classes(path, ds.class_count())?;
            Some(accuracy(&model, &test)?)
        }
        None => None,
    };

    let meta = ModelMeta {
        lambda: args.lambda,
        mode: args.mode.token().to_string(),
    };
    save_model_csv(&model, &meta, &args.out_model)?;
    let metrics = TrainMetrics {
        seed: args.seed,
        mode: args.mode.token().to_string(),
        solver: match args.solver {
            SolverArg::Closed => "closed",
            SolverArg::Iterative => "iterative",
        }
        .to_string(),
        lambda: args.lambda,
        classes: ds.class_count(),
        dim: ds.dim(),
        n_train: ds.n_examples(),
        priors,
        objective: obj,
        naive_risk: naive,
        test_accuracy,
    };
    let mut body =
        serde_json::to_string_pretty(&metrics).expect("metrics serialize to JSON");
    body.push('\n');
    fs::write(&args.out_metrics, body).map_err(|e| Error::io(&args.out_metrics, e))?;

    println!("objective={obj}");
    println!("naive_risk={naive}");
    if let Some(acc) = test_accuracy {
        println!("test_accuracy={acc}");
    }
    println!("wrote {}", args.out_model.display());
    println!("wrote {}", args.out_metrics.display());
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> CliResult {
    if args.trials == Some(0) {
        return Err(usage("--trials must be at least 1"));
    }
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    println!("seed={}", config.seed);

    let report = run_experiment(&config)?;
    for arm in &report.arms {
        println!("arm {}: mean={} std={}", arm.name, arm.mean, arm.std);
    }
    emit_report(&report, ReportFormat::Json, &args.out_json)?;
    emit_report(&report, ReportFormat::Csv, &args.out_csv)?;
    println!("wrote {}", args.out_json.display());
    println!("wrote {}", args.out_csv.display());
    Ok(())
}
