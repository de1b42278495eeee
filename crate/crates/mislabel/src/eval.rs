//! The experiment harness: repeated trials comparing training arms.
//!
//! One trial generates (or loads) clean data, splits it, corrupts the
//! training labels, estimates priors and corrected centroids from the
//! noisy split alone, trains one model per requested arm, and scores each
//! on the untouched clean test split. Reports aggregate per-arm accuracy
//! across trials.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::centroid::{Centroid, CorrectionMode, correct_centroid, empirical_centroid};
use crate::data::{
    Dataset, GaussianMixtureSpec, Standardizer, gen_gaussian_mixture, load_csv,
    load_csv_with_classes, load_idx,
};
use crate::error::{Error, Result};
use crate::linalg::{DEFAULT_PINV_TOL, frobenius_norm};
use crate::noise::{
    NoiseKind, NoiseSpec, TransitionMatrix, estimate_priors, inject_noise,
    noisy_label_frequencies,
};
use crate::risk::{IterativeConfig, LinearModel, RiskConfig, Solver, train};
use crate::rng::{STREAM_SPLIT, stream_rng};

/// Fraction of correct predictions on a dataset.
pub fn accuracy(model: &LinearModel, ds: &Dataset) -> Result<f64> {
    if ds.dim() != model.dim() || ds.class_count() != model.class_count() {
        return Err(Error::ShapeMismatch(format!(
            "model is {} x {}, dataset is {} features x {} classes",
            model.dim(),
            model.class_count(),
            ds.dim(),
            ds.class_count()
        )));
    }
    let mut hits = 0usize;
    for (i, &label) in ds.labels().iter().enumerate() {
        if model.predict(ds.features().row(i))? == label {
            hits += 1;
        }
    }
    Ok(hits as f64 / ds.n_examples() as f64)
}

/// Shuffles the dataset with the split stream of `seed` and cuts it into a
/// training and a test part.
///
/// The training part receives `round(n * train_fraction)` examples,
/// clamped so both parts stay non-empty.
pub fn split_dataset(
    ds: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(train_fraction.is_finite() && 0.0 < train_fraction && train_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "train fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let n = ds.n_examples();
    if n < 2 {
        return Err(Error::InvalidInput(
            "cannot split a dataset with fewer than 2 examples".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream_rng(seed, STREAM_SPLIT));
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    Ok((ds.subset(&order[..n_train])?, ds.subset(&order[n_train..])?))
}

/// One training strategy compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// Noisy centroid corrected through the prior-weighted imputation mix.
    CorrectedPaperM,
    /// Noisy centroid corrected through the transition matrix directly.
    CorrectedDirectT,
    /// Noisy centroid used as-is.
    NaiveNoisy,
    /// Clean training labels; the upper reference line.
    CleanOracle,
}

impl Arm {
    pub const ALL: [Arm; 4] = [
        Arm::CorrectedPaperM,
        Arm::CorrectedDirectT,
        Arm::NaiveNoisy,
        Arm::CleanOracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Arm::CorrectedPaperM => "corrected_paper_m",
            Arm::CorrectedDirectT => "corrected_direct_t",
            Arm::NaiveNoisy => "naive_noisy",
            Arm::CleanOracle => "clean_oracle",
        }
    }

    pub fn parse(s: &str) -> Result<Arm> {
        Arm::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown arm '{s}'; expected one of corrected_paper_m, \
                     corrected_direct_t, naive_noisy, clean_oracle"
                ))
            })
    }
}

/// Where each trial's clean data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    /// Freshly generated Gaussian mixture data, resampled every trial.
    Synthetic {
        classes: usize,
        dim: usize,
        n: usize,
        sigma: f64,
        separation: f64,
        weights: Option<Vec<f64>>,
    },
    /// A dataset CSV, loaded once and re-split every trial.
    Csv {
        path: PathBuf,
        classes: Option<usize>,
    },
    /// An IDX image/label pair, loaded once and re-split every trial.
    Idx {
        images: PathBuf,
        labels: PathBuf,
        classes: usize,
    },
}

/// Everything a reproducible experiment run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub noise: NoiseSpec,
    pub risk: RiskConfig,
    pub arms: Vec<Arm>,
    pub trials: usize,
    /// Training fraction of each split.
    pub split: f64,
    /// Standardize features with statistics fitted on the training split.
    pub standardize: bool,
    /// Master seed; trial `t` derives everything from `seed + t`, so the
    /// per-source and per-noise seeds in the nested configs are ignored
    /// here.
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if !(self.split.is_finite() && 0.0 < self.split && self.split < 1.0) {
            return Err(Error::InvalidInput(format!(
                "split must lie strictly between 0 and 1, got {}",
                self.split
            )));
        }
        if self.arms.is_empty() {
            return Err(Error::InvalidInput("at least one arm is required".into()));
        }
        for (i, arm) in self.arms.iter().enumerate() {
            if self.arms[..i].contains(arm) {
                return Err(Error::InvalidInput(format!(
                    "arm '{}' is listed twice",
                    arm.name()
                )));
            }
        }
        self.risk.validate()?;
        if let DataSource::Synthetic {
            classes,
            dim,
            n,
            sigma,
            separation,
            weights,
        } = &self.source
        {
            if *n == 0 {
                return Err(Error::InvalidInput(
                    "synthetic source needs n >= 1".into(),
                ));
            }
            let mut spec = GaussianMixtureSpec::axis_aligned(*classes, *dim, *separation, *sigma, 0)?;
            if let Some(w) = weights {
                spec.weights = w.clone();
            }
            spec.validate()?;
        }
        Ok(())
    }

    /// Reads a config from a flat `key = value` file; see
    /// [`parse_config`] for the key set.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_config_with_base(&text, path.parent())
    }

    fn mixture_spec(&self, seed: u64) -> Result<GaussianMixtureSpec> {
        match &self.source {
            DataSource::Synthetic {
                classes,
                dim,
                sigma,
                separation,
                weights,
                ..
            } => {
                let mut spec =
                    GaussianMixtureSpec::axis_aligned(*classes, *dim, *separation, *sigma, seed)?;
                if let Some(w) = weights {
                    spec.weights = w.clone();
                    spec.validate()?;
                }
                Ok(spec)
            }
            _ => Err(Error::InvalidInput(
                "mixture spec requested for a non-synthetic source".into(),
            )),
        }
    }
}

/// Per-arm accuracy across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmReport {
    pub name: String,
    /// Test accuracy of each trial, in trial order.
    pub trials: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over trials (0 for a single trial).
    pub std: f64,
}

/// The harness output: everything needed to reproduce and compare runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub config_echo: ExperimentConfig,
    pub arms: Vec<ArmReport>,
    /// Estimated clean-class priors, one vector per trial.
    pub priors: Vec<Vec<f64>>,
    /// Frobenius distance between the two corrected centroids, per trial.
    pub centroid_gap: Vec<f64>,
    /// Wall-clock seconds per arm, summed over trials. The only
    /// non-deterministic part of the report.
    pub timing: BTreeMap<String, f64>,
}

pub const REPORT_SCHEMA_VERSION: &str = "1";

impl ExperimentReport {
    pub fn arm(&self, arm: Arm) -> Option<&ArmReport> {
        self.arms.iter().find(|a| a.name == arm.name())
    }

    /// Pretty JSON with a trailing newline. Field order is fixed, so two
    /// runs of the same config produce identical bytes except for the
    /// `timing` values.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes to JSON");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("report JSON does not parse: {e}")))
    }

    /// One row per (arm, trial): `arm,trial,accuracy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("arm,trial,accuracy\n");
        for arm in &self.arms {
            for (t, acc) in arm.trials.iter().enumerate() {
                writeln!(out, "{},{t},{acc}", arm.name).unwrap();
            }
        }
        out
    }
}

/// Output format for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Writes a report to disk in the given format.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let body = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs the configured trials and aggregates per-arm accuracy.
///
/// Trial `t` derives its seed as `config.seed + t`; data generation,
/// splitting, corruption, and batch shuffling each read their own random
/// stream of that seed, and every arm of a trial shares the same trainer
/// stream, so arms differ only in the centroid they train toward. Errors
/// carry the name of the stage that produced them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate().map_err(|e| e.at_stage("config"))?;

    let file_data: Option<Dataset> = match &config.source {
        DataSource::Synthetic { .. } => None,
        DataSource::Csv { path, classes } => Some(
            match classes {
                Some(c) => load_csv_with_classes(path, *c),
                None => load_csv(path),
            }
            .map_err(|e| e.at_stage("data"))?,
        ),
        DataSource::Idx {
            images,
            labels,
            classes,
        } => Some(load_idx(images, labels, *classes).map_err(|e| e.at_stage("data"))?),
    };

    let mut arm_trials: Vec<Vec<f64>> = vec![Vec::new(); config.arms.len()];
    let mut timing: BTreeMap<String, f64> = BTreeMap::new();
    let mut priors_per_trial = Vec::with_capacity(config.trials);
    let mut centroid_gap = Vec::with_capacity(config.trials);

    for trial in 0..config.trials {
        let trial_seed = config.seed.wrapping_add(trial as u64);

        let clean = match &file_data {
            Some(ds) => ds.clone(),
            None => {
                let spec = config
                    .mixture_spec(trial_seed)
                    .map_err(|e| e.at_stage("data"))?;
                let n = match &config.source {
                    DataSource::Synthetic { n, .. } => *n,
                    _ => unreachable!("mixture_spec only succeeds for synthetic sources"),
                };
                gen_gaussian_mixture(&spec, n).map_err(|e| e.at_stage("data"))?
            }
        };

        let (mut train_clean, mut test) = split_dataset(&clean, config.split, trial_seed)
            .map_err(|e| e.at_stage("split"))?;
        if config.standardize {
            let scaler = Standardizer::fit(&train_clean);
            train_clean = scaler
                .transform(&train_clean)
                .map_err(|e| e.at_stage("standardize"))?;
            test = scaler
                .transform(&test)
                .map_err(|e| e.at_stage("standardize"))?;
        }
        let test_fingerprint = test.content_hash();

        let t = config
            .noise
            .transition_matrix(clean.class_count())
            .map_err(|e| e.at_stage("noise"))?;
        let train_noisy =
            inject_noise(&train_clean, &t, trial_seed).map_err(|e| e.at_stage("noise"))?;

        let freqs = noisy_label_frequencies(&train_noisy);
        let priors =
            estimate_priors(&t, &freqs, DEFAULT_PINV_TOL).map_err(|e| e.at_stage("priors"))?;

        let noisy_mu = empirical_centroid(&train_noisy);
        let clean_mu = empirical_centroid(&train_clean);
        let needs = |arm: Arm| config.arms.contains(&arm);
        let wants_gap = needs(Arm::CorrectedPaperM) || needs(Arm::CorrectedDirectT);
        let (mu_paper_m, mu_direct_t) = if wants_gap {
            let m = correct_centroid(&noisy_mu, &t, &priors, CorrectionMode::PaperM, DEFAULT_PINV_TOL)
                .map_err(|e| e.at_stage("correction"))?;
            let d = correct_centroid(
                &noisy_mu,
                &t,
                &priors,
                CorrectionMode::DirectT,
                DEFAULT_PINV_TOL,
            )
            .map_err(|e| e.at_stage("correction"))?;
            centroid_gap.push(frobenius_norm(&(m.as_array() - d.as_array())));
            (Some(m), Some(d))
        } else {
            (None, None)
        };

        let trial_risk = RiskConfig {
            seed: trial_seed,
            ..config.risk.clone()
        };
        for (slot, arm) in config.arms.iter().enumerate() {
            let mu: &Centroid = match arm {
                Arm::CorrectedPaperM => mu_paper_m.as_ref().expect("built above"),
                Arm::CorrectedDirectT => mu_direct_t.as_ref().expect("built above"),
                Arm::NaiveNoisy => &noisy_mu,
                Arm::CleanOracle => &clean_mu,
            };
            let started = Instant::now();
            let model =
                train(train_clean.features(), mu, &trial_risk).map_err(|e| e.at_stage("train"))?;
            let acc = accuracy(&model, &test).map_err(|e| e.at_stage("evaluate"))?;
            *timing.entry(arm.name().to_string()).or_insert(0.0) +=
                started.elapsed().as_secs_f64();
            arm_trials[slot].push(acc);
        }

        debug_assert_eq!(
            test.content_hash(),
            test_fingerprint,
            "test split must never be touched after the split"
        );
        priors_per_trial.push(priors.as_slice().to_vec());
    }

    let arms = config
        .arms
        .iter()
        .zip(arm_trials)
        .map(|(arm, trials)| {
            let (mean, std) = mean_and_std(&trials);
            ArmReport {
                name: arm.name().to_string(),
                trials,
                mean,
                std,
            }
        })
        .collect();

    Ok(ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION.to_string(),
        config_echo: config.clone(),
        arms,
        priors: priors_per_trial,
        centroid_gap,
        timing,
    })
}

const CONFIG_KEYS: [&str; 25] = [
    "source",
    "classes",
    "dim",
    "n",
    "sigma",
    "separation",
    "weights",
    "csv",
    "images",
    "labels",
    "noise",
    "rate",
    "t_csv",
    "trials",
    "split",
    "seed",
    "arms",
    "standardize",
    "solver",
    "lambda",
    "step_size",
    "momentum",
    "epochs",
    "batch_size",
    "decay_start",
];

struct ConfigMap(BTreeMap<String, String>);

impl ConfigMap {
    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!(
                    "key '{key}' has unusable value '{raw}'"
                ))
            }),
        }
    }

    fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn require_parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.require(key)?;
        Ok(self.parse(key)?.expect("presence checked above"))
    }
}

/// Parses the flat `key = value` experiment config format.
///
/// Lines are `key = value`; blank lines and lines starting with `#` are
/// ignored. Unknown and duplicate keys are rejected. Keys:
///
/// | key | meaning |
/// |-----|---------|
/// | `source` | `synthetic`, `csv`, or `idx` (required) |
/// | `classes`, `dim`, `n` | synthetic mixture shape (classes also pins csv/idx label range) |
/// | `sigma`, `separation` | mixture spread and mean spacing (defaults 1.0, 2.0) |
/// | `weights` | comma-separated mixture weights (default uniform) |
/// | `csv` | dataset path for the csv source |
/// | `images`, `labels` | file pair for the idx source |
/// | `noise` | `symmetric`, `pairflip`, or `explicit` (required) |
/// | `rate` | flip probability for symmetric/pairflip |
/// | `t_csv` | transition matrix path for explicit noise |
/// | `trials`, `split`, `seed` | protocol (defaults 5, 0.8, 0) |
/// | `arms` | comma-separated arm names (default all four) |
/// | `standardize` | `true` or `false` (default false) |
/// | `solver` | `closed_form` or `iterative` (default closed_form) |
/// | `lambda` | ridge regularizer (default 0.001) |
/// | `step_size`, `momentum`, `epochs`, `batch_size`, `decay_start` | iterative solver settings |
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_with_base(text, None)
}

fn parse_config_with_base(text: &str, base: Option<&Path>) -> Result<ExperimentConfig> {
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {} is not 'key = value': '{line}'", idx + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("duplicate key '{key}'")));
        }
    }
    let unknown: Vec<&str> = map
        .keys()
        .map(String::as_str)
        .filter(|k| !CONFIG_KEYS.contains(k))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::Config(format!(
            "unknown keys: {}",
            unknown.join(", ")
        )));
    }
    let map = ConfigMap(map);

    let resolve = |raw: &str| -> PathBuf {
        let p = PathBuf::from(raw);
        match (p.is_relative(), base) {
            (true, Some(dir)) => dir.join(p),
            _ => p,
        }
    };

    let source = match map.require("source")? {
        "synthetic" => DataSource::Synthetic {
            classes: map.require_parse("classes")?,
            dim: map.require_parse("dim")?,
            n: map.require_parse("n")?,
            sigma: map.parse_or("sigma", 1.0)?,
            separation: map.parse_or("separation", 2.0)?,
            weights: match map.get("weights") {
                None => None,
                Some(raw) => Some(parse_f64_list(raw, "weights")?),
            },
        },
        "csv" => DataSource::Csv {
            path: resolve(map.require("csv")?),
            classes: map.parse("classes")?,
        },
        "idx" => DataSource::Idx {
            images: resolve(map.require("images")?),
            labels: resolve(map.require("labels")?),
            classes: map.require_parse("classes")?,
        },
        other => {
            return Err(Error::Config(format!(
                "source must be synthetic, csv, or idx, got '{other}'"
            )));
        }
    };

    let seed: u64 = map.parse_or("seed", 0)?;
    let noise = match map.require("noise")? {
        "symmetric" => NoiseSpec {
            kind: NoiseKind::Symmetric,
            rate: map.require_parse("rate")?,
            explicit: None,
            seed,
        },
        "pairflip" => NoiseSpec {
            kind: NoiseKind::Pairflip,
            rate: map.require_parse("rate")?,
            explicit: None,
            seed,
        },
        "explicit" => NoiseSpec {
            kind: NoiseKind::Explicit,
            rate: 0.0,
            explicit: Some(TransitionMatrix::from_csv(resolve(map.require("t_csv")?))?),
            seed,
        },
        other => {
            return Err(Error::Config(format!(
                "noise must be symmetric, pairflip, or explicit, got '{other}'"
            )));
        }
    };

    let solver = match map.get("solver").unwrap_or("closed_form") {
        "closed_form" | "closed" => Solver::ClosedForm,
        "iterative" => Solver::Iterative,
        other => {
            return Err(Error::Config(format!(
                "solver must be closed_form or iterative, got '{other}'"
            )));
        }
    };
    let defaults = IterativeConfig::default();
    let iterative = IterativeConfig {
        step_size: map.parse_or("step_size", defaults.step_size)?,
        momentum: map.parse_or("momentum", defaults.momentum)?,
        epochs: map.parse_or("epochs", defaults.epochs)?,
        batch_size: map.parse_or("batch_size", defaults.batch_size)?,
        decay_start: map.parse_or("decay_start", defaults.decay_start)?,
    };

    let arms = match map.get("arms") {
        None => Arm::ALL.to_vec(),
        Some(raw) => raw
            .split(',')
            .map(|s| Arm::parse(s.trim()))
            .collect::<Result<Vec<_>>>()?,
    };

    let standardize = match map.get("standardize").unwrap_or("false") {
        "true" => true,
        "false" => false,
        other => {
            return Err(Error::Config(format!(
                "standardize must be true or false, got '{other}'"
            )));
        }
    };

    let config = ExperimentConfig {
        source,
        noise,
        risk: RiskConfig {
            lambda: map.parse_or("lambda", 1e-3)?,
            correction: None,
            solver,
            iterative,
            seed,
        },
        arms,
        trials: map.parse_or("trials", 5)?,
        split: map.parse_or("split", 0.8)?,
        standardize,
        seed,
    };
    config.validate()?;
    Ok(config)
}

fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{what} entry '{s}' is not a number")))
        })
        .collect()
}
