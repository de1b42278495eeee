//! Learning multi-class linear classifiers from noisily labeled data.
//!
//! The squared-error risk of a linear scorer depends on the labels only
//! through the class centroid, the per-class average of the feature
//! vectors. When labels are corrupted by a known class-transition matrix,
//! the noisy centroid is a linear image of the clean one, so inverting
//! that map recovers an unbiased training target from corrupted data
//! alone. This crate implements the whole pipeline:
//!
//! - [`data`]: datasets, one-hot labels, Gaussian mixture generation,
//!   CSV and IDX file formats, standardization.
//! - [`noise`]: transition matrices (symmetric, pairflip, explicit), label
//!   corruption, and class-prior estimation from noisy label frequencies.
//! - [`centroid`]: empirical centroids and the two correction routes,
//!   through the prior-weighted imputation mix (`paper-m`) or through the
//!   transition matrix itself (`direct-t`).
//! - [`risk`]: the decomposed risk, its gradient, a ridge closed-form
//!   solver, and a mini-batch gradient trainer with momentum.
//! - [`eval`]: train/test splitting, accuracy, and a multi-trial
//!   experiment harness comparing corrected, naive, and clean-label arms.
//!
//! Every random choice flows from explicit seeds through per-purpose
//! streams, so all results reproduce bit-for-bit.

pub mod centroid;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod noise;
pub mod risk;
mod rng;

pub use centroid::{
    Centroid, CorrectionMatrix, CorrectionMode, ImputationMatrix, compute_m, correct_centroid,
    empirical_centroid,
};
pub use data::{
    Dataset, GaussianMixtureSpec, OneHotLabel, Provenance, Standardizer, encode_one_hot,
    gen_gaussian_mixture, load_csv, load_csv_with_classes, load_idx, read_matrix_csv, save_csv,
    save_idx, write_matrix_csv,
};
pub use error::{Error, Result};
pub use eval::{
    Arm, ArmReport, DataSource, ExperimentConfig, ExperimentReport, REPORT_SCHEMA_VERSION,
    ReportFormat, accuracy, emit_report, parse_config, run_experiment, split_dataset,
};
pub use linalg::{DEFAULT_PINV_TOL, frobenius_norm, pseudo_inverse};
pub use noise::{
    ClassPriors, NoiseKind, NoiseSpec, TransitionMatrix, estimate_priors, inject_noise,
    noisy_label_frequencies,
};
pub use risk::{
    IterativeConfig, LinearModel, ModelMeta, RiskConfig, Solver, closed_form_solve,
    decomposed_risk, iterative_train, load_model_csv, naive_mse_risk, objective, risk_gradient,
    save_model_csv, train,
};
