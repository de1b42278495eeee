//! The decomposed squared-error risk and its two solvers.
//!
//! For a linear scorer `h(x) = W^t x` with one-hot targets, the mean
//! squared error over a dataset splits into a label-free part and a part
//! that touches the labels only through the centroid `mu = (1/n) X^t Y`:
//!
//! ```text
//! risk(W) = 1 + (1/n) * ||X W||_F^2 - 2 * trace(W^t mu)
//! ```
//!
//! Swapping the empirical centroid for a corrected estimate therefore
//! retargets training without ever touching per-example labels. Both
//! solvers minimize `risk(W) + lambda * ||W||_F^2`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::centroid::{Centroid, CorrectionMode};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, solve_spd};
use crate::rng::{STREAM_TRAINER, stream_rng};

/// A trained linear scorer: `d x c` weights, one column per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    weights: Array2<f64>,
}

impl LinearModel {
    pub fn new(weights: Array2<f64>) -> Result<Self> {
        let (d, c) = weights.dim();
        if d == 0 || c < 2 {
            return Err(Error::InvalidInput(format!(
                "model weights must be d x c with d >= 1 and c >= 2, got {d} x {c}"
            )));
        }
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "model weights contain non-finite values".into(),
            ));
        }
        Ok(LinearModel { weights })
    }

    pub fn dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn class_count(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    /// Per-class scores `W^t x` for one example.
    pub fn scores(&self, x: ArrayView1<f64>) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "example has {} features, model expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok((0..self.class_count())
            .map(|k| x.dot(&self.weights.column(k)))
            .collect())
    }

    /// The predicted class: argmax of the scores, lowest index on ties.
    pub fn predict(&self, x: ArrayView1<f64>) -> Result<usize> {
        let scores = self.scores(x)?;
        let mut best = 0;
        for (k, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = k;
            }
        }
        Ok(best)
    }
}

/// Metadata stored alongside model weights on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub lambda: f64,
    /// The correction mode the training centroid came from: `paper-m`,
    /// `direct-t`, or `none`.
    pub mode: String,
}

/// Writes a model as CSV: one `#`-prefixed metadata line recording the
/// shape, regularizer, and correction mode, then `d` rows of `c` weights.
pub fn save_model_csv(
    model: &LinearModel,
    meta: &ModelMeta,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!(
        "# d={} c={} lambda={} mode={}\n",
        model.dim(),
        model.class_count(),
        meta.lambda,
        meta.mode
    );
    for i in 0..model.dim() {
        for j in 0..model.class_count() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{}", model.weights[[i, j]]).unwrap();
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a model written by [`save_model_csv`].
pub fn load_model_csv(path: impl AsRef<Path>) -> Result<(LinearModel, ModelMeta)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let parse_fail = |message: String| Error::Parse {
        path: path.into(),
        row: 0,
        column: "-".into(),
        message,
    };
    let rest = header
        .strip_prefix('#')
        .ok_or_else(|| parse_fail("model file must start with a '#' metadata line".into()))?;
    let mut d = None;
    let mut c = None;
    let mut lambda = None;
    let mut mode = None;
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_fail(format!("metadata field '{field}' is not key=value")))?;
        match key {
            "d" => d = Some(value.parse::<usize>()),
            "c" => c = Some(value.parse::<usize>()),
            "lambda" => {
                lambda = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| parse_fail(format!("bad lambda '{value}'")))?,
                )
            }
            "mode" => mode = Some(value.to_string()),
            other => return Err(parse_fail(format!("unknown metadata key '{other}'"))),
        }
    }
    let d = d
        .ok_or_else(|| parse_fail("metadata is missing 'd'".into()))?
        .map_err(|_| parse_fail("bad 'd'".into()))?;
    let c = c
        .ok_or_else(|| parse_fail("metadata is missing 'c'".into()))?
        .map_err(|_| parse_fail("bad 'c'".into()))?;
    let lambda = lambda.ok_or_else(|| parse_fail("metadata is missing 'lambda'".into()))?;
    let mode = mode.ok_or_else(|| parse_fail("metadata is missing 'mode'".into()))?;

    let mut weights = Vec::with_capacity(d * c);
    let mut rows = 0usize;
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows += 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != c {
            return Err(Error::Parse {
                path: path.into(),
                row: idx + 1,
                column: "-".into(),
                message: format!("expected {c} weights, got {}", cells.len()),
            });
        }
        for (j, cell) in cells.iter().enumerate() {
            weights.push(cell.parse::<f64>().map_err(|_| Error::Parse {
                path: path.into(),
                row: idx + 1,
                column: format!("{j}"),
                message: format!("'{cell}' is not a number"),
            })?);
        }
    }
    if rows != d {
        return Err(parse_fail(format!("expected {d} weight rows, got {rows}")));
    }
    let weights = Array2::from_shape_vec((d, c), weights)
        .expect("row-major weight buffer matches declared dimensions");
    Ok((LinearModel::new(weights)?, ModelMeta { lambda, mode }))
}

/// Mean squared error against one-hot targets, computed directly from the
/// labels: `(1/n) * sum_i ||y_i - W^t x_i||^2`.
pub fn naive_mse_risk(model: &LinearModel, ds: &Dataset) -> Result<f64> {
    if ds.dim() != model.dim() || ds.class_count() != model.class_count() {
        return Err(Error::ShapeMismatch(format!(
            "model is {} x {}, dataset is {} features x {} classes",
            model.dim(),
            model.class_count(),
            ds.dim(),
            ds.class_count()
        )));
    }
    let n = ds.n_examples() as f64;
    let scores = ds.features().dot(&model.weights);
    let sum_sq: f64 = scores.iter().map(|s| s * s).sum();
    let sum_hit: f64 = ds
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &l)| scores[[i, l]])
        .sum();
    Ok(1.0 + sum_sq / n - 2.0 * sum_hit / n)
}

fn check_risk_shapes(
    model: &LinearModel,
    features: &Array2<f64>,
    centroid: &Centroid,
) -> Result<()> {
    if features.ncols() != model.dim() {
        return Err(Error::ShapeMismatch(format!(
            "features have {} columns, model expects {}",
            features.ncols(),
            model.dim()
        )));
    }
    if features.nrows() == 0 {
        return Err(Error::InvalidInput("features matrix has no rows".into()));
    }
    if centroid.dim() != model.dim() || centroid.class_count() != model.class_count() {
        return Err(Error::ShapeMismatch(format!(
            "centroid is {} x {}, model is {} x {}",
            centroid.dim(),
            centroid.class_count(),
            model.dim(),
            model.class_count()
        )));
    }
    Ok(())
}

/// The label-decomposed risk `1 + (1/n) ||X W||_F^2 - 2 trace(W^t mu)`.
///
/// Equals [`naive_mse_risk`] when `mu` is the dataset's own empirical
/// centroid; substituting a corrected centroid changes only this term.
pub fn decomposed_risk(
    model: &LinearModel,
    features: &Array2<f64>,
    centroid: &Centroid,
) -> Result<f64> {
    check_risk_shapes(model, features, centroid)?;
    let n = features.nrows() as f64;
    let scores = features.dot(&model.weights);
    let sum_sq: f64 = scores.iter().map(|s| s * s).sum();
    let trace: f64 = model
        .weights
        .iter()
        .zip(centroid.as_array().iter())
        .map(|(w, m)| w * m)
        .sum();
    Ok(1.0 + sum_sq / n - 2.0 * trace)
}

/// The training objective: decomposed risk plus `lambda * ||W||_F^2`.
pub fn objective(
    model: &LinearModel,
    features: &Array2<f64>,
    centroid: &Centroid,
    lambda: f64,
) -> Result<f64> {
    let w_norm = frobenius_norm(&model.weights);
    Ok(decomposed_risk(model, features, centroid)? + lambda * w_norm * w_norm)
}

/// Gradient of the regularized decomposed risk:
/// `2 C W - 2 mu + 2 lambda W` with `C = (1/n) X^t X`, evaluated as
/// `X^t (X W)` to avoid forming `C`.
pub fn risk_gradient(
    model: &LinearModel,
    features: &Array2<f64>,
    centroid: &Centroid,
    lambda: f64,
) -> Result<Array2<f64>> {
    check_risk_shapes(model, features, centroid)?;
    let n = features.nrows() as f64;
    let scores = features.dot(&model.weights);
    let mut grad = features.t().dot(&scores) * (2.0 / n);
    grad -= &(centroid.as_array() * 2.0);
    grad += &(&model.weights * (2.0 * lambda));
    Ok(grad)
}

/// Which optimizer [`train`] dispatches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    ClosedForm,
    Iterative,
}

/// Mini-batch gradient descent settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterativeConfig {
    /// Initial step size.
    pub step_size: f64,
    /// Momentum smoothing factor in `[0, 1)`.
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Epoch at which the step size starts decaying linearly toward zero;
    /// set at or past `epochs` to disable decay.
    pub decay_start: usize,
}

impl Default for IterativeConfig {
    fn default() -> Self {
        IterativeConfig {
            step_size: 0.001,
            momentum: 0.9,
            epochs: 200,
            batch_size: 128,
            decay_start: 80,
        }
    }
}

impl IterativeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::InvalidInput(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if !(self.momentum.is_finite() && (0.0..1.0).contains(&self.momentum)) {
            return Err(Error::InvalidInput(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidInput("batch size must be positive".into()));
        }
        Ok(())
    }

    fn step_at(&self, epoch: usize) -> f64 {
        if epoch < self.decay_start {
            self.step_size
        } else {
            let span = (self.epochs - self.decay_start) as f64;
            self.step_size * (self.epochs - epoch) as f64 / span
        }
    }
}

/// Full training configuration shared by the CLI and the experiment
/// harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskConfig {
    /// Ridge regularizer; must be non-negative.
    pub lambda: f64,
    /// Centroid correction applied before training, if any.
    pub correction: Option<CorrectionMode>,
    pub solver: Solver,
    pub iterative: IterativeConfig,
    pub seed: u64,
}

impl Default for RiskConfig {
    fn default() -> Self {
        RiskConfig {
            lambda: 1e-3,
            correction: None,
            solver: Solver::ClosedForm,
            iterative: IterativeConfig::default(),
            seed: 0,
        }
    }
}

impl RiskConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        self.iterative.validate()
    }
}

/// Minimizes the regularized decomposed risk exactly:
/// `W = (C + lambda I)^-1 mu` with `C = (1/n) X^t X`, solved by Cholesky.
///
/// Fails with a singularity error when `C + lambda I` is not positive
/// definite, which for `lambda = 0` means the feature second-moment matrix
/// is rank deficient; a positive `lambda` always repairs that.
pub fn closed_form_solve(
    features: &Array2<f64>,
    centroid: &Centroid,
    lambda: f64,
) -> Result<LinearModel> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let n = features.nrows();
    let d = features.ncols();
    if n == 0 || d == 0 {
        return Err(Error::InvalidInput(
            "features matrix must be non-empty".into(),
        ));
    }
    if centroid.dim() != d {
        return Err(Error::ShapeMismatch(format!(
            "centroid has {} rows, features have {d} columns",
            centroid.dim()
        )));
    }
    let mut system = features.t().dot(features) / n as f64;
    for i in 0..d {
        system[[i, i]] += lambda;
    }
    let weights = solve_spd(&system, centroid.as_array())
        .filter(|w| w.iter().all(|v| v.is_finite()))
        .ok_or_else(|| {
            Error::SingularSystem(
                "feature second-moment matrix plus lambda*I is not positive definite; \
                 set lambda > 0 to regularize"
                    .into(),
            )
        })?;
    LinearModel::new(weights)
}

/// Minimizes the regularized decomposed risk by mini-batch gradient
/// descent with momentum.
///
/// Weights start at zero. Each epoch shuffles the examples with the
/// trainer stream of `seed` and walks them in batches of
/// `config.batch_size`; a batch's gradient uses its own feature
/// second-moment but always the fixed supplied `centroid`. The step size
/// follows [`IterativeConfig::step_at`]. After every epoch the full
/// objective is checked and a non-finite value aborts training with a
/// divergence error naming the epoch.
pub fn iterative_train(
    features: &Array2<f64>,
    centroid: &Centroid,
    lambda: f64,
    config: &IterativeConfig,
    seed: u64,
) -> Result<LinearModel> {
    config.validate()?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let n = features.nrows();
    let d = features.ncols();
    let c = centroid.class_count();
    if n == 0 || d == 0 {
        return Err(Error::InvalidInput(
            "features matrix must be non-empty".into(),
        ));
    }
    if centroid.dim() != d {
        return Err(Error::ShapeMismatch(format!(
            "centroid has {} rows, features have {d} columns",
            centroid.dim()
        )));
    }

    let mut w = Array2::<f64>::zeros((d, c));
    let mut velocity = Array2::<f64>::zeros((d, c));
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(seed, STREAM_TRAINER);
    let two_mu = centroid.as_array() * 2.0;

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let step = config.step_at(epoch);
        for batch in order.chunks(config.batch_size) {
            let xb = features.select(Axis(0), batch);
            let scores = xb.dot(&w);
            let mut grad = xb.t().dot(&scores) * (2.0 / batch.len() as f64);
            grad -= &two_mu;
            grad += &(&w * (2.0 * lambda));
            velocity = velocity * config.momentum + grad;
            w -= &(&velocity * step);
        }
        let sum_sq: f64 = features.dot(&w).iter().map(|s| s * s).sum();
        let trace: f64 = w.iter().zip(centroid.as_array().iter()).map(|(a, b)| a * b).sum();
        let reg: f64 = w.iter().map(|v| v * v).sum::<f64>() * lambda;
        let obj = 1.0 + sum_sq / n as f64 - 2.0 * trace + reg;
        if !obj.is_finite() {
            return Err(Error::Diverged { epoch });
        }
    }
    LinearModel::new(w)
}

/// Trains with the solver selected in `config` on the given centroid.
pub fn train(
    features: &Array2<f64>,
    centroid: &Centroid,
    config: &RiskConfig,
) -> Result<LinearModel> {
    config.validate()?;
    match config.solver {
        Solver::ClosedForm => closed_form_solve(features, centroid, config.lambda),
        Solver::Iterative => iterative_train(
            features,
            centroid,
            config.lambda,
            &config.iterative,
            config.seed,
        ),
    }
}
