//! Label corruption and its inverse problems.
//!
//! A [`TransitionMatrix`] `T` gives the probability `T[i][j]` that a true
//! label `i` is observed as `j`. [`inject_noise`] applies `T` to a clean
//! dataset; [`estimate_priors`] goes the other way, recovering the clean
//! class prior from observed noisy label frequencies.

use std::path::Path;

use ndarray::Array2;
use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Provenance, read_matrix_csv, validate_simplex, write_matrix_csv};
use crate::error::{Error, Result};
use crate::linalg::pseudo_inverse;
use crate::rng::{STREAM_LABEL_NOISE, categorical_index, stream_rng};

/// A row-stochastic `c x c` label transition matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix(Array2<f64>);

impl TransitionMatrix {
    /// Uniform off-diagonal noise: each label keeps its class with
    /// probability `1 - rate` and flips to each of the other `c - 1`
    /// classes with probability `rate / (c - 1)`. Requires `0 <= rate < 1`.
    pub fn symmetric(classes: usize, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && (0.0..1.0).contains(&rate)) {
            return Err(Error::InvalidInput(format!(
                "symmetric noise rate must lie in [0, 1), got {rate}"
            )));
        }
        check_class_count(classes)?;
        let off = rate / (classes - 1) as f64;
        let t = Array2::from_shape_fn((classes, classes), |(i, j)| {
            if i == j { 1.0 - rate } else { off }
        });
        Ok(TransitionMatrix(t))
    }

    /// Neighbor-flip noise: each label keeps its class with probability
    /// `1 - rate` and flips to the cyclically next class `(i + 1) % c` with
    /// probability `rate`. Requires `0 <= rate < 0.5` so the diagonal stays
    /// dominant.
    pub fn pairflip(classes: usize, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && (0.0..0.5).contains(&rate)) {
            return Err(Error::InvalidInput(format!(
                "pairflip noise rate must lie in [0, 0.5), got {rate}"
            )));
        }
        check_class_count(classes)?;
        let mut t = Array2::zeros((classes, classes));
        for i in 0..classes {
            t[[i, i]] = 1.0 - rate;
            t[[i, (i + 1) % classes]] = rate;
        }
        Ok(TransitionMatrix(t))
    }

    /// The no-noise transition matrix.
    pub fn identity(classes: usize) -> Result<Self> {
        check_class_count(classes)?;
        Ok(TransitionMatrix(Array2::eye(classes)))
    }

    /// Validates an explicit matrix: square, at least 2 x 2, entries in
    /// `[0, 1]`, every row summing to 1 within 1e-9.
    pub fn from_array(t: Array2<f64>) -> Result<Self> {
        let (r, c) = t.dim();
        if r != c {
            return Err(Error::ShapeMismatch(format!(
                "transition matrix must be square, got {r} x {c}"
            )));
        }
        check_class_count(c)?;
        for i in 0..r {
            let mut sum = 0.0;
            for j in 0..c {
                let v = t[[i, j]];
                if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                    return Err(Error::InvalidInput(format!(
                        "transition entry ({i}, {j}) is {v}, expected a probability"
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "transition row {i} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(TransitionMatrix(t))
    }

    pub fn class_count(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    /// Writes the matrix as bare CSV, `c` rows of `c` values.
    pub fn to_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_matrix_csv(&self.0, path)
    }

    /// Reads and validates a matrix written by [`TransitionMatrix::to_csv`].
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        TransitionMatrix::from_array(read_matrix_csv(path)?)
    }
}

fn check_class_count(classes: usize) -> Result<()> {
    if classes < 2 {
        return Err(Error::InvalidInput(format!(
            "class count must be at least 2, got {classes}"
        )));
    }
    Ok(())
}

/// A clean-class prior distribution on the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPriors(Vec<f64>);

impl ClassPriors {
    pub fn uniform(classes: usize) -> Result<Self> {
        check_class_count(classes)?;
        Ok(ClassPriors(vec![1.0 / classes as f64; classes]))
    }

    pub fn from_vec(p: Vec<f64>) -> Result<Self> {
        check_class_count(p.len())?;
        validate_simplex(&p, p.len(), "class priors")?;
        Ok(ClassPriors(p))
    }

    pub fn class_count(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// The family of supported corruption processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Symmetric,
    Pairflip,
    /// An explicit transition matrix supplied by the caller.
    Explicit,
}

/// A corruption recipe: noise family, rate, and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Flip probability; ignored when `kind` is `Explicit`.
    pub rate: f64,
    /// The matrix for `Explicit` noise; must be `None` otherwise.
    pub explicit: Option<TransitionMatrix>,
    pub seed: u64,
}

impl NoiseSpec {
    /// The transition matrix this spec describes for `classes` classes.
    pub fn transition_matrix(&self, classes: usize) -> Result<TransitionMatrix> {
        match self.kind {
            NoiseKind::Symmetric => TransitionMatrix::symmetric(classes, self.rate),
            NoiseKind::Pairflip => TransitionMatrix::pairflip(classes, self.rate),
            NoiseKind::Explicit => {
                let t = self.explicit.as_ref().ok_or_else(|| {
                    Error::InvalidInput("explicit noise requires a transition matrix".into())
                })?;
                if t.class_count() != classes {
                    return Err(Error::ShapeMismatch(format!(
                        "explicit transition matrix is for {} classes, dataset has {classes}",
                        t.class_count()
                    )));
                }
                Ok(t.clone())
            }
        }
    }
}

/// Corrupts the labels of a clean dataset by one draw from `T`'s row per
/// example.
///
/// Example `i` with label `l` receives a new label sampled from row `l` of
/// `t`, via a single uniform draw inverted through the row's CDF. Features
/// are untouched and the result is marked [`Provenance::Noisy`]. The same
/// `(dataset, t, seed)` triple always yields the same corruption.
pub fn inject_noise(ds: &Dataset, t: &TransitionMatrix, seed: u64) -> Result<Dataset> {
    if ds.provenance() != Provenance::Clean {
        return Err(Error::InvalidInput(
            "refusing to corrupt an already-noisy dataset".into(),
        ));
    }
    if t.class_count() != ds.class_count() {
        return Err(Error::ShapeMismatch(format!(
            "transition matrix is for {} classes, dataset has {}",
            t.class_count(),
            ds.class_count()
        )));
    }
    let mut rng = stream_rng(seed, STREAM_LABEL_NOISE);
    let labels = ds
        .labels()
        .iter()
        .map(|&l| {
            let u: f64 = rng.random();
            let row = t.as_array().row(l);
            categorical_index(row.as_slice().expect("transition rows are contiguous"), u)
        })
        .collect();
    Ok(ds.with_labels(labels, Provenance::Noisy))
}

/// Observed label frequencies: `count(class) / n` for each class.
pub fn noisy_label_frequencies(ds: &Dataset) -> Vec<f64> {
    let n = ds.n_examples() as f64;
    ds.class_counts().iter().map(|&c| c as f64 / n).collect()
}

/// Recovers the clean class prior from noisy label frequencies.
///
/// The observed frequencies satisfy `freqs = T^t * priors` in expectation,
/// so the estimate is `pinv(T^t) * freqs`, clipped to non-negative and
/// renormalized to the simplex. Fails if clipping leaves nothing to
/// normalize, which signals a transition matrix grossly inconsistent with
/// the observed frequencies.
pub fn estimate_priors(t: &TransitionMatrix, freqs: &[f64], tol: f64) -> Result<ClassPriors> {
    let c = t.class_count();
    validate_simplex(freqs, c, "label frequencies")?;
    let t_transposed = t.as_array().t().to_owned();
    let pinv = pseudo_inverse(&t_transposed, tol)?;
    let mut raw: Vec<f64> = (0..c)
        .map(|i| (0..c).map(|j| pinv[[i, j]] * freqs[j]).sum())
        .collect();
    for v in &mut raw {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let sum: f64 = raw.iter().sum();
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::DegenerateSystem(
            "prior estimate collapsed to zero after clipping; the transition matrix does not \
             explain the observed label frequencies"
                .into(),
        ));
    }
    for v in &mut raw {
        *v /= sum;
    }
    ClassPriors::from_vec(raw)
}
