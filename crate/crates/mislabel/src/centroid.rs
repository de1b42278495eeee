//! Centroid estimation and correction.
//!
//! The decomposed risk in [`crate::risk`] depends on the labels only
//! through the `d x c` centroid `(1/n) * X^t Y`. Corrupting labels with a
//! transition matrix `T` right-multiplies the population centroid by `T`,
//! so an estimate of the clean centroid can be recovered from noisy data
//! by right-multiplying with a pseudo-inverse: either of `T` itself
//! ([`CorrectionMode::DirectT`]) or of the prior-weighted imputation mix
//! `M` ([`CorrectionMode::PaperM`]).

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, pseudo_inverse};
use crate::noise::{ClassPriors, TransitionMatrix};

/// The `c x c` label-swap matrix `K_{i->j}`: the identity with rows `i`
/// and `j` exchanged.
///
/// Applied to a one-hot label it exchanges classes `i` and `j`:
/// `K e_i = e_j`, `K e_j = e_i`, and every other class is fixed. It is
/// symmetric and equal to its own inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct ImputationMatrix {
    matrix: Array2<f64>,
    from: usize,
    to: usize,
}

impl ImputationMatrix {
    pub fn new(from: usize, to: usize, classes: usize) -> Result<Self> {
        if classes < 2 {
            return Err(Error::InvalidInput(format!(
                "class count must be at least 2, got {classes}"
            )));
        }
        for (what, index) in [("from", from), ("to", to)] {
            if index >= classes {
                return Err(Error::IndexOutOfRange {
                    what,
                    index,
                    bound: classes,
                });
            }
        }
        let mut matrix = Array2::eye(classes);
        if from != to {
            matrix[[from, from]] = 0.0;
            matrix[[to, to]] = 0.0;
            matrix[[from, to]] = 1.0;
            matrix[[to, from]] = 1.0;
        }
        Ok(ImputationMatrix { matrix, from, to })
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn from_class(&self) -> usize {
        self.from
    }

    pub fn to_class(&self) -> usize {
        self.to
    }
}

/// The empirical centroid of a dataset: `(1/n) * X^t Y`, a `d x c` matrix
/// whose column `k` is the mean of `x * 1[y = k]` over all examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroid(Array2<f64>);

impl Centroid {
    /// Wraps a precomputed `d x c` matrix, rejecting non-finite entries.
    pub fn from_array(mu: Array2<f64>) -> Result<Self> {
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "centroid contains non-finite entries".into(),
            ));
        }
        Ok(Centroid(mu))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn class_count(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(&self.0)
    }
}

/// Computes the empirical centroid `(1/n) * X^t Y`.
///
/// Column `k` accumulates the feature vectors of the examples labeled `k`,
/// divided by the total example count, so classes absent from the data
/// contribute zero columns.
pub fn empirical_centroid(ds: &Dataset) -> Centroid {
    let n = ds.n_examples();
    let mut mu = Array2::zeros((ds.dim(), ds.class_count()));
    for (i, &label) in ds.labels().iter().enumerate() {
        for j in 0..ds.dim() {
            mu[[j, label]] += ds.features()[[i, j]];
        }
    }
    mu /= n as f64;
    Centroid(mu)
}

/// How to map a noisy centroid back to a clean-centroid estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionMode {
    /// Right-multiply by the pseudo-inverse of the prior-weighted
    /// imputation mix `M = sum_i priors[i] * sum_j T[i][j] * K_{i->j}^t`.
    PaperM,
    /// Right-multiply by the pseudo-inverse of the transition matrix
    /// itself, inverting the population identity `noisy = clean * T`.
    DirectT,
}

impl CorrectionMode {
    pub fn name(&self) -> &'static str {
        match self {
            CorrectionMode::PaperM => "paper-m",
            CorrectionMode::DirectT => "direct-t",
        }
    }
}

/// A correction matrix together with the pseudo-inverse that applies it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionMatrix {
    mode: CorrectionMode,
    matrix: Array2<f64>,
    pinv: Array2<f64>,
}

impl CorrectionMatrix {
    /// Builds the correction for `mode` from the transition matrix and, for
    /// [`CorrectionMode::PaperM`], the class priors.
    pub fn build(
        mode: CorrectionMode,
        t: &TransitionMatrix,
        priors: &ClassPriors,
        tol: f64,
    ) -> Result<Self> {
        match mode {
            CorrectionMode::PaperM => compute_m(t, priors, tol),
            CorrectionMode::DirectT => {
                let matrix = t.as_array().clone();
                let pinv = pseudo_inverse(&matrix, tol)?;
                Ok(CorrectionMatrix {
                    mode,
                    matrix,
                    pinv,
                })
            }
        }
    }

    pub fn mode(&self) -> CorrectionMode {
        self.mode
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn pinv(&self) -> &Array2<f64> {
        &self.pinv
    }

    /// Applies the correction: `corrected = noisy * pinv`.
    pub fn apply(&self, noisy: &Centroid) -> Result<Centroid> {
        if noisy.class_count() != self.matrix.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "centroid has {} classes, correction matrix is {} x {}",
                noisy.class_count(),
                self.matrix.nrows(),
                self.matrix.ncols()
            )));
        }
        Centroid::from_array(noisy.as_array().dot(&self.pinv))
    }
}

/// Assembles the prior-weighted imputation mix
/// `M = sum_i priors[i] * sum_j T[i][j] * K_{i->j}^t` and its
/// pseudo-inverse.
///
/// Each term contributes `priors[i] * T[i][j]` to the transposed swap
/// matrix `K_{i->j}^t`, which is `K_{i->j}` itself by symmetry. With the
/// identity transition matrix the off-diagonal terms carry zero weight
/// and `M` collapses back to the identity.
pub fn compute_m(t: &TransitionMatrix, priors: &ClassPriors, tol: f64) -> Result<CorrectionMatrix> {
    let c = t.class_count();
    if priors.class_count() != c {
        return Err(Error::ShapeMismatch(format!(
            "priors are for {} classes, transition matrix for {c}",
            priors.class_count()
        )));
    }
    let mut m = Array2::zeros((c, c));
    for i in 0..c {
        for j in 0..c {
            let w = priors.as_slice()[i] * t.as_array()[[i, j]];
            // w * K_{i->j}^t, written entry-wise: K is the identity with
            // rows i and j swapped, and K^t = K.
            for k in 0..c {
                if k != i && k != j {
                    m[[k, k]] += w;
                }
            }
            if i == j {
                m[[i, i]] += w;
            } else {
                m[[i, j]] += w;
                m[[j, i]] += w;
            }
        }
    }
    let pinv = pseudo_inverse(&m, tol)?;
    Ok(CorrectionMatrix {
        mode: CorrectionMode::PaperM,
        matrix: m,
        pinv,
    })
}

/// Estimates the clean centroid from a noisy one in a single call.
///
/// `priors` are only consulted in [`CorrectionMode::PaperM`]; the direct
/// mode depends on the transition matrix alone.
pub fn correct_centroid(
    noisy: &Centroid,
    t: &TransitionMatrix,
    priors: &ClassPriors,
    mode: CorrectionMode,
    tol: f64,
) -> Result<Centroid> {
    CorrectionMatrix::build(mode, t, priors, tol)?.apply(noisy)
}
