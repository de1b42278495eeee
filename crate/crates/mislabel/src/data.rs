//! Datasets, synthetic generation, and file ingestion.
//!
//! A [`Dataset`] couples an `n x d` feature matrix with one class label per
//! row and remembers whether its labels are pristine ([`Provenance::Clean`])
//! or have passed through a corruption step ([`Provenance::Noisy`]). Labels
//! are stored as class indices; the one-hot view used by the estimation
//! code is materialized on demand.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::{STREAM_MIXTURE_CLASS, STREAM_MIXTURE_FEATURE, categorical_index, stream_rng};

/// Whether a dataset's labels are original or have been corrupted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Clean,
    Noisy,
}

/// A single label in one-hot form: class `class` out of `classes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneHotLabel {
    class: usize,
    classes: usize,
}

impl OneHotLabel {
    pub fn class_index(&self) -> usize {
        self.class
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    /// The explicit indicator vector: 1 at the class index, 0 elsewhere.
    pub fn to_vector(&self) -> Array1<f64> {
        let mut v = Array1::zeros(self.classes);
        v[self.class] = 1.0;
        v
    }

    /// Validates an explicit indicator vector: entries must be exactly 0 or
    /// 1, with exactly one 1.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "one-hot vector needs at least 2 entries, got {}",
                v.len()
            )));
        }
        let mut hot = None;
        for (k, &x) in v.iter().enumerate() {
            if x == 1.0 {
                if hot.is_some() {
                    return Err(Error::InvalidInput(
                        "one-hot vector has more than one entry equal to 1".into(),
                    ));
                }
                hot = Some(k);
            } else if x != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "one-hot vector entry {k} is {x}, expected 0 or 1"
                )));
            }
        }
        match hot {
            Some(class) => Ok(OneHotLabel {
                class,
                classes: v.len(),
            }),
            None => Err(Error::InvalidInput(
                "one-hot vector has no entry equal to 1".into(),
            )),
        }
    }
}

/// Encodes class `class` out of `classes` as a one-hot label.
pub fn encode_one_hot(class: usize, classes: usize) -> Result<OneHotLabel> {
    if classes < 2 {
        return Err(Error::InvalidInput(format!(
            "class count must be at least 2, got {classes}"
        )));
    }
    if class >= classes {
        return Err(Error::IndexOutOfRange {
            what: "class",
            index: class,
            bound: classes,
        });
    }
    Ok(OneHotLabel { class, classes })
}

/// A labeled dataset: `n x d` features plus one class index per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    classes: usize,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset, validating shape agreement, label range, and
    /// feature finiteness.
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        classes: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidInput(format!(
                "dataset needs at least one example and one feature, got {n} x {d}"
            )));
        }
        if classes < 2 {
            return Err(Error::InvalidInput(format!(
                "class count must be at least 2, got {classes}"
            )));
        }
        if labels.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{n} feature rows but {} labels",
                labels.len()
            )));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|&(_, &l)| l >= classes) {
            return Err(Error::InvalidInput(format!(
                "label {l} at row {i} is outside [0, {classes})"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "features contain non-finite values".into(),
            ));
        }
        Ok(Dataset {
            features,
            labels,
            classes,
            provenance,
        })
    }

    pub fn n_examples(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_one_hot(&self, row: usize) -> Result<OneHotLabel> {
        if row >= self.n_examples() {
            return Err(Error::IndexOutOfRange {
                what: "row",
                index: row,
                bound: self.n_examples(),
            });
        }
        encode_one_hot(self.labels[row], self.classes)
    }

    /// The full `n x c` one-hot label matrix.
    pub fn one_hot_labels(&self) -> Array2<f64> {
        let mut y = Array2::zeros((self.n_examples(), self.classes));
        for (i, &l) in self.labels.iter().enumerate() {
            y[[i, l]] = 1.0;
        }
        y
    }

    /// Number of examples per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// A new dataset holding the given rows, in order.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("subset needs at least one row".into()));
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_examples()) {
            return Err(Error::IndexOutOfRange {
                what: "row",
                index: bad,
                bound: self.n_examples(),
            });
        }
        let features = Array2::from_shape_fn((rows.len(), self.dim()), |(i, j)| {
            self.features[[rows[i], j]]
        });
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Ok(Dataset {
            features,
            labels,
            classes: self.classes,
            provenance: self.provenance,
        })
    }

    /// The same features with replacement labels, used by label corruption.
    pub(crate) fn with_labels(&self, labels: Vec<usize>, provenance: Provenance) -> Dataset {
        assert_eq!(labels.len(), self.n_examples());
        Dataset {
            features: self.features.clone(),
            labels,
            classes: self.classes,
            provenance,
        }
    }

    /// SHA-256 over dimensions, provenance, feature bits, and labels.
    ///
    /// Two datasets hash equal iff they are bitwise-identical, which is how
    /// tests assert that a pipeline stage left its inputs untouched.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_examples() as u64).to_le_bytes());
        h.update((self.dim() as u64).to_le_bytes());
        h.update((self.classes as u64).to_le_bytes());
        h.update([match self.provenance {
            Provenance::Clean => 0u8,
            Provenance::Noisy => 1u8,
        }]);
        for v in self.features.iter() {
            h.update(v.to_bits().to_le_bytes());
        }
        for &l in &self.labels {
            h.update((l as u64).to_le_bytes());
        }
        let digest = h.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{byte:02x}").unwrap();
        }
        hex
    }
}

/// Parameters of a spherical Gaussian mixture with one component per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixtureSpec {
    /// Number of classes (mixture components).
    pub classes: usize,
    /// Feature dimension.
    pub dim: usize,
    /// Component means, one row per class (`classes x dim`).
    pub means: Array2<f64>,
    /// Shared isotropic standard deviation.
    pub sigma: f64,
    /// Mixing weights (class priors); must lie on the simplex.
    pub weights: Vec<f64>,
    /// Seed for the generator's random streams.
    pub seed: u64,
}

impl GaussianMixtureSpec {
    /// A mixture with uniform weights whose class means sit on scaled
    /// coordinate axes: class `k` has `separation * (1 + k / dim)` at
    /// coordinate `k % dim` and 0 elsewhere, so means stay distinct even
    /// when there are more classes than dimensions.
    pub fn axis_aligned(
        classes: usize,
        dim: usize,
        separation: f64,
        sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dim must be at least 1".into()));
        }
        let mut means = Array2::zeros((classes, dim));
        for k in 0..classes {
            means[[k, k % dim]] = separation * (1.0 + (k / dim) as f64);
        }
        let spec = GaussianMixtureSpec {
            classes,
            dim,
            means,
            sigma,
            weights: vec![1.0 / classes.max(1) as f64; classes],
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::InvalidInput(format!(
                "mixture needs at least 2 classes, got {}",
                self.classes
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidInput(
                "mixture dimension must be positive".into(),
            ));
        }
        if self.means.dim() != (self.classes, self.dim) {
            return Err(Error::ShapeMismatch(format!(
                "means are {:?}, expected ({}, {})",
                self.means.dim(),
                self.classes,
                self.dim
            )));
        }
        if self.means.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "mixture means contain non-finite values".into(),
            ));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sigma must be finite and positive, got {}",
                self.sigma
            )));
        }
        validate_simplex(&self.weights, self.classes, "mixture weights")?;
        Ok(())
    }

    /// The population centroid `E[x y^T]`: column `k` is `weights[k] *
    /// means[k]`. Useful as a large-sample reference in tests and examples.
    pub fn population_centroid(&self) -> Array2<f64> {
        let mut mu = Array2::zeros((self.dim, self.classes));
        for k in 0..self.classes {
            for j in 0..self.dim {
                mu[[j, k]] = self.weights[k] * self.means[[k, j]];
            }
        }
        mu
    }
}

pub(crate) fn validate_simplex(w: &[f64], expected_len: usize, what: &str) -> Result<()> {
    if w.len() != expected_len {
        return Err(Error::ShapeMismatch(format!(
            "{what} has {} entries, expected {expected_len}",
            w.len()
        )));
    }
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput(format!(
            "{what} must be non-negative and finite"
        )));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "{what} must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

/// Draws `n` labeled examples from the mixture.
///
/// Class assignments and feature noise come from separate random streams of
/// the spec's seed, so the same seed always yields the same dataset
/// regardless of how the two kinds of draws interleave.
pub fn gen_gaussian_mixture(spec: &GaussianMixtureSpec, n: usize) -> Result<Dataset> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput(
            "cannot generate an empty dataset".into(),
        ));
    }
    let mut class_rng = stream_rng(spec.seed, STREAM_MIXTURE_CLASS);
    let mut feature_rng = stream_rng(spec.seed, STREAM_MIXTURE_FEATURE);

    let mut labels = Vec::with_capacity(n);
    let mut features = Array2::zeros((n, spec.dim));
    for i in 0..n {
        let u: f64 = class_rng.random();
        let k = categorical_index(&spec.weights, u);
        labels.push(k);
        for j in 0..spec.dim {
            let z: f64 = StandardNormal.sample(&mut feature_rng);
            features[[i, j]] = spec.means[[k, j]] + spec.sigma * z;
        }
    }
    Dataset::new(features, labels, spec.classes, Provenance::Clean)
}

/// Writes a dataset as CSV: header `f0,...,f{d-1},label`, one example per
/// row, features in shortest round-trip decimal form, labels as integers.
pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for j in 0..ds.dim() {
        write!(out, "f{j},").unwrap();
    }
    out.push_str("label\n");
    for i in 0..ds.n_examples() {
        for j in 0..ds.dim() {
            write!(out, "{},", ds.features[[i, j]]).unwrap();
        }
        writeln!(out, "{}", ds.labels[i]).unwrap();
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a dataset CSV, inferring the class count as `max label + 1`
/// (but at least 2). Use [`load_csv_with_classes`] when the intended class
/// count is known; inference cannot see classes absent from the file.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    load_csv_impl(path.as_ref(), None)
}

/// Reads a dataset CSV and validates every label against a known class
/// count, so a label of 5 in a 3-class file is a parse error rather than a
/// silent widening.
pub fn load_csv_with_classes(path: impl AsRef<Path>, classes: usize) -> Result<Dataset> {
    load_csv_impl(path.as_ref(), Some(classes))
}

fn load_csv_impl(path: &Path, classes: Option<usize>) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        path: path.into(),
        row: 0,
        column: "-".into(),
        message: "file is empty, expected a header row".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 || cols[cols.len() - 1] != "label" {
        return Err(Error::Parse {
            path: path.into(),
            row: 0,
            column: "-".into(),
            message: format!(
                "header must list feature columns then 'label' last, got '{header}'"
            ),
        });
    }
    let d = cols.len() - 1;
    for (j, col) in cols[..d].iter().enumerate() {
        let expected = format!("f{j}");
        if *col != expected {
            return Err(Error::Parse {
                path: path.into(),
                row: 0,
                column: (*col).into(),
                message: format!("expected feature column '{expected}'"),
            });
        }
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut row = 0usize;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        row += 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != d + 1 {
            return Err(Error::Parse {
                path: path.into(),
                row,
                column: "-".into(),
                message: format!("expected {} cells, got {}", d + 1, cells.len()),
            });
        }
        for (j, cell) in cells[..d].iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                path: path.into(),
                row,
                column: format!("f{j}"),
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: path.into(),
                    row,
                    column: format!("f{j}"),
                    message: format!("'{cell}' is not finite"),
                });
            }
            features.push(v);
        }
        let label_cell = cells[d];
        let label: usize = label_cell.parse().map_err(|_| Error::Parse {
            path: path.into(),
            row,
            column: "label".into(),
            message: format!("'{label_cell}' is not a non-negative integer"),
        })?;
        if let Some(c) = classes
            && label >= c
        {
            return Err(Error::Parse {
                path: path.into(),
                row,
                column: "label".into(),
                message: format!("label {label} is outside [0, {c})"),
            });
        }
        labels.push(label);
    }
    if row == 0 {
        return Err(Error::Parse {
            path: path.into(),
            row: 0,
            column: "-".into(),
            message: "file has a header but no data rows".into(),
        });
    }
    let classes = classes.unwrap_or_else(|| (labels.iter().copied().max().unwrap() + 1).max(2));
    let features = Array2::from_shape_vec((row, d), features)
        .expect("row-major feature buffer matches parsed dimensions");
    Dataset::new(features, labels, classes, Provenance::Clean)
}

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn idx_u32(bytes: &[u8], offset: usize, path: &Path, what: &str) -> Result<u32> {
    let slice = bytes
        .get(offset..offset + 4)
        .ok_or_else(|| Error::Format {
            path: path.into(),
            message: format!("file too short to hold {what}"),
        })?;
    Ok(u32::from_be_bytes(slice.try_into().unwrap()))
}

/// Reads an image/label file pair in IDX format (big-endian headers,
/// unsigned byte payloads). Pixels are scaled to `[0, 1]` by dividing
/// by 255; labels must be below `classes`.
pub fn load_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    classes: usize,
) -> Result<Dataset> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let img = fs::read(images_path).map_err(|e| Error::io(images_path, e))?;
    let lab = fs::read(labels_path).map_err(|e| Error::io(labels_path, e))?;

    let magic = idx_u32(&img, 0, images_path, "magic number")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::Format {
            path: images_path.into(),
            message: format!("bad magic {magic:#010x}, expected {IDX_IMAGES_MAGIC:#010x}"),
        });
    }
    let n = idx_u32(&img, 4, images_path, "image count")? as usize;
    let rows = idx_u32(&img, 8, images_path, "row count")? as usize;
    let cols = idx_u32(&img, 12, images_path, "column count")? as usize;
    let expected = 16 + n * rows * cols;
    if img.len() != expected {
        return Err(Error::Format {
            path: images_path.into(),
            message: format!(
                "payload is {} bytes, expected {expected} for {n} images of {rows}x{cols}",
                img.len()
            ),
        });
    }

    let magic = idx_u32(&lab, 0, labels_path, "magic number")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::Format {
            path: labels_path.into(),
            message: format!("bad magic {magic:#010x}, expected {IDX_LABELS_MAGIC:#010x}"),
        });
    }
    let n_lab = idx_u32(&lab, 4, labels_path, "label count")? as usize;
    if lab.len() != 8 + n_lab {
        return Err(Error::Format {
            path: labels_path.into(),
            message: format!("payload is {} bytes, expected {}", lab.len(), 8 + n_lab),
        });
    }
    if n_lab != n {
        return Err(Error::Format {
            path: labels_path.into(),
            message: format!("{n_lab} labels for {n} images"),
        });
    }

    let d = rows * cols;
    let features = Array2::from_shape_fn((n, d), |(i, j)| img[16 + i * d + j] as f64 / 255.0);
    let labels: Vec<usize> = lab[8..].iter().map(|&b| b as usize).collect();
    if let Some((i, &l)) = labels.iter().enumerate().find(|&(_, &l)| l >= classes) {
        return Err(Error::Format {
            path: labels_path.into(),
            message: format!("label {l} at index {i} is outside [0, {classes})"),
        });
    }
    Dataset::new(features, labels, classes, Provenance::Clean)
}

/// Writes a dataset as an IDX image/label file pair.
///
/// Feature values must lie in `[0, 1]`; each is quantized to a byte as
/// `round(v * 255)`, so only values of the form `k / 255` survive a
/// round-trip bit-exactly. Requires `rows * cols` to equal the feature
/// dimension and fewer than 256 classes.
pub fn save_idx(
    ds: &Dataset,
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    rows: usize,
    cols: usize,
) -> Result<()> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    if rows * cols != ds.dim() {
        return Err(Error::ShapeMismatch(format!(
            "{rows}x{cols} pixels cannot hold {} features",
            ds.dim()
        )));
    }
    if ds.class_count() > 256 {
        return Err(Error::InvalidInput(format!(
            "IDX labels are bytes; {} classes will not fit",
            ds.class_count()
        )));
    }
    if ds.features.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::InvalidInput(
            "IDX features must lie in [0, 1]".into(),
        ));
    }
    let n = ds.n_examples();
    let mut img = Vec::with_capacity(16 + n * ds.dim());
    img.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
    img.extend_from_slice(&(n as u32).to_be_bytes());
    img.extend_from_slice(&(rows as u32).to_be_bytes());
    img.extend_from_slice(&(cols as u32).to_be_bytes());
    for v in ds.features.iter() {
        img.push((v * 255.0).round() as u8);
    }
    let mut lab = Vec::with_capacity(8 + n);
    lab.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    lab.extend_from_slice(&(n as u32).to_be_bytes());
    lab.extend(ds.labels.iter().map(|&l| l as u8));

    fs::write(images_path, img).map_err(|e| Error::io(images_path, e))?;
    fs::write(labels_path, lab).map_err(|e| Error::io(labels_path, e))
}

/// Per-feature affine transform fitted on one dataset and applied to others.
///
/// Fitting computes each column's mean and population standard deviation on
/// the training split only; applying it elsewhere keeps test data out of the
/// preprocessing statistics. Constant columns pass through unscaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(ds: &Dataset) -> Standardizer {
        let n = ds.n_examples() as f64;
        let d = ds.dim();
        let mut mean = vec![0.0; d];
        let mut scale = vec![0.0; d];
        for j in 0..d {
            let col = ds.features.column(j);
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            mean[j] = m;
            let sd = var.sqrt();
            scale[j] = if sd > 1e-12 { sd } else { 1.0 };
        }
        Standardizer { mean, scale }
    }

    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        if self.mean.len() != ds.dim() {
            return Err(Error::ShapeMismatch(format!(
                "standardizer was fitted on {} features, dataset has {}",
                self.mean.len(),
                ds.dim()
            )));
        }
        let features = Array2::from_shape_fn((ds.n_examples(), ds.dim()), |(i, j)| {
            (ds.features[[i, j]] - self.mean[j]) / self.scale[j]
        });
        Dataset::new(features, ds.labels.clone(), ds.classes, ds.provenance)
    }
}

/// Writes a dense matrix as bare CSV: one row per line, no header.
pub fn write_matrix_csv(m: &Array2<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{}", m[[i, j]]).unwrap();
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a bare CSV matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    let mut ncols = None;
    let mut nrows = 0usize;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        nrows += 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match ncols {
            None => ncols = Some(cells.len()),
            Some(c) if c != cells.len() => {
                return Err(Error::Parse {
                    path: path.into(),
                    row: idx + 1,
                    column: "-".into(),
                    message: format!("expected {c} cells, got {}", cells.len()),
                });
            }
            _ => {}
        }
        for (j, cell) in cells.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                path: path.into(),
                row: idx + 1,
                column: format!("{j}"),
                message: format!("'{cell}' is not a number"),
            })?;
            values.push(v);
        }
    }
    let ncols = ncols.ok_or_else(|| Error::Parse {
        path: path.into(),
        row: 0,
        column: "-".into(),
        message: "matrix file is empty".into(),
    })?;
    Ok(Array2::from_shape_vec((nrows, ncols), values)
        .expect("row-major matrix buffer matches counted dimensions"))
}
