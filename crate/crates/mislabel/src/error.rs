use std::path::PathBuf;

/// Crate-wide error type.
///
/// Validation failures carry enough context to point at the offending
/// argument, file location, or pipeline stage without a debugger.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An index was outside the valid range for its container.
    #[error("{what} index {index} out of range (must be < {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    /// Two operands had incompatible dimensions.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A text file failed to parse; `row` is 1-based and counts data rows
    /// (the header is row 0).
    #[error("parse error in {path} at row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    /// A binary file did not match its expected layout.
    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    /// A linear system has no usable solution.
    #[error("degenerate system: {0}")]
    DegenerateSystem(String),

    /// A matrix that must be invertible is numerically singular.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// Iterative training produced a non-finite objective.
    #[error("training diverged at epoch {epoch}: objective is not finite")]
    Diverged { epoch: usize },

    /// An experiment config file contained unusable entries.
    #[error("config error: {0}")]
    Config(String),

    /// An error from a named experiment stage.
    #[error("stage '{stage}': {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Wraps an error with the experiment stage it came from.
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
