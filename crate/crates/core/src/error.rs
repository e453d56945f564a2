//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Tensor shapes do not line up for the requested operation.
    #[error("{op}: dimension mismatch: {detail}")]
    Dimension { op: &'static str, detail: String },

    /// Invalid hyperparameter or configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// All-zero weights where a magnitude scale is required.
    #[error("degenerate weights: avg(|W|) is zero")]
    DegenerateWeights,

    /// Batch statistics cannot be computed from a single sample.
    #[error("degenerate batch: batchnorm in training mode requires batch size >= 2, got {0}")]
    DegenerateBatch(usize),

    /// Bad input data (labels out of range, sample/label count mismatch, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A value cannot be encoded in the requested packed representation.
    #[error("encoding error: {0}")]
    Encoding(String),

    /// A serialized file is malformed; `section` names where parsing failed.
    #[error("format error in section '{section}': {detail}")]
    Format { section: &'static str, detail: String },

    /// An artifact was applied to a backbone it was not trained against.
    #[error("binding error: artifact bound to backbone {expected}, got {found}")]
    Binding { expected: String, found: String },

    /// Training diverged (non-finite loss).
    #[error("training diverged at epoch {epoch}: {detail}")]
    Training { epoch: usize, detail: String },

    /// Invalid task-suite specification.
    #[error("suite spec error: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn format(section: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            section,
            detail: detail.into(),
        }
    }
}
