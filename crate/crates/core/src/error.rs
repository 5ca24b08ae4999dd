use std::path::PathBuf;

/// Errors produced by the MSSAL library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Vectors, matrices or datasets with incompatible shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix decomposition (Cholesky, SVD, eigen) failed.
    #[error("matrix decomposition failed: {0}")]
    Decomposition(String),

    /// Malformed CSV input.
    #[error("parse error at row {row}, column {column:?}: {detail}")]
    Parse {
        row: usize,
        column: String,
        detail: String,
    },

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Bad user-supplied configuration or arguments.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two label vectors of different lengths were compared.
    #[error("label length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A single EM start failed; carries the reason.
    #[error("EM start failed: {0}")]
    StartFailed(String),

    /// Every random start of an EM fit failed.
    #[error("all {starts} starts failed for G={g}; last failure: {reason}")]
    AllStartsFailed {
        g: usize,
        starts: usize,
        reason: String,
    },

    /// Model selection found no converged fit in the requested range.
    #[error("no converged fit for G in {g_min}..={g_max}")]
    NoConvergedModel { g_min: usize, g_max: usize },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// True for failures caused by the input or environment rather than the
    /// model fitting itself.
    pub fn is_usage_or_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::InvalidArgument(_)
                | Error::Dimension(_)
                | Error::LengthMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
