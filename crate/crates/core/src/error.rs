//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller handed us something that violates a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// CSV / cache parse failure with the offending location.
    #[error("parse error in {path} at data row {row}, column {column}: {message}")]
    Parse {
        path: String,
        row: usize,
        column: String,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A loss came out NaN or infinite; aborted rather than silently ordered.
    #[error("non-finite loss in fold {fold} at grid index {grid_index}")]
    NonFiniteLoss { fold: usize, grid_index: usize },

    /// A per-fold model fit failed; carries the fold index.
    #[error("learner failed on fold {fold}: {source}")]
    FoldFailure {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    /// A Monte Carlo repetition failed; the run aborts instead of dropping it.
    #[error("simulation rep {rep} failed: {source}")]
    RepFailure {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    /// Bootstrap resampling kept producing single-class samples.
    #[error("bootstrap replicate {replicate} drew a single-class sample {retries} times in a row")]
    DegenerateResample { replicate: usize, retries: usize },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for errors a caller caused (bad flags, bad file, bad config),
    /// as opposed to failures at run time. The CLI maps this to exit code 2.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Invalid(_) | Error::Parse { .. } => true,
            Error::FoldFailure { source, .. } | Error::RepFailure { source, .. } => {
                source.is_validation()
            }
            _ => false,
        }
    }
}
