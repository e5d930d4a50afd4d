use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("non-finite value in {context} at cell {cell}")]
    NonFinite { context: &'static str, cell: usize },

    #[error("positivity violated at cell {cell}: rho={rho}, p={pressure}")]
    Positivity { cell: usize, rho: f64, pressure: f64 },

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    TrainingDiverged { epoch: usize },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that come from the numerics rather than from the
    /// caller's configuration or from I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. } | Error::Positivity { .. } | Error::TrainingDiverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
