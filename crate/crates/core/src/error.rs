use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("ambient dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("enumeration of {count} candidates exceeds cap {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("invalid local dimension {0} (must be at least 2)")]
    InvalidFactor(usize),

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator bound violated: spectrum [{min:.3e}, {max:.3e}] outside [0, 1]")]
    NotEffect { min: f64, max: f64 },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid strategy ({invariant}): {detail}")]
    InvalidStrategy { invariant: &'static str, detail: String },

    #[error("{path}: {message}")]
    Input { path: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for the errors that signal a configured size cap was hit.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::DimensionCap { .. } | Error::EnumerationCap { .. })
    }

    pub(crate) fn input(path: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Error::Input {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
