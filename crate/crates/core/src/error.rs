use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = MomabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MomabError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("arm {arm} out of range for an instance with {n} arms")]
    ArmOutOfRange { arm: usize, n: usize },

    #[error("value {value} at arm {arm}, objective {dim} is outside [0, 1]")]
    MeanOutOfRange { arm: usize, dim: usize, value: f64 },

    #[error("ragged means matrix: row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, got: usize },

    #[error("negative dominance shift {0}")]
    NegativeShift(f64),

    #[error(
        "horizon T={horizon} too small for {arms} arms: exploration length {t_prime} is not below T"
    )]
    HorizonTooSmall { horizon: u64, arms: usize, t_prime: u64 },

    #[error(
        "exact set cover refused: universe of {size} arms exceeds the limit of {limit}; use greedy mode or raise the limit"
    )]
    ExactLimitExceeded { size: usize, limit: usize },

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl MomabError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            MomabError::ExactLimitExceeded { .. } => 3,
            MomabError::Io { .. } => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MomabError::Io {
            path: path.into(),
            source,
        }
    }
}
