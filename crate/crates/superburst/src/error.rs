//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site index {index} out of range for lattice with {n} sites")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("model incompatible with lattice: {0}")]
    Incompatible(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("eigensolver failed to converge")]
    EigenFailure,

    #[error("numerical inconsistency: {0}")]
    Inconsistency(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("time grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("matrix is not positive semidefinite: {0}")]
    NotPhysical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
