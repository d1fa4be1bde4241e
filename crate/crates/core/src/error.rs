use thiserror::Error;

/// Errors produced by the simulation and fitting routines.
#[derive(Debug, Error)]
pub enum PtError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// The Liouvillian eigenbasis is degenerate at the exceptional point;
    /// spectral propagation is unavailable there.
    #[error("exceptional-point degeneracy: {0}")]
    EpDegenerate(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("phase error: {0}")]
    PhaseError(String),

    #[error("non-identifiable fit: {0}")]
    NonIdentifiable(String),

    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, PtError>;
