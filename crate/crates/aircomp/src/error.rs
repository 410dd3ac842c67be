//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (dimension mismatch, non-finite
    /// entries, invalid parameter values).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A decoding vector is orthogonal to some effective channel, so the
    /// normalizing factor vanishes and the MSE is undefined.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// The homogenizing entry of a lifted phase vector is too small to
    /// divide by.
    #[error("phase recovery failed: {0}")]
    PhaseRecovery(String),

    /// A convex subproblem solve failed in a way the caller cannot recover
    /// from (numerical breakdown, suspected infeasibility of a problem that
    /// must be feasible).
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// Experiment configuration rejected during validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
