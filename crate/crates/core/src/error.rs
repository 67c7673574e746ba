use thiserror::Error;

use crate::state::StateViolation;

/// Errors raised by the numerical kernels and post-processing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A pressure, entropy or Jacobian evaluation was requested at `rho <= 0`.
    #[error("density {rho} is outside the admissible domain rho > 0")]
    Domain { rho: f64 },

    #[error(transparent)]
    State(#[from] StateViolation),

    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("snapshot schedules differ: {0}")]
    ScheduleMismatch(String),

    #[error("degenerate rate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
