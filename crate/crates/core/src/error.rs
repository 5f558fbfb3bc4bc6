use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing parameters: {}", .0.join(", "))]
    MissingFields(Vec<&'static str>),
    #[error("parameter conditions violated: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("time range too short: estimated truncation error {estimated_tail:e}")]
    InsufficientTimeRange { estimated_tail: f64 },
    #[error("power iteration lost monotonicity at step {step}: {previous} -> {current}")]
    Monotonicity {
        step: usize,
        previous: f64,
        current: f64,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// Non-fatal diagnostics attached to numerical results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Boundary nodes carry more than `1e-6` of a norm integral.
    BoundaryDominated { fraction: f64 },
    /// A dilation pushed mass off the grid (or pulled zeros in).
    DroppedMass { fraction: f64 },
    /// A supremum over time was attained at an end of the time grid.
    EndpointSupremum { t: f64 },
    /// Part of a Riesz potential comes from beyond `r_max`.
    TailBeyondGrid { fraction: f64 },
    /// Negative noise in an iterate was clipped to zero.
    SignClipped { magnitude: f64 },
    /// A heat decay report was requested for the zero function.
    ZeroInput,
}
