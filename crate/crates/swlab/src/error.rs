use swlab_core::Error;

/// Failure of a CLI run, mapped onto the process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
    /// The power iteration ran out of steps.
    #[error("not converged after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("{failed} sweep runs failed")]
    SweepFailed { failed: usize, exit_code: i32 },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                Error::Validation(_) | Error::MissingFields(_) => EXIT_VALIDATION,
                Error::Numerical(_) | Error::Monotonicity { .. } | Error::InsufficientTimeRange { .. } => EXIT_NUMERICAL,
                Error::InvalidArgument(_) | Error::GridMismatch => EXIT_USAGE,
            },
            CliError::NotConverged { .. } => EXIT_NUMERICAL,
            CliError::SweepFailed { exit_code, .. } => *exit_code,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
