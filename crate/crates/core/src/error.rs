use thiserror::Error;

/// Errors surfaced by the environment suite.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of an operation (zero bound, bad action index).
    #[error("domain error: {0}")]
    Domain(String),

    /// Fixed-point overflow. Arithmetic never wraps silently.
    #[error("arithmetic overflow in {0}")]
    Arithmetic(&'static str),

    /// Invalid environment configuration or parameter table.
    #[error("config error: {0}")]
    Config(String),

    /// Level generation exhausted its retry budget.
    #[error("generation fault: {0}")]
    Generation(String),

    /// API misuse, e.g. stepping a finished episode.
    #[error("usage error: {0}")]
    Usage(String),

    /// A replayed trajectory diverged from its recording.
    #[error("determinism violation at step {step}: {detail}")]
    DeterminismViolation { step: u64, detail: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit status / foreign-interface return code for this error.
    pub fn code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::DeterminismViolation { .. } => 3,
            Error::Generation(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
