use thiserror::Error;

/// Errors raised by the geometry kernel, the samplers and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated an operation's precondition (bad dimension, non-unit vector, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A value drifted off the hyperboloid or overflowed the working range.
    #[error("numeric integrity error: {0}")]
    NumericIntegrity(String),

    /// The input has no well-defined answer (coincident points, empty sets).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The rejection sampler ran out of attempts. With zero successes the
    /// reported rate is the 95% upper bound `3 / attempts`.
    #[error("feasibility error: no self-avoiding walk after {attempts} attempts (acceptance rate below {acceptance_rate:.3e} at 95% confidence)")]
    Feasibility { attempts: u64, acceptance_rate: f64 },

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for the error family.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::NumericIntegrity(_) => "numeric",
            Error::Degenerate(_) => "degenerate",
            Error::Feasibility { .. } => "feasibility",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
