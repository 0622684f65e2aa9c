use thiserror::Error;

/// Errors raised by the coverage engine, the simulator and the CLI front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("distance {d} m is outside the coverage disc (0, {radius}] m")]
    OutOfCoverage { d: f64, radius: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
