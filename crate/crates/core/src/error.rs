use thiserror::Error;

/// Errors raised by parameter validation, special functions and statistics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is negative")]
    NegativeShare { name: &'static str, value: f64 },

    #[error("alpha + beta = {0} lies outside the parameter triangle (must be <= 1)")]
    Triangle(f64),

    #[error("shape parameter m must be positive and finite, got {0}")]
    NonPositiveShape(f64),

    #[error("mean SNR must be positive and finite, got {0}")]
    NonPositiveMeanSnr(f64),

    #[error("closed form requires integer m, got {0}")]
    NonIntegerShape(f64),

    #[error("{0}")]
    Domain(String),

    #[error("{what} did not converge (last relative change {rel_change:.3e})")]
    Convergence { what: &'static str, rel_change: f64 },

    #[error("{0} overflows f64; request the log-scaled value instead")]
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by invalid inputs rather than numerical failure.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Convergence { .. } | Error::Overflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
