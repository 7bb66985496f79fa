use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("quadrature did not reach tolerance {abs_tol:e} within {intervals} intervals (error estimate {err_estimate:e})")]
    NoConvergence {
        abs_tol: f64,
        err_estimate: f64,
        intervals: usize,
    },

    #[error("bad partition: {0}")]
    BadPartition(String),

    #[error("no sign change of the bracketing function on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("sign indeterminate at x = {x}: |h(x)| = {value:e} is below the resolution threshold")]
    Indeterminate { x: f64, value: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
