use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("solver did not converge: {msg} (last residual {residual:e})")]
    Solver { msg: String, residual: f64 },
    #[error("certification failed: found {found} of {expected} roots (max digits {digits})")]
    Certification {
        found: usize,
        expected: usize,
        digits: u32,
    },
    #[error("pole: {0}")]
    Pole(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
