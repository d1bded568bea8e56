use thiserror::Error;

/// Every fallible operation in the crate returns this error.
///
/// `Precision` is kept apart from the other variants because callers (and
/// the command line tool) treat running out of p-adic digits or degree
/// headroom differently from malformed input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ring parameters: {0}")]
    InvalidRing(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("degree cap exceeded: {0}")]
    Cap(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("descent failure: {0}")]
    Descent(String),
    #[error("integrality failure at coefficient {index}: {detail}")]
    Integrality { index: usize, detail: String },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// True for failures caused by exhausted precision or caps.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::Precision(_) | Error::Cap(_) | Error::NoConvergence(_) | Error::Integrality { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
