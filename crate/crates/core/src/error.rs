use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto its exit-code contract: domain/dimension/input
/// errors are caller mistakes (exit 2), `ResourceCap` asks for the Monte
/// Carlo path (exit 3), and `Contract` marks a violated hypothesis such as
/// V ≤ G (exit 4).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {d}: {why}")]
    UnsupportedDimension { d: usize, why: &'static str },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
