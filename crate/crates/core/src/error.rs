use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("undefined for gamma = 0: {0}")]
    ZeroGamma(&'static str),
    #[error("endpoint mismatch: {0}")]
    Mismatch(String),
    #[error("truncation cap exceeded: {0}")]
    TruncationCap(String),
    /// An identity that must hold by construction failed; this is a bug in
    /// the engine, never a property of the input.
    #[error("internal identity failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
