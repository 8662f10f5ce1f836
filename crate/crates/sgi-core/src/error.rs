//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SgiError {
    /// Invalid configuration, geometry, or parameter set.
    #[error("config error: {0}")]
    Config(String),

    /// A probe point or trajectory left the region where the field model is
    /// defined (between the line charges, away from their singularities).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Argument outside the domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root search failed to bracket or converge.
    #[error("search failure: {0}")]
    SearchFailure(String),

    /// The propagation itself went numerically bad (norm drift, boundary
    /// contamination, non-finite amplitudes).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SgiError>;

impl SgiError {
    /// Process exit code the command-line front end maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            SgiError::Config(_) | SgiError::Geometry(_) => 2,
            _ => 3,
        }
    }
}
