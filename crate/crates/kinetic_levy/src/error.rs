use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the domain where the quantity is defined (e.g. θ at k=0, B=0).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// λ and Ψ blow up at k = 0.
    #[error("singular point: {0}")]
    Singularity(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("root finder did not converge: {0}")]
    NonConvergence(String),
    #[error("root not bracketed: {0}")]
    Bracketing(String),
    #[error("trajectory does not cover the requested horizon: {0}")]
    InsufficientTrajectory(String),
    #[error("simulation budget exceeded: {0}")]
    Budget(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
