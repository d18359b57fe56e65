use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Returned when an operation would create a tensor with more stored
    /// entries than the configured cap allows.
    #[error("tensor size limit exceeded: {requested} entries > cap of {cap}")]
    SizeLimit { requested: u128, cap: usize },

    /// Returned on malformed or mismatched factor shapes.
    #[error("shape error: {0}")]
    Shape(String),

    /// Returned when a factor position or basis label is out of range.
    #[error("index error: {0}")]
    Index(String),

    /// Returned when the Jacobi eigensolver fails to reach its off-diagonal
    /// threshold within the sweep cap.
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    /// Returned when a caller-checked precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Returned when an enumeration request is too large to run.
    #[error("enumeration bounds exceeded: {0}")]
    Bounds(String),

    /// Returned when a stored amplitude is NaN or infinite.
    #[error("non-finite amplitude at flat index {0}")]
    NonFinite(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
