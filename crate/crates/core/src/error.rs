use thiserror::Error;

/// Errors surfaced by the pricing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model or configuration parameters violate a hard invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An iterative scheme exhausted its budget before reaching tolerance.
    #[error("failed to converge: {0}")]
    NonConvergence(String),

    /// A mixture-component index past the truncation point.
    #[error("component index {index} out of range (n_max = {n_max})")]
    IndexOutOfRange { index: usize, n_max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
