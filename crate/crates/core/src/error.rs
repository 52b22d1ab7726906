use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its documented domain.
    #[error("{0}")]
    Domain(String),

    /// A matrix failed a structural precondition (shape, symmetry, finiteness).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// The requested computation exceeds what the selected path supports.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A grid or record that must be non-empty was empty.
    #[error("empty input: {0}")]
    Empty(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
