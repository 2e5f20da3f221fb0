use thiserror::Error;

/// Errors raised across the symbolic and numeric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("jet order overflow: {0}")]
    OrderOverflow(String),

    #[error("missing value for coordinate {0}")]
    MissingCoordinate(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("degenerate Legendre transformation: {0}")]
    Degenerate(String),

    #[error("unsupported symbolic operation: {0}")]
    UnsupportedSymbolic(String),

    #[error("form is not closed: {0}")]
    NotClosed(String),

    #[error("Newton iteration did not converge: {0}")]
    NewtonFailed(String),

    #[error("section is incompatible with the slope field: {0}")]
    Incompatible(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
