use thiserror::Error;

/// Errors raised by the exact engine, the Monte-Carlo oracle and the asymptotic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Enumerating the symmetric group of this order would exceed the configured cap.
    #[error("combinatorial blow-up: order {d} needs {size} permutations, cap is {cap}")]
    CapExceeded { d: usize, size: String, cap: usize },

    #[error("length mismatch: {what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("index {value} in {what} is outside 1..={bound}")]
    IndexOutOfRange {
        what: String,
        value: usize,
        bound: usize,
    },

    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A boson weight failed to collapse to a rational number.
    #[error("non-rational boson weight: {0}")]
    NonRational(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
