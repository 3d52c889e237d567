//! Error types shared across the crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, CoreError>;

/// Errors raised by network constructors and operations.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Matrix/shift/width shapes do not line up.
    Shape { context: &'static str, expected: usize, got: usize },
    /// Two networks cannot be combined (width or depth mismatch).
    Incompatible { context: &'static str, detail: String },
    /// A numeric argument is outside the operation's domain.
    InvalidArgument { context: &'static str, detail: String },
    /// JSON parse failure, with the location reported by the parser.
    Parse { line: usize, column: usize, detail: String },
    /// Strict deserialization rejected a structurally valid but
    /// class-violating network.
    Validation { detail: String },
    /// The requested construction is not provided by this crate.
    Unsupported { context: &'static str, detail: String },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Shape { context, expected, got } => {
                write!(f, "{context}: expected dimension {expected}, got {got}")
            }
            CoreError::Incompatible { context, detail } => {
                write!(f, "{context}: {detail}")
            }
            CoreError::InvalidArgument { context, detail } => {
                write!(f, "invalid argument in {context}: {detail}")
            }
            CoreError::Parse { line, column, detail } => {
                write!(f, "parse error at line {line}, column {column}: {detail}")
            }
            CoreError::Validation { detail } => {
                write!(f, "validation failed: {detail}")
            }
            CoreError::Unsupported { context, detail } => {
                write!(f, "{context}: {detail}")
            }
        }
    }
}

impl core::error::Error for CoreError {}

pub(crate) fn invalid(context: &'static str, detail: impl fmt::Display) -> CoreError {
    CoreError::InvalidArgument { context, detail: alloc::format!("{detail}") }
}

pub(crate) fn incompatible(context: &'static str, detail: impl fmt::Display) -> CoreError {
    CoreError::Incompatible { context, detail: alloc::format!("{detail}") }
}
