use thiserror::Error;

/// Errors raised by the library.
///
/// Verification failures that are part of a report (a symmetry check that
/// exceeds tolerance, an identity that does not balance) are *not* errors;
/// they are carried in the report. Errors are reserved for inputs that cannot
/// be processed at all.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input is malformed: wrong shape, duplicate labels, index out of range.
    #[error("structural error: {0}")]
    Structural(String),

    /// Numerical data does not behave like modular data (rounding residue too
    /// large, negative fusion coefficient, complex quantum dimension, ...).
    #[error("not modular data: {0}")]
    NotModularData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A cocycle table that violates the 2-cocycle identity, with the first
    /// failing triple.
    #[error("not a 2-cocycle: identity fails at ({0}, {1}, {2})")]
    NotACocycle(usize, usize, usize),

    #[error("a character table for the central extension is required: {0}")]
    NeedsCharacterTable(String),

    #[error("bad character table: {0}")]
    BadCharacterTable(String),

    #[error("invalid orbifold descriptor: {0}")]
    InvalidDescriptor(String),

    /// A label claimed to be a simple current does not have root-of-unity
    /// S-matrix ratios.
    #[error("inconsistent simple current {label}: {detail}")]
    SimpleCurrent { label: String, detail: String },

    #[error("model is not rational: {0}")]
    NotRational(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),
}

pub type Result<T> = std::result::Result<T, Error>;
