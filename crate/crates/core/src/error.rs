use thiserror::Error;

/// Errors surfaced by the construction and certification layers.
///
/// Mathematical check failures are not errors: the verification routines
/// report those as entries in a [`crate::verify::VerificationReport`].
/// An `Invariant` error means an identity that the construction guarantees
/// was violated, which signals an implementation bug rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invariant violated in {check}: {witness}")]
    Invariant { check: String, witness: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invariant(check: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::Invariant {
            check: check.into(),
            witness: witness.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
