use thiserror::Error;

/// Errors raised by the arithmetic, lattice and evaluation layers.
///
/// The variants map one-to-one onto the process exit codes of the `dmf` binary.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A computation could not be resolved at the available precision.
    #[error("precision error: {0}")]
    Precision(String),
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured resource cap (degree bound, enumeration size) was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// Operands built over different field towers.
    #[error("field tower mismatch")]
    SpecMismatch,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precision(_) => 2,
            Error::Domain(_) | Error::SpecMismatch | Error::Unsupported(_) => 3,
            Error::Resource(_) => 4,
            Error::Parse(_) => 64,
        }
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
