use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain (negative argument, NaN, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Tabulated function queried outside its table.
    #[error("range error: {0}")]
    Range(String),
    /// An iterative method failed to bracket or converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Malformed or inconsistent arguments.
    #[error("argument error: {0}")]
    Argument(String),
    /// A hypothesis could not be certified on the evaluation grid, so the
    /// conclusion depending on it is not claimed.
    #[error("precondition not certified: {0}")]
    PreconditionNotCertified(String),
    /// Expression parse failure.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
