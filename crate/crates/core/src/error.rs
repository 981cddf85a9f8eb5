use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("graphs are not aligned: {0}")]
    Unaligned(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

macro_rules! mismatch {
    ($($arg:tt)*) => {
        $crate::Error::DimensionMismatch(alloc::format!($($arg)*))
    };
}

pub(crate) use {invalid, mismatch};
