use thiserror::Error;

/// Errors raised by the allocation library.
///
/// Infeasible or unbounded linear programs are reported through
/// [`LpStatus`](crate::lp::LpStatus), not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in `{field}`: expected {expected}, found {found}")]
    DimensionMismatch {
        field: &'static str,
        expected: String,
        found: String,
    },

    #[error("invalid value in `{field}`: {reason}")]
    InvalidValue { field: &'static str, reason: String },

    #[error("instance has no frequency bins")]
    NoBins,

    #[error("simplex pivot limit of {0} reached")]
    IterationLimit(usize),

    #[error("numerically singular basis: {0}")]
    SingularBasis(String),

    #[error("linear program ended with status {0:?}")]
    Solver(crate::lp::LpStatus),

    #[error("invalid simulation config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim_mismatch(
    field: &'static str,
    expected: impl ToString,
    found: impl ToString,
) -> Error {
    Error::DimensionMismatch {
        field,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidValue {
        field,
        reason: reason.into(),
    }
}
