use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("exponent overflow: {0}")]
    Overflow(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported equation: {0}")]
    Unsupported(String),
    #[error("zero operator")]
    ZeroOperator,
    #[error("trailing coefficient l_0 is zero")]
    ZeroTrailingCoefficient,
    #[error("radix mismatch: {0} vs {1}")]
    RadixMismatch(u64, u64),
    #[error("inexact division")]
    InexactDivision,
    #[error("negative exponent after transform")]
    NegativeExponent,
    #[error("no admissible edge with slope in (1/{0})Z")]
    NoAdmissibleEdge(u64),
    #[error("prescribed support is degenerate: {0} zero diagonal entries, order {1}")]
    TooManyZeroDiagonals(usize, usize),
    #[error("prefix does not extend to a solution")]
    IncompatiblePrefix,
    #[error("prefix too short: need {need}, got {got}")]
    InsufficientPrefix { need: usize, got: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Malformed(_)
            | Error::InvalidArgument(_)
            | Error::IncompatiblePrefix
            | Error::InsufficientPrefix { .. } => 2,
            Error::Unsupported(_)
            | Error::ZeroOperator
            | Error::ZeroTrailingCoefficient
            | Error::RadixMismatch(..)
            | Error::NegativeExponent
            | Error::NoAdmissibleEdge(_) => 3,
            Error::Overflow(_) => 4,
            Error::InexactDivision | Error::TooManyZeroDiagonals(..) | Error::Invariant(_) => 5,
        }
    }

    /// Short machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Overflow(_) => "overflow",
            Error::Malformed(_) => "malformed_input",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Unsupported(_) => "unsupported",
            Error::ZeroOperator => "zero_operator",
            Error::ZeroTrailingCoefficient => "zero_trailing_coefficient",
            Error::RadixMismatch(..) => "radix_mismatch",
            Error::InexactDivision => "inexact_division",
            Error::NegativeExponent => "negative_exponent",
            Error::NoAdmissibleEdge(_) => "no_admissible_edge",
            Error::TooManyZeroDiagonals(..) => "degenerate_support",
            Error::IncompatiblePrefix => "incompatible_prefix",
            Error::InsufficientPrefix { .. } => "insufficient_prefix",
            Error::Invariant(_) => "invariant_violation",
        }
    }
}

pub(crate) fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

/// `base^exp` with overflow reported as an error.
pub fn checked_pow(base: u64, exp: u64) -> Result<u64> {
    let e = u32::try_from(exp).map_err(|_| overflow("power"))?;
    base.checked_pow(e).ok_or_else(|| overflow("power"))
}
