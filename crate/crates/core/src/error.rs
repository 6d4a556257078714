//! Error type shared by the exact-arithmetic substrate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("polynomial is not squarefree modulo {0}")]
    NotSquarefree(u64),
    #[error("leading coefficient vanishes modulo {0}")]
    LeadingCoefficientVanishes(u64),
    #[error("period exceeds cap {0}")]
    PeriodCapExceeded(u64),
    #[error("matrix is singular modulo {0}")]
    SingularModP(u64),
    #[error("enclosure too wide for rational reconstruction")]
    WidthTooLarge,
    #[error("no rational with bounded denominator in enclosure")]
    NoRational,
    #[error("precision ceiling of {0} bits reached")]
    PrecisionCeiling(u32),
    #[error("roots could not be separated at {0} bits")]
    RootsNotSeparable(u32),
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("invalid input: {0}")]
    Invalid(String),
}
