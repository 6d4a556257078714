//! Error type shared by the model modules.

use thiserror::Error;
use transdeg_core::CoreError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("dimension {0} is too small (need at least 3)")]
    DimensionTooSmall(usize),
    #[error("matrix is not in SL_d(Z): determinant {0}")]
    NotSl(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("measure evolution and recursion disagree at n = {0}")]
    RecursionMismatch(usize),
    #[error("series has no root below the radius of convergence")]
    NoRootInRange,
    #[error("evaluation point lies outside the disc of convergence of the tail bound")]
    DivergentTail,
    #[error("precision ceiling of {0} bits reached")]
    PrecisionCeiling(u32),
    #[error("roots could not be separated at {0} bits")]
    RootsNotSeparable(u32),
    #[error("leading eigenvalue pair could not be identified")]
    LeadingPairAmbiguous,
    #[error("characteristic polynomial is not squarefree")]
    NotSquarefree,
    #[error("denominator enclosure contains zero")]
    DenominatorNearZero,
    #[error("evaluation point lies on a breakpoint")]
    OnBreakpoint,
    #[error("root enclosure straddles the unit circle")]
    CircleStraddle,
    #[error("search exhausted at stage: {0}")]
    SearchExhausted(String),
    #[error("curve components collapsed")]
    ComponentCollapse,
    #[error("degree budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error(transparent)]
    Core(CoreError),
}

impl From<CoreError> for ModelError {
    /// Maps precision-type core failures onto the model-level variants.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::PrecisionCeiling(b) => ModelError::PrecisionCeiling(b),
            CoreError::RootsNotSeparable(b) => ModelError::RootsNotSeparable(b),
            other => ModelError::Core(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, ModelError>;
