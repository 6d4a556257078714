//! Exit codes and the error type carrying them.

use std::fmt;

use transdeg::ModelError;

/// Stable process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Validation = 1,
    CrossCheck = 2,
    Refuted = 3,
    Inconclusive = 4,
    Precision = 5,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }

    /// The more severe of two outcomes, refutation ranking above inconclusive.
    pub fn worst(self, other: Exit) -> Exit {
        let rank = |e: Exit| match e {
            Exit::Ok => 0,
            Exit::Inconclusive => 1,
            Exit::Refuted => 2,
            Exit::Precision => 3,
            Exit::CrossCheck => 4,
            Exit::Validation => 5,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn new(exit: Exit, message: impl Into<String>) -> Self {
        CliError { exit, message: message.into() }
    }

    pub fn io(e: std::io::Error) -> Self {
        CliError::new(Exit::Validation, format!("output: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Exit code for a pipeline error.
pub fn exit_for(e: &ModelError) -> Exit {
    match e {
        ModelError::DimensionTooSmall(_)
        | ModelError::NotSl(_)
        | ModelError::Precondition(_)
        | ModelError::NotSquarefree
        | ModelError::LeadingPairAmbiguous
        | ModelError::Core(_) => Exit::Validation,
        ModelError::RecursionMismatch(_) => Exit::CrossCheck,
        ModelError::PrecisionCeiling(_)
        | ModelError::RootsNotSeparable(_)
        | ModelError::OnBreakpoint
        | ModelError::CircleStraddle
        | ModelError::DenominatorNearZero => Exit::Precision,
        ModelError::NoRootInRange
        | ModelError::DivergentTail
        | ModelError::SearchExhausted(_)
        | ModelError::ComponentCollapse
        | ModelError::BudgetExhausted(_) => Exit::Inconclusive,
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::new(exit_for(&e), e.to_string())
    }
}
