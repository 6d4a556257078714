//! Exact and certified arithmetic substrate.
//!
//! Arbitrary-precision integer matrices, univariate polynomials over the
//! integers, the rationals and prime fields, and outward-rounded interval
//! arithmetic over dyadic numbers for real and complex enclosures.

pub mod complex;
pub mod dyadic;
pub mod error;
pub mod interval;
pub mod matrix;
pub mod modp;
pub mod poly;
pub mod primes;
pub mod reconstruct;
pub mod roots;
pub mod transcendental;

pub use complex::ComplexInterval;
pub use dyadic::{Dyadic, Rounding};
pub use error::CoreError;
pub use interval::Interval;
pub use matrix::IntegerMatrix;
pub use modp::{ModPMatrix, ModPoly};
pub use poly::{IntPolynomial, RatPolynomial};

/// Default ceiling, in bits, for precision escalation loops.
pub const DEFAULT_PRECISION_CEILING: u32 = 4096;

/// Environment variable overriding [`DEFAULT_PRECISION_CEILING`].
pub const PRECISION_CEILING_ENV: &str = "TRANSDEG_PRECISION_CEILING";

/// Returns the precision ceiling, honouring the environment override.
pub fn precision_ceiling() -> u32 {
    std::env::var(PRECISION_CEILING_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .filter(|&b| b >= 64)
        .unwrap_or(DEFAULT_PRECISION_CEILING)
}
