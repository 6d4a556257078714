//! Degree sequences, first dynamical degrees and hypothesis certificates for
//! birational maps `f = g o h_A`, where `h_A` is the monomial map of an
//! integer matrix and `g` is a Cremona involution conjugated by a sign matrix.

pub mod certifier;
pub mod degree;
pub mod dioph;
pub mod error;
pub mod factory;
pub mod fpoly;
pub mod oracle;
pub mod solver;
pub mod spectral;
pub mod toric;

pub use error::{ModelError, Result};
