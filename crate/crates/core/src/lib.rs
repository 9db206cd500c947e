//! Verification engine for the quantum group obtained by deforming the dual
//! Poisson-Lie group of the (extended) Heisenberg Lie bialgebra.
//!
//! The crate is organised bottom-up:
//!
//! * [`groups`]: model parameters, the four group laws, `eta` and `beta`.
//! * [`lie`]: exact tensor algebra over the Lie algebras, the classical
//!   r-matrix, cocycles and the Poisson bracket.
//! * [`expr`]: the coordinate-expression language shared by operators.
//! * [`ops`]: substitution/phase operators, the Gaussian slice engine and
//!   every named operator builder.
//! * [`algebra`]: grid realisation of the deformed function algebra.
//! * [`suites`]: cross-module verification suites and their reports.

pub mod algebra;
pub mod error;
pub mod expr;
pub mod groups;
pub mod lie;
pub mod ops;
pub mod rng;
pub mod suites;

pub use error::{Error, Result};
pub use groups::ModelParams;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// `e(t) = exp(2πi t)`.
#[inline]
pub fn e(t: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
}

/// `ē(t) = exp(-2πi t)`.
#[inline]
pub fn ebar(t: f64) -> C64 {
    C64::from_polar(1.0, -2.0 * std::f64::consts::PI * t)
}
