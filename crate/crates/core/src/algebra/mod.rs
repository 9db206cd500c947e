//! Grid realisation of the deformed function algebra.

pub mod closed_form;
pub mod fourier;
pub mod grid;
pub mod limits;
pub mod product;

pub use closed_form::{Bump, ClosedFormFunction, GaussFactor, Monomial, Point8, TwoLegFunction};
pub use fourier::{fourier, inverse_fourier, vee, wedge};
pub use grid::{Axis, Grid, Picture, SampledFunction};
pub use product::{
    antipode, antipode_closed, counit, dagger, dagger_closed, deformed_mul, deformed_mul_direct, deformed_mul_oracle, haar,
    involution, twisted_conv, twisted_conv_direct, twisted_conv_fft, AntipodeOutput, CounitValue,
};
pub use limits::{
    psi_transform, r_classical_commutator, r_classical_commutator_oracle, r_classical_limit_defect, r_classical_limit_defects,
    semiclassical_defect, LimitDefect, MonteCarlo, OracleResolution,
};
