//! Operator calculus on the Hilbert-space pictures.

pub mod affine;
pub mod builders;
pub mod checks;
pub mod gaussian;

pub use affine::{equal_randomized, AffinePhaseOp, EqualityReport, LegKind, LegSignature};
pub use gaussian::{GaussianSliceVector, QuadraticFourierOp, SliceParams};
pub use builders::{AnyOp, OpChain};
