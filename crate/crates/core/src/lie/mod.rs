//! Exact Lie-algebraic layer.

pub mod bialgebra;
pub mod poisson;
pub mod poly;
pub mod tensor;

pub use bialgebra::*;
pub use poisson::{jacobi_defect, poisson_bracket, BracketFunctional, Gradient, SmoothFunctional};
pub use poly::{rat, LambdaPoly};
pub use tensor::{ad_action, bracket, cybe_defect, AlgebraJson, LieAlgebraSpec, LieTensor, TensorJson};
