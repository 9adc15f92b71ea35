//! Lie groups, their algebras and left-invariant connections.

mod algebra;
mod expm;
mod groups;
mod solv;

pub use algebra::{
    family_mu, levi_civita, neutral, ConnectionTensor, LieAlgebraData, MetricTensor, Scalar,
    JACOBI_TOL,
};
pub use expm::{expm1_over_x, matrix_exp3};
pub use groups::Group;
pub use solv::{
    solv_inv, solv_inv_c, solv_mul, solv_mul_c, SolvLoopElement, SolvParams, SolvPoint,
};
