//! Harmonic maps into the solvable groups `G(μ₁, μ₂)` with respect to the neutral
//! connection, built by the loop-group (DPW) method, plus the numerical checks
//! that go with them.

pub mod dpw;
pub mod error;
pub mod gallery;
pub mod laurent;
pub mod liegroup;
pub mod loopfactor;
pub mod verify;

pub use error::{Error, Result};
