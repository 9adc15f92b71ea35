use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponential series did not converge after {terms} terms (last term mass {mass:.3e})")]
    NonConvergent { terms: usize, mass: f64 },

    #[error("evaluation at lambda = 0 is undefined for Laurent loops")]
    ZeroArgument,

    #[error("group parameters differ: ({a1}, {a2}) vs ({b1}, {b2})")]
    ParamMismatch { a1: f64, a2: f64, b1: f64, b2: f64 },

    #[error("metric is singular (|det| = {det:.3e})")]
    SingularMetric { det: f64 },

    #[error("structure constants violate {which} (residual {residual:.3e})")]
    NotALieAlgebra { which: &'static str, residual: f64 },

    #[error("band overflow in {context}: tail mass {mass:.3e} exceeds {tol:.1e} at band {band}")]
    BandOverflow {
        context: &'static str,
        mass: f64,
        tol: f64,
        band: usize,
    },

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("grid {nx}x{ny} is too small; finite-difference stencils need at least 5x5")]
    GridTooSmall { nx: usize, ny: usize },

    #[error("[Phi, conj(Phi)] does not vanish (residual {residual:.3e})")]
    NonCommuting { residual: f64 },

    #[error("evaluation point lies {distance:.3e} from the domain edge, closer than 2h = {limit:.3e}")]
    SingularityTooClose { distance: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
