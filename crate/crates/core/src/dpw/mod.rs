//! Loop-group construction of neutral-connection harmonic maps into `G(μ₁, μ₂)`:
//! normalized potential → holomorphic frame → Iwasawa splitting → extended solution.

mod closed_form;
mod pipeline;
mod poly;
pub mod quad;
mod step1;
mod torsion_free;

pub use closed_form::{
    closed_form_map, extract_normalized_potential, ClosedFormMap, ExtractionOptions, PolarizedMap,
};
pub use pipeline::{
    associated_point, default_lambdas, step2_iwasawa, step3_extended, synthesize, trimmed, Domain,
    ExtendedFrame, GridSpec, LambdaSlice, MapGrid, Synthesis, SynthesisOptions, SynthesisReport,
};
pub use poly::{HoloPoly, MAX_DEGREE};
pub use step1::{
    integrate_xi, ode_oracle, solve_step1, solve_step1_adaptive, PotentialSpec, Step1Kernel,
    STEP1_MAX_BAND, TAIL_TOL,
};
pub use torsion_free::{commutator_defect, torsion_free_map};
