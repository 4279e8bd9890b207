//! Probability engine for the number of sessions a solitary student
//! understands in an `n`-session course when each session's outcome shifts
//! the comprehension threshold of the next one.
//!
//! The engine offers several routes to the same quantities so they can be
//! checked against each other:
//!
//! * [`chain`]: the exact law of `B_n` by dynamic programming over the
//!   number of sessions understood so far, plus an exhaustive path oracle.
//! * [`mixture`]: per-session marginals through the recursively mixed
//!   distributions `F_j`, their telescoped explicit form, and the closed
//!   forms available for a uniform `F`.
//! * [`asymptotic`]: the binomial reference law and convergence diagnostics.
//! * [`montecarlo`]: seeded, order-independent path simulation.

pub mod asymptotic;
pub mod chain;
pub mod dist;
pub mod mixture;
pub mod montecarlo;
pub mod pmf;

pub use asymptotic::{
    binomial_pmf, convergence_study, ratio_profile, ConvergenceReport, ConvergenceRow,
    EpsSchedule, RatioProfile,
};
pub use chain::{
    Model, ModelParams, OutcomePath, TransitionRow, ValidationMode, ValidationReport, Violation,
    BRUTE_FORCE_MAX_N,
};
pub use dist::{CdfTable, InitialDistribution};
pub use mixture::MixtureLattice;
pub use montecarlo::{sample_paths, tv_distance, SimulationResult};
pub use pmf::Pmf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid model parameters: {0}")]
    Validation(ValidationReport),

    #[error("exhaustive enumeration refused for n = {n}: budget is n <= {max}")]
    Budget { n: usize, max: usize },

    #[error("{0} requires the uniform(0,1) initial distribution")]
    NonUniform(&'static str),
}
