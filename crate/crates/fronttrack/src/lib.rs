//! Exact front-tracking solver for scalar conservation laws on a half-line or
//! segment, with boundary data, time-dependent polynomial fluxes, and a
//! verification suite for the solver's a-priori estimates.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod flux;
pub mod interval;
pub mod nonaut;
pub mod riemann;
pub mod stepfn;
pub mod tracker;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use flux::{IndexHull, PlcFlux, SpaceTimeFlux};
pub use interval::Interval;
pub use stepfn::{GridStepFunction, Side, StepFunction};
pub use tracker::{
    Domain, EventRecord, Front, PreparedProblem, Problem, SlabSolution, Solution, Tracker,
};
pub use verify::{
    bound_report, boundary_admissibility, contraction_check, entropy_residual,
    flux_stability_check, verify_solution, BoundReport, BumpTestFunction, SemiEntropyPair,
    VerifyOptions, VerifyReport,
};
