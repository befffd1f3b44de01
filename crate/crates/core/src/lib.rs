//! Lagrangian lower bounds for the discrete cost multicommodity network
//! design problem.
//!
//! The capacity-linking constraints of the arc-path model are dualized with
//! one nonnegative multiplier per edge. The resulting dual function splits
//! into a facility selection problem (strengthened with terminal-cover
//! cuts) and an all-pairs shortest path routing problem. The dual is
//! maximized with deflected subgradient ascent, with six direction rules and
//! six step-length schedules to choose from.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command line live in the `dcmndp` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dual;
pub mod engine;
pub mod facility_selection;
pub mod fixtures;
pub mod generator;
pub mod instance;
pub mod oracle;
pub mod shortest_paths;
mod vecops;

pub use dual::{evaluate_dual, DualEvaluation, MultiplierVector};
pub use engine::{
    run, run_timed, Clock, DirectionRule, IterationRecord, R1Reference, Rule, SolverConfig,
    SolverError, SolverReport, StepRule, StopReason, Variant,
};
pub use generator::{generate_random, GeneratorError, GeneratorParams};
pub use instance::{Commodity, Edge, FacilityOption, Instance, TerminalSet, Violation};
pub use shortest_paths::{all_pairs_shortest_paths, ShortestPathTable};
