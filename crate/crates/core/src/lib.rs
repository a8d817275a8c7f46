//! Rate-aware user association and RF-chain allocation for dense mmWave
//! networks.
//!
//! Every RF chain at a base station (BS) or user equipment (UE) is an
//! assignable resource. Association happens in two steps:
//!
//! 1. Maximize the number of UEs whose rate requirement is met, using as few
//!    BS RF chains as possible ([`step1`]). Solved exactly by branch and bound
//!    or approximately by LP relaxation followed by greedy rounding.
//! 2. Hand the remaining BS RF chains to the UEs left out of step 1 so the
//!    network sum rate is maximal ([`step2flow`]), via a min-cost-flow
//!    reduction that always yields integral assignments.
//!
//! [`model`] synthesizes scenarios and link capacities, [`baselines`] holds
//! the max-sum-rate and max-SNR comparison schemes, and [`harness`] runs
//! seeded Monte Carlo sweeps over all of them.

pub mod baselines;
pub mod error;
pub mod harness;
pub mod instance;
pub mod lp;
pub mod matrix;
pub mod model;
pub mod rng;
pub mod step1;
pub mod step2flow;

pub use error::{Error, Result};
pub use harness::{run_two_step, Scheme, Step1Solver};
pub use instance::{
    check_feasibility, meets_requirement, metrics, objective_step1, Assignment,
    AssociationInstance, AssociationSolution, ConstraintId, FeasibilityReport, Metrics,
};
pub use model::{
    build_capacity_matrix, sample_scenario, CapacityMatrix, ScenarioConfig, ScenarioRealization,
};
