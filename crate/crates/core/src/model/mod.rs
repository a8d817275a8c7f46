//! Scenario synthesis and link-capacity computation.
//!
//! The channel between a UE RF chain and a BS RF chain is a single LOS path.
//! Both ends steer uniform linear arrays toward noisy estimates of the true
//! angles, so capacity falls off with the beamforming mismatch.

mod channel;
mod config;
mod scenario;

pub use channel::{
    beamforming_gain, link_capacity, path_loss_db, steering_vector, PathLoss, MIN_DISTANCE_M,
};
pub use config::{PathLossModel, PowerSplitMode, ScenarioConfig};
pub use scenario::{
    bs_grid_shape, build_capacity_matrix, sample_scenario, CapacityMatrix, Point,
    ScenarioRealization,
};
