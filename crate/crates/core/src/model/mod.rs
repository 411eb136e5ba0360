//! The planning instance: geometry, dynamics, hidden labels, and sensing.

mod dynamics;
mod geometry;
mod hypothesis;
mod scenario;

pub use dynamics::{wrap_angle, Dynamics, DynamicsModel, FuelModel, StateVec};
pub use geometry::{Bounds, Shape};
pub use hypothesis::{EnvHypothesis, HypothesisSpace, MemoryVector, UncertainPair, DEFAULT_MAX_UNCERTAIN_PAIRS};
pub use scenario::{
    InitialSpec, JointEntry, ObservationRegion, ObservationSpec, PlanningParams, PriorSpec, RegionSpec, Scenario,
    ScenarioFile, SemanticRegion, TaskSpec, WorkspaceSpec, FUEL_PROP, MAX_OBSERVATION_REGIONS, OBSTACLE_PROP,
};

#[cfg(test)]
pub(crate) use scenario::tests::fire_fixture;
