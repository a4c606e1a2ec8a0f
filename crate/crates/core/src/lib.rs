//! Deterministic swarm optimizers and a 3D route planner built on them.
//!
//! The crate is `no_std` and needs only `alloc`. Everything that touches
//! files, clocks, or threads lives in the `salp-route` companion crate.
//!
//! * [`swarm`]: salp swarm, particle swarm and firefly optimizers over a
//!   box-bounded continuous search space.
//! * [`env3d`]: workspace, obstacles, collision geometry and sensing.
//! * [`planner`]: waypoint encoding, route cost, one-shot planning and the
//!   sense/plan/avoid simulation loop.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod env3d;
pub mod planner;
pub mod rng;
pub mod swarm;

pub use env3d::{Aabb, DynamicObstacle, Obstacle, ObstacleId, SphereObstacle, Vec3, Workspace};
pub use planner::{
    AlgoParams, Algorithm, CostParams, PlanError, Route, Scenario, SimConfig, SimOutcome, SimTrace,
};
pub use swarm::{
    FaParams, FollowerMode, Objective, PsoParams, RunHistory, RunResult, SearchBounds, SsaParams,
    SwarmError,
};
