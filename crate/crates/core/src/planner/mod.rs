//! Route planning on top of the swarm optimizers.
//!
//! A route is the start, `W` free interior waypoints, and the goal. The
//! optimizers search over the `3W` interior coordinates ([`encode`] /
//! [`decode`]) and minimize [`route_cost`]: length plus weighted collision
//! penetration plus weighted turning.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::env3d::{EnvError, Vec3, Workspace};
use crate::swarm::{FaParams, PsoParams, SsaParams, SwarmError};

mod cost;
mod plan;
mod simulate;

pub use cost::{decode, encode, route_cost, turning_penalty};
pub use plan::{plan_static, run_optimizer, Clock, NoClock, PlanResult};
pub use simulate::{
    simulate_dynamic, ReplanEvent, ReplanTrigger, SimConfig, SimOutcome, SimTrace, TraceEvent,
    TraceSample,
};

#[derive(Clone, Debug, PartialEq)]
pub enum PlanError {
    InvalidScenario(String),
    InvalidArgument(String),
    /// The goal cannot be reached, e.g. it lies inside a static obstacle.
    Unreachable(String),
    Swarm(SwarmError),
    Env(EnvError),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::InvalidScenario(m) => write!(f, "invalid scenario: {m}"),
            PlanError::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            PlanError::Unreachable(m) => write!(f, "goal unreachable: {m}"),
            PlanError::Swarm(e) => write!(f, "optimizer failed: {e}"),
            PlanError::Env(e) => write!(f, "invalid workspace: {e}"),
        }
    }
}

impl core::error::Error for PlanError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            PlanError::Swarm(e) => Some(e),
            PlanError::Env(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SwarmError> for PlanError {
    fn from(e: SwarmError) -> Self {
        PlanError::Swarm(e)
    }
}

impl From<EnvError> for PlanError {
    fn from(e: EnvError) -> Self {
        PlanError::Env(e)
    }
}

fn invalid(msg: impl Into<String>) -> PlanError {
    PlanError::InvalidScenario(msg.into())
}

/// A planning problem: the world, the two anchors, and robot parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub workspace: Workspace,
    pub start: Vec3,
    pub goal: Vec3,
    /// Free interior waypoints `W`; the search dimension is `3W`.
    pub num_waypoints: usize,
    /// Metres per second.
    pub robot_speed: f64,
    /// Metres.
    pub sensor_radius: f64,
    /// Metres.
    pub goal_tolerance: f64,
    /// Seconds per simulation step.
    pub control_step: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), PlanError> {
        self.workspace.validate()?;
        if self.num_waypoints == 0 {
            return Err(invalid("num_waypoints must be at least 1"));
        }
        for (name, v) in [
            ("robot_speed", self.robot_speed),
            ("sensor_radius", self.sensor_radius),
            ("goal_tolerance", self.goal_tolerance),
            ("control_step", self.control_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(alloc::format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        for (name, p) in [("start", self.start), ("goal", self.goal)] {
            if !self.workspace.bounds.contains(p) {
                return Err(invalid(alloc::format!(
                    "{name} lies outside the workspace bounds"
                )));
            }
        }
        // A goal inside an obstacle is a planning outcome, not a malformed
        // scenario.
        if let Some(i) = self.workspace.static_obstacle_containing(self.start) {
            return Err(invalid(alloc::format!(
                "start lies inside static obstacle {i}"
            )));
        }
        Ok(())
    }

    /// Search dimension `3W`.
    pub fn dimension(&self) -> usize {
        3 * self.num_waypoints
    }

    /// The same problem moved rigidly by `by`.
    pub fn translated(&self, by: Vec3) -> Scenario {
        Scenario {
            workspace: self.workspace.translated(by),
            start: self.start + by,
            goal: self.goal + by,
            ..self.clone()
        }
    }
}

/// Piecewise-linear path: start, interior waypoints, goal.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    pub points: alloc::vec::Vec<Vec3>,
}

impl Route {
    /// `waypoints` points evenly spaced on the segment from `start` to `goal`.
    pub fn straight(start: Vec3, goal: Vec3, waypoints: usize) -> Route {
        let n = waypoints + 1;
        let points = (0..=n)
            .map(|i| start.lerp(goal, i as f64 / n as f64))
            .collect();
        Route { points }
    }

    pub fn start(&self) -> Vec3 {
        self.points[0]
    }

    pub fn goal(&self) -> Vec3 {
        self.points[self.points.len() - 1]
    }

    pub fn interior(&self) -> &[Vec3] {
        let n = self.points.len();
        if n < 2 {
            &[]
        } else {
            &self.points[1..n - 1]
        }
    }

    /// Total polyline length.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}

/// Fitness weights: `cost = length + collision_weight * C + smoothness_weight * S`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostParams {
    pub collision_weight: f64,
    pub smoothness_weight: f64,
    /// Arc-length spacing of collision samples, metres.
    pub sample_resolution: f64,
}

impl CostParams {
    /// Defaults: collision weight 1000, no smoothing, 200 samples per
    /// workspace diagonal.
    pub fn for_workspace(workspace: &Workspace) -> Self {
        Self {
            collision_weight: 1000.0,
            smoothness_weight: 0.0,
            sample_resolution: workspace.bounds.diagonal() / 200.0,
        }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if !(self.collision_weight.is_finite() && self.collision_weight >= 0.0) {
            return Err(PlanError::InvalidArgument(
                "collision_weight must be >= 0".into(),
            ));
        }
        if !(self.smoothness_weight.is_finite() && self.smoothness_weight >= 0.0) {
            return Err(PlanError::InvalidArgument(
                "smoothness_weight must be >= 0".into(),
            ));
        }
        if !(self.sample_resolution.is_finite() && self.sample_resolution > 0.0) {
            return Err(PlanError::InvalidArgument(
                "sample_resolution must be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Ssa,
    Pso,
    Fa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ssa, Algorithm::Pso, Algorithm::Fa];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ssa => "ssa",
            Algorithm::Pso => "pso",
            Algorithm::Fa => "fa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownAlgorithm(pub String);

impl fmt::Display for UnknownAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_str() {
            "gso" | "aco" | "ga" => write!(
                f,
                "algorithm '{}' is out of scope; available: ssa, pso, fa",
                self.0
            ),
            other => write!(f, "unknown algorithm '{other}'; available: ssa, pso, fa"),
        }
    }
}

impl core::error::Error for UnknownAlgorithm {}

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ssa" => Ok(Algorithm::Ssa),
            "pso" => Ok(Algorithm::Pso),
            "fa" => Ok(Algorithm::Fa),
            other => Err(UnknownAlgorithm(other.into())),
        }
    }
}

/// An optimizer together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum AlgoParams {
    Ssa(SsaParams),
    Pso(PsoParams),
    Fa(FaParams),
}

impl AlgoParams {
    /// Default coefficients for `algorithm` with the given budget.
    pub fn new(algorithm: Algorithm, population: usize, max_iterations: usize) -> Self {
        match algorithm {
            Algorithm::Ssa => AlgoParams::Ssa(SsaParams::new(population, max_iterations)),
            Algorithm::Pso => AlgoParams::Pso(PsoParams::new(population, max_iterations)),
            Algorithm::Fa => AlgoParams::Fa(FaParams::new(population, max_iterations)),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgoParams::Ssa(_) => Algorithm::Ssa,
            AlgoParams::Pso(_) => Algorithm::Pso,
            AlgoParams::Fa(_) => Algorithm::Fa,
        }
    }

    pub fn population(&self) -> usize {
        match self {
            AlgoParams::Ssa(p) => p.population,
            AlgoParams::Pso(p) => p.population,
            AlgoParams::Fa(p) => p.population,
        }
    }

    pub fn max_iterations(&self) -> usize {
        match self {
            AlgoParams::Ssa(p) => p.max_iterations,
            AlgoParams::Pso(p) => p.max_iterations,
            AlgoParams::Fa(p) => p.max_iterations,
        }
    }
}
