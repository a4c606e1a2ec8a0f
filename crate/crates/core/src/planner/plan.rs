use alloc::vec::Vec;

use super::cost::decode_between;
use super::{route_cost, AlgoParams, CostParams, PlanError, Route, Scenario};
use crate::env3d::{Vec3, Workspace};
use crate::swarm::{
    FaState, Objective, PsoState, RunHistory, RunResult, SearchBounds, SsaState, SwarmError,
    SwarmOptimizer,
};

/// Monotonic time source in seconds. The core crate has no clock of its own.
pub trait Clock {
    fn now_seconds(&self) -> f64;
}

/// A clock that never advances; wall times come out as zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_seconds(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanResult {
    pub route: Route,
    /// `route_cost` of `route`.
    pub cost: f64,
    pub history: RunHistory,
    /// Seconds spent in the optimization loop.
    pub wall_time_seconds: f64,
}

/// Runs the configured optimizer, optionally seeding the leading population
/// rows with `warm_start`.
pub fn run_optimizer<O: Objective + ?Sized>(
    params: &AlgoParams,
    objective: &O,
    bounds: &SearchBounds,
    seed: u64,
    warm_start: &[Vec<f64>],
) -> Result<RunResult, SwarmError> {
    match params {
        AlgoParams::Ssa(p) => {
            SsaState::with_warm_start(objective, bounds, p.clone(), seed, warm_start)?.run_to_end()
        }
        AlgoParams::Pso(p) => {
            PsoState::with_warm_start(objective, bounds, p.clone(), seed, warm_start)?.run_to_end()
        }
        AlgoParams::Fa(p) => {
            FaState::with_warm_start(objective, bounds, p.clone(), seed, warm_start)?.run_to_end()
        }
    }
}

/// Route fitness as seen by an optimizer.
pub(crate) struct RouteObjective<'a> {
    pub start: Vec3,
    pub goal: Vec3,
    pub workspace: &'a Workspace,
    pub cost: &'a CostParams,
    pub t0: f64,
    pub robot_speed: f64,
}

impl RouteObjective<'_> {
    pub fn route(&self, x: &[f64]) -> Route {
        decode_between(x, self.start, self.goal, &self.workspace.bounds)
    }
}

impl Objective for RouteObjective<'_> {
    fn evaluate(&self, x: &[f64]) -> f64 {
        route_cost(
            &self.route(x),
            self.workspace,
            self.cost,
            self.t0,
            self.robot_speed,
        )
    }
}

pub(crate) fn waypoint_bounds(
    workspace: &Workspace,
    waypoints: usize,
) -> Result<SearchBounds, SwarmError> {
    let b = &workspace.bounds;
    SearchBounds::tiled(&b.min.to_array(), &b.max.to_array(), waypoints)
}

/// Optimizes a route from `start` to `goal` through `workspace`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn optimize_route(
    start: Vec3,
    goal: Vec3,
    waypoints: usize,
    workspace: &Workspace,
    params: &AlgoParams,
    cost: &CostParams,
    robot_speed: f64,
    t0: f64,
    seed: u64,
    warm_start: &[Vec<f64>],
) -> Result<(Route, f64, RunHistory), PlanError> {
    let bounds = waypoint_bounds(workspace, waypoints)?;
    let objective = RouteObjective {
        start,
        goal,
        workspace,
        cost,
        t0,
        robot_speed,
    };
    let result = run_optimizer(params, &objective, &bounds, seed, warm_start)?;
    Ok((
        objective.route(&result.best_position),
        result.best_fitness,
        result.history,
    ))
}

/// Offline planning with every obstacle known up front.
///
/// Moving obstacles are evaluated where they will be when the robot, leaving
/// at `t = 0`, reaches each part of the route.
pub fn plan_static(
    scenario: &Scenario,
    params: &AlgoParams,
    cost: &CostParams,
    seed: u64,
    clock: &dyn Clock,
) -> Result<PlanResult, PlanError> {
    scenario.validate()?;
    cost.validate()?;
    if let Some(i) = scenario.workspace.static_obstacle_containing(scenario.goal) {
        return Err(PlanError::Unreachable(alloc::format!(
            "goal lies inside static obstacle {i}"
        )));
    }
    let started = clock.now_seconds();
    let (route, cost_value, history) = optimize_route(
        scenario.start,
        scenario.goal,
        scenario.num_waypoints,
        &scenario.workspace,
        params,
        cost,
        scenario.robot_speed,
        0.0,
        seed,
        &[],
    )?;
    let wall_time_seconds = (clock.now_seconds() - started).max(0.0);
    Ok(PlanResult {
        route,
        cost: cost_value,
        history,
        wall_time_seconds,
    })
}
