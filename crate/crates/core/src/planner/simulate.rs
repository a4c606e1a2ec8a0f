//! Closed-loop sense / plan / avoid simulation for a single point robot.
//!
//! Every control step, in order:
//!
//! 1. sense obstacles within the sensor radius and add them to the known set;
//! 2. if something new was sensed, or the current route is predicted to hit
//!    a known obstacle within the lookahead horizon, replan from the current
//!    position using only known obstacles (static ones as fixed geometry,
//!    moving ones at their predicted positions);
//! 3. advance `robot_speed * control_step` metres along the route;
//! 4. stop on collision (against the true world), on reaching the goal, or
//!    when simulated time runs out.

use alloc::vec::Vec;

use super::plan::optimize_route;
use super::{AlgoParams, CostParams, PlanError, Route, Scenario};
use crate::env3d::{collision_measure, point_in_collision, sense, ObstacleId, Vec3, Workspace};
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Simulated seconds before giving up.
    pub max_sim_time: f64,
    /// Collision lookahead in control steps of travel.
    pub lookahead_steps: f64,
    /// Margin added around known obstacles when planning and predicting.
    pub clearance: f64,
    /// Planner restarts (fresh seeds) before declaring the goal unreachable.
    pub max_replan_attempts: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_sim_time: 300.0,
            lookahead_steps: 3.0,
            clearance: 0.0,
            max_replan_attempts: 3,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::InvalidArgument(m.into()));
        if !(self.max_sim_time.is_finite() && self.max_sim_time > 0.0) {
            return bad("max_sim_time must be positive");
        }
        if !(self.lookahead_steps.is_finite() && self.lookahead_steps >= 0.0) {
            return bad("lookahead_steps must be >= 0");
        }
        if !(self.clearance.is_finite() && self.clearance >= 0.0) {
            return bad("clearance must be >= 0");
        }
        if self.max_replan_attempts == 0 {
            return bad("max_replan_attempts must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplanTrigger {
    NewObstacleSensed,
    PredictedCollision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimOutcome {
    GoalReached,
    Timeout,
    /// No collision-free route around known static obstacles was found.
    Unreachable,
    /// The robot touched an obstacle.
    Collision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Start,
    Move,
    Replan(ReplanTrigger),
    Collision,
    GoalReached,
    Timeout,
    Unreachable,
}

impl TraceEvent {
    pub fn label(self) -> &'static str {
        match self {
            TraceEvent::Start => "start",
            TraceEvent::Move => "move",
            TraceEvent::Replan(ReplanTrigger::NewObstacleSensed) => "replan_new_obstacle",
            TraceEvent::Replan(ReplanTrigger::PredictedCollision) => "replan_predicted_collision",
            TraceEvent::Collision => "collision",
            TraceEvent::GoalReached => "goal_reached",
            TraceEvent::Timeout => "timeout",
            TraceEvent::Unreachable => "unreachable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub position: Vec3,
    pub event: TraceEvent,
    /// The robot touches an obstacle at this sample.
    pub collided: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplanEvent {
    pub t: f64,
    pub position: Vec3,
    pub trigger: ReplanTrigger,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub samples: Vec<TraceSample>,
    pub replans: Vec<ReplanEvent>,
    pub outcome: SimOutcome,
    /// The route planned at `t = 0`.
    pub initial_route: Route,
}

impl SimTrace {
    pub fn collision_count(&self) -> usize {
        self.samples.iter().filter(|s| s.collided).count()
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

struct Planner<'a> {
    scenario: &'a Scenario,
    params: &'a AlgoParams,
    cost: &'a CostParams,
    config: &'a SimConfig,
    seed: u64,
    runs: u64,
}

impl Planner<'_> {
    /// Plans from `position` at time `t` against the known obstacles. Returns
    /// `None` when every attempt still crosses known static geometry.
    fn plan(
        &mut self,
        position: Vec3,
        t: f64,
        known: &Workspace,
        warm: Option<&[Vec3]>,
    ) -> Result<Option<Vec<Vec3>>, PlanError> {
        let s = self.scenario;
        let warm_rows: Vec<Vec<f64>> = warm
            .map(|pts| resample_interior(pts, s.num_waypoints))
            .into_iter()
            .collect();
        let statics = known.statics_only();
        for _ in 0..self.config.max_replan_attempts {
            // The very first plan uses the caller's seed unchanged, so with a
            // fully known static world it matches offline planning.
            let seed = if self.runs == 0 {
                self.seed
            } else {
                derive_seed(self.seed, self.runs)
            };
            self.runs += 1;
            let (route, _, _) = optimize_route(
                position,
                s.goal,
                s.num_waypoints,
                known,
                self.params,
                self.cost,
                s.robot_speed,
                t,
                seed,
                &warm_rows,
            )?;
            let blocked = collision_measure(
                &route.points,
                &statics,
                t,
                s.robot_speed,
                self.cost.sample_resolution,
            );
            if blocked == 0.0 {
                return Ok(Some(route.points));
            }
        }
        Ok(None)
    }
}

/// Runs the closed loop until the goal is reached, the robot collides, the
/// planner gives up, or `config.max_sim_time` elapses.
pub fn simulate_dynamic(
    scenario: &Scenario,
    params: &AlgoParams,
    cost: &CostParams,
    seed: u64,
    config: &SimConfig,
) -> Result<SimTrace, PlanError> {
    scenario.validate()?;
    cost.validate()?;
    config.validate()?;
    let world = &scenario.workspace;
    if point_in_collision(world, scenario.start, 0.0) {
        return Err(PlanError::InvalidScenario(
            "start touches an obstacle at t = 0".into(),
        ));
    }

    let dt = scenario.control_step;
    let step_len = scenario.robot_speed * dt;
    let horizon = config.lookahead_steps * step_len;
    let probe = cost.sample_resolution * 0.5;

    let mut planner = Planner {
        scenario,
        params,
        cost,
        config,
        seed,
        runs: 0,
    };

    let mut known: Vec<ObstacleId> = sense(world, scenario.start, scenario.sensor_radius, 0.0);
    let mut known_ws = world.restricted_to(&known).inflated(config.clearance);
    let mut t = 0.0;
    let mut position = scenario.start;
    let mut samples = alloc::vec![TraceSample {
        t,
        position,
        event: TraceEvent::Start,
        collided: false,
    }];
    let mut replans = Vec::new();

    let finish = |samples: Vec<TraceSample>, replans, outcome, initial_route| SimTrace {
        samples,
        replans,
        outcome,
        initial_route,
    };

    if position.distance(scenario.goal) <= scenario.goal_tolerance {
        samples[0].event = TraceEvent::GoalReached;
        let r = Route {
            points: alloc::vec![position, scenario.goal],
        };
        return Ok(finish(samples, replans, SimOutcome::GoalReached, r));
    }

    let goal_blocked = world.static_obstacle_containing(scenario.goal).is_some();
    let first = if goal_blocked {
        None
    } else {
        planner.plan(position, t, &known_ws, None)?
    };
    let Some(mut route) = first else {
        samples[0].event = TraceEvent::Unreachable;
        let r = Route::straight(position, scenario.goal, scenario.num_waypoints);
        return Ok(finish(samples, replans, SimOutcome::Unreachable, r));
    };
    let initial_route = Route {
        points: route.clone(),
    };

    loop {
        let (next, rest) = advance(&route, step_len);
        position = next;
        route = rest;
        t += dt;
        let collided = point_in_collision(world, position, t);
        samples.push(TraceSample {
            t,
            position,
            event: TraceEvent::Move,
            collided,
        });
        let last = samples.len() - 1;
        if collided {
            samples[last].event = TraceEvent::Collision;
            return Ok(finish(
                samples,
                replans,
                SimOutcome::Collision,
                initial_route,
            ));
        }
        if position.distance(scenario.goal) <= scenario.goal_tolerance {
            samples[last].event = TraceEvent::GoalReached;
            return Ok(finish(
                samples,
                replans,
                SimOutcome::GoalReached,
                initial_route,
            ));
        }
        if t >= config.max_sim_time {
            samples[last].event = TraceEvent::Timeout;
            return Ok(finish(samples, replans, SimOutcome::Timeout, initial_route));
        }

        let mut fresh = false;
        for id in sense(world, position, scenario.sensor_radius, t) {
            if !known.contains(&id) {
                known.push(id);
                fresh = true;
            }
        }
        let trigger = if fresh {
            known.sort_unstable();
            known_ws = world.restricted_to(&known).inflated(config.clearance);
            Some(ReplanTrigger::NewObstacleSensed)
        } else if predicts_collision(&route, &known_ws, t, scenario.robot_speed, horizon, probe) {
            Some(ReplanTrigger::PredictedCollision)
        } else {
            None
        };
        if let Some(trigger) = trigger {
            samples[last].event = TraceEvent::Replan(trigger);
            replans.push(ReplanEvent {
                t,
                position,
                trigger,
            });
            match planner.plan(position, t, &known_ws, Some(&route))? {
                Some(r) => route = r,
                None => {
                    samples[last].event = TraceEvent::Unreachable;
                    return Ok(finish(
                        samples,
                        replans,
                        SimOutcome::Unreachable,
                        initial_route,
                    ));
                }
            }
        }
    }
}

/// Moves `distance` metres along the polyline; returns the new position and
/// the remaining polyline starting there.
fn advance(points: &[Vec3], distance: f64) -> (Vec3, Vec<Vec3>) {
    let mut left = distance;
    for i in 0..points.len().saturating_sub(1) {
        let (a, b) = (points[i], points[i + 1]);
        let len = a.distance(b);
        if len > left {
            let p = a.lerp(b, left / len);
            let mut rest = Vec::with_capacity(points.len() - i);
            rest.push(p);
            rest.extend_from_slice(&points[i + 1..]);
            return (p, rest);
        }
        left -= len;
    }
    let end = *points.last().expect("route has points");
    (end, alloc::vec![end])
}

/// Point at arc length `s` along the polyline, clamped to its ends.
fn point_at(points: &[Vec3], s: f64) -> Vec3 {
    let mut left = s.max(0.0);
    for w in points.windows(2) {
        let len = w[0].distance(w[1]);
        if len >= left && len > 0.0 {
            return w[0].lerp(w[1], left / len);
        }
        left -= len;
    }
    *points.last().expect("route has points")
}

fn polyline_length(points: &[Vec3]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// `W` interior waypoints spaced evenly by arc length, flattened.
fn resample_interior(points: &[Vec3], waypoints: usize) -> Vec<f64> {
    let total = polyline_length(points);
    (1..=waypoints)
        .flat_map(|i| point_at(points, total * i as f64 / (waypoints + 1) as f64).to_array())
        .collect()
}

fn predicts_collision(
    route: &[Vec3],
    known: &Workspace,
    t: f64,
    speed: f64,
    horizon: f64,
    probe: f64,
) -> bool {
    let reach = horizon.min(polyline_length(route));
    if reach <= 0.0 {
        return false;
    }
    let steps = libm::ceil(reach / probe).max(1.0) as usize;
    (1..=steps).any(|k| {
        let s = reach * k as f64 / steps as f64;
        point_in_collision(known, point_at(route, s), t + s / speed)
    })
}
