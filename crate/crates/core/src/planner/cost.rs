use alloc::vec::Vec;

use super::{CostParams, PlanError, Route, Scenario};
use crate::env3d::{collision_measure, Aabb, Vec3, Workspace};

/// Interior waypoints flattened as `(x1, y1, z1, ..., xW, yW, zW)`.
pub fn encode(route: &Route) -> Vec<f64> {
    route.interior().iter().flat_map(|p| p.to_array()).collect()
}

/// Rebuilds the route between the scenario's anchors. Waypoints outside the
/// workspace are clamped onto it.
pub fn decode(x: &[f64], scenario: &Scenario) -> Result<Route, PlanError> {
    if x.len() != scenario.dimension() {
        return Err(PlanError::InvalidArgument(alloc::format!(
            "expected {} coordinates for {} waypoints, got {}",
            scenario.dimension(),
            scenario.num_waypoints,
            x.len()
        )));
    }
    Ok(decode_between(
        x,
        scenario.start,
        scenario.goal,
        &scenario.workspace.bounds,
    ))
}

pub(crate) fn decode_between(x: &[f64], start: Vec3, goal: Vec3, bounds: &Aabb) -> Route {
    let mut points = Vec::with_capacity(x.len() / 3 + 2);
    points.push(start);
    points.extend(
        x.chunks_exact(3)
            .map(|c| bounds.clamp(Vec3::new(c[0], c[1], c[2]))),
    );
    points.push(goal);
    Route { points }
}

/// Sum of squared turning angles (radians²) over interior vertices.
/// Vertices adjacent to a zero-length segment contribute nothing.
pub fn turning_penalty(points: &[Vec3]) -> f64 {
    points
        .windows(3)
        .map(|w| {
            let a = w[1] - w[0];
            let b = w[2] - w[1];
            if a.norm_squared() == 0.0 || b.norm_squared() == 0.0 {
                return 0.0;
            }
            let angle = libm::atan2(a.cross(b).norm(), a.dot(b));
            angle * angle
        })
        .sum()
}

/// `length + collision_weight * penetration + smoothness_weight * turning`.
///
/// `t0` and `robot_speed` place moving obstacles where they will be when the
/// robot reaches each sample.
pub fn route_cost(
    route: &Route,
    workspace: &Workspace,
    params: &CostParams,
    t0: f64,
    robot_speed: f64,
) -> f64 {
    let length = route.length();
    let mut cost = length;
    if params.collision_weight > 0.0 {
        cost += params.collision_weight
            * collision_measure(
                &route.points,
                workspace,
                t0,
                robot_speed,
                params.sample_resolution,
            );
    }
    if params.smoothness_weight > 0.0 {
        cost += params.smoothness_weight * turning_penalty(&route.points);
    }
    cost
}
