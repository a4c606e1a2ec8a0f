use alloc::vec::Vec;

use super::{Aabb, DynamicObstacle, Obstacle, ObstacleId, SphereObstacle, Vec3, Workspace};

/// Closed segment vs closed box, by clipping the segment parameter against
/// the three slabs.
pub fn segment_intersects_aabb(p0: Vec3, p1: Vec3, aabb: &Aabb) -> bool {
    let d = p1 - p0;
    let (mut t_enter, mut t_exit) = (0.0_f64, 1.0_f64);
    for k in 0..3 {
        if d[k] == 0.0 {
            if p0[k] < aabb.min[k] || p0[k] > aabb.max[k] {
                return false;
            }
            continue;
        }
        let inv = 1.0 / d[k];
        let mut ta = (aabb.min[k] - p0[k]) * inv;
        let mut tb = (aabb.max[k] - p0[k]) * inv;
        if ta > tb {
            core::mem::swap(&mut ta, &mut tb);
        }
        t_enter = t_enter.max(ta);
        t_exit = t_exit.min(tb);
        if t_enter > t_exit {
            return false;
        }
    }
    true
}

/// Minimum distance from `c` to the closed segment `[p0, p1]`.
///
/// Endpoints are put in a fixed order first, so swapping them gives the
/// bit-identical result.
pub fn segment_point_distance(p0: Vec3, p1: Vec3, c: Vec3) -> f64 {
    let (p0, p1) = if p0.to_array() <= p1.to_array() {
        (p0, p1)
    } else {
        (p1, p0)
    };
    let d = p1 - p0;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        ((c - p0).dot(d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    c.distance(p0 + d * t)
}

/// `max(0, radius - d)` where `d` is the segment's distance to the center.
pub fn segment_sphere_penetration(p0: Vec3, p1: Vec3, sphere: &SphereObstacle) -> f64 {
    (sphere.radius - segment_point_distance(p0, p1, sphere.center)).max(0.0)
}

/// Euclidean distance from `p` to the box; 0 inside or on the surface.
pub fn point_aabb_distance(p: Vec3, aabb: &Aabb) -> f64 {
    let excess = |k: usize| (aabb.min[k] - p[k]).max(p[k] - aabb.max[k]).max(0.0);
    Vec3::new(excess(0), excess(1), excess(2)).norm()
}

/// Depth of `p` inside a static obstacle: distance to the nearest face for
/// a box, `radius - |p - c|` for a sphere; 0 outside.
fn static_penetration(p: Vec3, o: &Obstacle) -> f64 {
    match o {
        Obstacle::Block(b) => {
            if !b.contains(p) {
                return 0.0;
            }
            (0..3)
                .map(|k| (p[k] - b.min[k]).min(b.max[k] - p[k]))
                .fold(f64::INFINITY, f64::min)
        }
        Obstacle::Sphere(s) => (s.radius - p.distance(s.center)).max(0.0),
    }
}

/// Position at time `t` of a sphere moving at constant velocity whose center
/// bounces elastically off the workspace walls: a triangle wave per axis.
pub fn obstacle_position_at(obstacle: &DynamicObstacle, t: f64, bounds: &Aabb) -> Vec3 {
    let c = obstacle.shape.center;
    let v = obstacle.velocity;
    let axis = |k: usize| {
        let lo = bounds.min[k];
        let span = bounds.max[k] - lo;
        if span <= 0.0 || v[k] == 0.0 {
            return c[k];
        }
        let period = 2.0 * span;
        let raw = libm::fmod(c[k] - lo + v[k] * t, period);
        let s = if raw < 0.0 { raw + period } else { raw };
        lo + if s <= span { s } else { period - s }
    };
    Vec3::new(axis(0), axis(1), axis(2))
}

/// Obstacles within `sensor_radius` of `robot`: statics by surface distance,
/// dynamics by center distance at time `t` against `sensor_radius + radius`.
pub fn sense(workspace: &Workspace, robot: Vec3, sensor_radius: f64, t: f64) -> Vec<ObstacleId> {
    let statics = workspace
        .static_obstacles
        .iter()
        .enumerate()
        .filter(|(_, o)| o.distance_to(robot) <= sensor_radius)
        .map(|(i, _)| ObstacleId::Static(i));
    let dynamics = workspace
        .dynamic_obstacles
        .iter()
        .enumerate()
        .filter(|(_, d)| {
            let c = obstacle_position_at(d, t, &workspace.bounds);
            c.distance(robot) <= sensor_radius + d.shape.radius
        })
        .map(|(i, _)| ObstacleId::Dynamic(i));
    statics.chain(dynamics).collect()
}

/// Summed penetration depth of `p` into every obstacle at time `t`.
pub fn point_penetration(workspace: &Workspace, p: Vec3, t: f64) -> f64 {
    let mut depth = 0.0;
    for o in &workspace.static_obstacles {
        depth += static_penetration(p, o);
    }
    for d in &workspace.dynamic_obstacles {
        let c = obstacle_position_at(d, t, &workspace.bounds);
        depth += (d.shape.radius - p.distance(c)).max(0.0);
    }
    depth
}

/// Whether `p` touches any obstacle (closed sets) at time `t`.
pub fn point_in_collision(workspace: &Workspace, p: Vec3, t: f64) -> bool {
    workspace.static_obstacles.iter().any(|o| o.contains(p))
        || workspace
            .dynamic_obstacles
            .iter()
            .any(|d| obstacle_position_at(d, t, &workspace.bounds).distance(p) <= d.shape.radius)
}

/// Penetration integrated along a polyline.
///
/// Each segment is split into `ceil(len / resolution)` equal pieces and
/// sampled at their midpoints, each sample weighted by the piece length.
/// Moving obstacles are evaluated at the time the robot, leaving `points[0]`
/// at `t0` with constant `robot_speed`, reaches the sample.
pub fn collision_measure(
    points: &[Vec3],
    workspace: &Workspace,
    t0: f64,
    robot_speed: f64,
    resolution: f64,
) -> f64 {
    if workspace.static_obstacles.is_empty() && workspace.dynamic_obstacles.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    let mut arc = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.distance(b);
        if len == 0.0 {
            continue;
        }
        let pieces = libm::ceil(len / resolution).max(1.0);
        let h = len / pieces;
        let count = pieces as usize;
        for i in 0..count {
            let s = (i as f64 + 0.5) * h;
            let p = a.lerp(b, s / len);
            let t = t0 + (arc + s) / robot_speed;
            total += h * point_penetration(workspace, p, t);
        }
        arc += len;
    }
    total
}
