//! The 3D world: workspace box, static blocks and spheres, spheres moving at
//! constant velocity with reflection off the workspace walls, and the
//! geometric queries the planner needs.
//!
//! All sets are closed: touching a boundary counts as contact.

use alloc::vec::Vec;
use core::fmt;

mod geometry;
mod vec3;

pub use geometry::{
    collision_measure, obstacle_position_at, point_aabb_distance, point_in_collision,
    point_penetration, segment_intersects_aabb, segment_point_distance, segment_sphere_penetration,
    sense,
};
pub use vec3::Vec3;

const AXES: [char; 3] = ['x', 'y', 'z'];

#[derive(Clone, Debug, PartialEq)]
pub enum EnvError {
    /// `min[axis] >= max[axis]` or a non-finite corner.
    DegenerateBox {
        axis: char,
    },
    NonPositiveRadius,
    NonFinite(&'static str),
    /// A static obstacle lies completely outside the workspace.
    ObstacleOutsideWorkspace {
        index: usize,
    },
    /// A moving obstacle starts with its center outside the workspace.
    DynamicOutsideWorkspace {
        index: usize,
    },
}

impl fmt::Display for EnvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvError::DegenerateBox { axis } => {
                write!(f, "box max must exceed min on the {axis} axis")
            }
            EnvError::NonPositiveRadius => write!(f, "sphere radius must be positive"),
            EnvError::NonFinite(what) => write!(f, "{what} must be finite"),
            EnvError::ObstacleOutsideWorkspace { index } => {
                write!(
                    f,
                    "static obstacle {index} does not intersect the workspace"
                )
            }
            EnvError::DynamicOutsideWorkspace { index } => {
                write!(f, "dynamic obstacle {index} starts outside the workspace")
            }
        }
    }
}

impl core::error::Error for EnvError {}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self, EnvError> {
        for k in 0..3 {
            if !(min[k].is_finite() && max[k].is_finite()) || min[k] >= max[k] {
                return Err(EnvError::DegenerateBox { axis: AXES[k] });
            }
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|k| self.min[k] <= p[k] && p[k] <= self.max[k])
    }

    pub fn diagonal(&self) -> f64 {
        self.min.distance(self.max)
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.max[k] && other.min[k] <= self.max[k])
    }

    pub fn clamp(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z.clamp(self.min.z, self.max.z),
        )
    }

    pub fn translated(&self, by: Vec3) -> Aabb {
        Aabb {
            min: self.min + by,
            max: self.max + by,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereObstacle {
    pub center: Vec3,
    pub radius: f64,
}

impl SphereObstacle {
    pub fn new(center: Vec3, radius: f64) -> Result<Self, EnvError> {
        if !center.is_finite() {
            return Err(EnvError::NonFinite("sphere center"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(EnvError::NonPositiveRadius);
        }
        Ok(Self { center, radius })
    }
}

/// A static obstacle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Obstacle {
    Block(Aabb),
    Sphere(SphereObstacle),
}

impl Obstacle {
    /// Minimum distance from `p` to the solid; 0 inside.
    pub fn distance_to(&self, p: Vec3) -> f64 {
        match self {
            Obstacle::Block(b) => point_aabb_distance(p, b),
            Obstacle::Sphere(s) => (p.distance(s.center) - s.radius).max(0.0),
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        match self {
            Obstacle::Block(b) => b.contains(p),
            Obstacle::Sphere(s) => p.distance(s.center) <= s.radius,
        }
    }

    fn translated(&self, by: Vec3) -> Obstacle {
        match self {
            Obstacle::Block(b) => Obstacle::Block(b.translated(by)),
            Obstacle::Sphere(s) => Obstacle::Sphere(SphereObstacle {
                center: s.center + by,
                radius: s.radius,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MotionModel {
    /// Constant velocity, elastic bounce of the center off the workspace walls.
    #[default]
    ReflectAtBounds,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicObstacle {
    /// Shape at `t = 0`.
    pub shape: SphereObstacle,
    /// Metres per second.
    pub velocity: Vec3,
    pub motion: MotionModel,
}

impl DynamicObstacle {
    pub fn new(shape: SphereObstacle, velocity: Vec3) -> Result<Self, EnvError> {
        if !velocity.is_finite() {
            return Err(EnvError::NonFinite("obstacle velocity"));
        }
        Ok(Self {
            shape,
            velocity,
            motion: MotionModel::ReflectAtBounds,
        })
    }
}

/// Identifies an obstacle within its [`Workspace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObstacleId {
    Static(usize),
    Dynamic(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Workspace {
    pub bounds: Aabb,
    pub static_obstacles: Vec<Obstacle>,
    pub dynamic_obstacles: Vec<DynamicObstacle>,
}

impl Workspace {
    pub fn new(
        bounds: Aabb,
        static_obstacles: Vec<Obstacle>,
        dynamic_obstacles: Vec<DynamicObstacle>,
    ) -> Result<Self, EnvError> {
        let ws = Self {
            bounds,
            static_obstacles,
            dynamic_obstacles,
        };
        ws.validate()?;
        Ok(ws)
    }

    pub fn empty(bounds: Aabb) -> Self {
        Self {
            bounds,
            static_obstacles: Vec::new(),
            dynamic_obstacles: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        Aabb::new(self.bounds.min, self.bounds.max)?;
        for (i, o) in self.static_obstacles.iter().enumerate() {
            match o {
                Obstacle::Block(b) => {
                    Aabb::new(b.min, b.max)?;
                }
                Obstacle::Sphere(s) => {
                    SphereObstacle::new(s.center, s.radius)?;
                }
            }
            let touches = match o {
                Obstacle::Block(b) => b.intersects(&self.bounds),
                Obstacle::Sphere(s) => point_aabb_distance(s.center, &self.bounds) <= s.radius,
            };
            if !touches {
                return Err(EnvError::ObstacleOutsideWorkspace { index: i });
            }
        }
        for (i, d) in self.dynamic_obstacles.iter().enumerate() {
            SphereObstacle::new(d.shape.center, d.shape.radius)?;
            if !d.velocity.is_finite() {
                return Err(EnvError::NonFinite("obstacle velocity"));
            }
            if !self.bounds.contains(d.shape.center) {
                return Err(EnvError::DynamicOutsideWorkspace { index: i });
            }
        }
        Ok(())
    }

    /// Position of dynamic obstacle `index` at time `t`.
    pub fn dynamic_position(&self, index: usize, t: f64) -> Vec3 {
        obstacle_position_at(&self.dynamic_obstacles[index], t, &self.bounds)
    }

    /// The sub-world containing only `ids`, keeping the original order within
    /// each list.
    pub fn restricted_to(&self, ids: &[ObstacleId]) -> Workspace {
        let static_obstacles = self
            .static_obstacles
            .iter()
            .enumerate()
            .filter(|(i, _)| ids.contains(&ObstacleId::Static(*i)))
            .map(|(_, o)| *o)
            .collect();
        let dynamic_obstacles = self
            .dynamic_obstacles
            .iter()
            .enumerate()
            .filter(|(i, _)| ids.contains(&ObstacleId::Dynamic(*i)))
            .map(|(_, o)| *o)
            .collect();
        Workspace {
            bounds: self.bounds,
            static_obstacles,
            dynamic_obstacles,
        }
    }

    /// Every obstacle id, statics first.
    pub fn all_ids(&self) -> Vec<ObstacleId> {
        (0..self.static_obstacles.len())
            .map(ObstacleId::Static)
            .chain((0..self.dynamic_obstacles.len()).map(ObstacleId::Dynamic))
            .collect()
    }

    /// Rigid translation of the bounds and every obstacle.
    pub fn translated(&self, by: Vec3) -> Workspace {
        Workspace {
            bounds: self.bounds.translated(by),
            static_obstacles: self
                .static_obstacles
                .iter()
                .map(|o| o.translated(by))
                .collect(),
            dynamic_obstacles: self
                .dynamic_obstacles
                .iter()
                .map(|d| DynamicObstacle {
                    shape: SphereObstacle {
                        center: d.shape.center + by,
                        radius: d.shape.radius,
                    },
                    ..*d
                })
                .collect(),
        }
    }

    /// Index of the first static obstacle containing `p`.
    pub fn static_obstacle_containing(&self, p: Vec3) -> Option<usize> {
        self.static_obstacles.iter().position(|o| o.contains(p))
    }
}

impl Workspace {
    /// Every obstacle grown by `margin` metres (boxes per face, spheres in
    /// radius). Bounds are unchanged.
    pub fn inflated(&self, margin: f64) -> Workspace {
        if margin <= 0.0 {
            return self.clone();
        }
        let m = Vec3::new(margin, margin, margin);
        Workspace {
            bounds: self.bounds,
            static_obstacles: self
                .static_obstacles
                .iter()
                .map(|o| match o {
                    Obstacle::Block(b) => Obstacle::Block(Aabb {
                        min: b.min - m,
                        max: b.max + m,
                    }),
                    Obstacle::Sphere(s) => Obstacle::Sphere(SphereObstacle {
                        center: s.center,
                        radius: s.radius + margin,
                    }),
                })
                .collect(),
            dynamic_obstacles: self
                .dynamic_obstacles
                .iter()
                .map(|d| DynamicObstacle {
                    shape: SphereObstacle {
                        center: d.shape.center,
                        radius: d.shape.radius + margin,
                    },
                    ..*d
                })
                .collect(),
        }
    }

    /// The same world without its moving obstacles.
    pub fn statics_only(&self) -> Workspace {
        Workspace {
            bounds: self.bounds,
            static_obstacles: self.static_obstacles.clone(),
            dynamic_obstacles: Vec::new(),
        }
    }
}
