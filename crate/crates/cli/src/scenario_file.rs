//! Versioned JSON scenario documents.
//!
//! Unknown fields are rejected everywhere and `version` is mandatory. Loading
//! checks every invariant the planner relies on and names the offending field
//! in the error. See `scenarios/README.md` for the schema.

use std::fs;
use std::path::{Path, PathBuf};

use salp_route_core::env3d::{point_aabb_distance, point_in_collision};
use salp_route_core::planner::{AlgoParams, Algorithm, CostParams, Scenario, SimConfig};
use salp_route_core::{Aabb, DynamicObstacle, Obstacle, SphereObstacle, Vec3, Workspace};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Scenarios shipped with the crate, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("static_demo", include_str!("../scenarios/static_demo.json")),
    (
        "dynamic_demo",
        include_str!("../scenarios/dynamic_demo.json"),
    ),
];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario is not valid JSON: {0}")]
    Parse(String),
    #[error("scenario does not match the schema: {0}")]
    Schema(String),
    #[error("scenario field `{field}` {message}")]
    Invariant { field: String, message: String },
}

fn violation(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invariant {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub id: String,
    pub workspace: BoxSpec,
    pub start: [f64; 3],
    pub goal: [f64; 3],
    pub num_waypoints: usize,
    pub robot_speed: f64,
    pub sensor_radius: f64,
    pub goal_tolerance: f64,
    pub control_step: f64,
    #[serde(default)]
    pub static_obstacles: Vec<StaticObstacleSpec>,
    #[serde(default)]
    pub dynamic_obstacles: Vec<DynamicObstacleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defaults: Option<Defaults>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum StaticObstacleSpec {
    Block { min: [f64; 3], max: [f64; 3] },
    Sphere { center: [f64; 3], radius: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionSpec {
    #[default]
    ReflectAtBounds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicObstacleSpec {
    pub center: [f64; 3],
    pub radius: f64,
    pub velocity: [f64; 3],
    #[serde(default)]
    pub motion: MotionSpec,
}

/// Optional per-scenario defaults for the optimizer, cost, and simulation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lookahead_steps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sim_time: Option<f64>,
}

/// A validated scenario plus the file-level extras the planner does not need.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedScenario {
    pub id: String,
    pub scenario: Scenario,
    pub defaults: Defaults,
}

impl LoadedScenario {
    pub fn algorithm(&self) -> Algorithm {
        self.defaults
            .algorithm
            .as_deref()
            .and_then(|a| a.parse().ok())
            .unwrap_or(Algorithm::Ssa)
    }

    pub fn population(&self) -> usize {
        self.defaults.population.unwrap_or(20)
    }

    pub fn iterations(&self) -> usize {
        self.defaults.iterations.unwrap_or(25)
    }

    pub fn algo_params(&self) -> AlgoParams {
        AlgoParams::new(self.algorithm(), self.population(), self.iterations())
    }

    pub fn cost_params(&self) -> CostParams {
        let base = CostParams::for_workspace(&self.scenario.workspace);
        CostParams {
            collision_weight: self
                .defaults
                .collision_weight
                .unwrap_or(base.collision_weight),
            smoothness_weight: self
                .defaults
                .smoothness_weight
                .unwrap_or(base.smoothness_weight),
            sample_resolution: self
                .defaults
                .sample_resolution
                .unwrap_or(base.sample_resolution),
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        let base = SimConfig::default();
        SimConfig {
            max_sim_time: self.defaults.max_sim_time.unwrap_or(base.max_sim_time),
            lookahead_steps: self
                .defaults
                .lookahead_steps
                .unwrap_or(base.lookahead_steps),
            clearance: self.defaults.clearance.unwrap_or(base.clearance),
            ..base
        }
    }

    /// The document that loads back into this scenario.
    pub fn to_file(&self) -> ScenarioFile {
        let s = &self.scenario;
        let ws = &s.workspace;
        ScenarioFile {
            version: SCHEMA_VERSION,
            id: self.id.clone(),
            workspace: BoxSpec {
                min: ws.bounds.min.to_array(),
                max: ws.bounds.max.to_array(),
            },
            start: s.start.to_array(),
            goal: s.goal.to_array(),
            num_waypoints: s.num_waypoints,
            robot_speed: s.robot_speed,
            sensor_radius: s.sensor_radius,
            goal_tolerance: s.goal_tolerance,
            control_step: s.control_step,
            static_obstacles: ws
                .static_obstacles
                .iter()
                .map(|o| match o {
                    Obstacle::Block(b) => StaticObstacleSpec::Block {
                        min: b.min.to_array(),
                        max: b.max.to_array(),
                    },
                    Obstacle::Sphere(sp) => StaticObstacleSpec::Sphere {
                        center: sp.center.to_array(),
                        radius: sp.radius,
                    },
                })
                .collect(),
            dynamic_obstacles: ws
                .dynamic_obstacles
                .iter()
                .map(|d| DynamicObstacleSpec {
                    center: d.shape.center.to_array(),
                    radius: d.shape.radius,
                    velocity: d.velocity.to_array(),
                    motion: MotionSpec::ReflectAtBounds,
                })
                .collect(),
            defaults: if self.defaults == Defaults::default() {
                None
            } else {
                Some(self.defaults.clone())
            },
        }
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

fn check_finite(field: &str, v: &[f64]) -> Result<(), ScenarioError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(violation(field, "must be finite"))
    }
}

fn check_box(field: &str, min: [f64; 3], max: [f64; 3]) -> Result<Aabb, ScenarioError> {
    check_finite(&format!("{field}.min"), &min)?;
    check_finite(&format!("{field}.max"), &max)?;
    for k in 0..3 {
        if min[k] >= max[k] {
            return Err(violation(
                format!("{field}.max[{k}]"),
                format!(
                    "must exceed {field}.min[{k}] on the {} axis ({} >= {})",
                    AXES[k], min[k], max[k]
                ),
            ));
        }
    }
    Ok(Aabb {
        min: Vec3::from(min),
        max: Vec3::from(max),
    })
}

fn check_positive(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(violation(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn check_non_negative(field: &str, v: Option<f64>) -> Result<(), ScenarioError> {
    match v {
        Some(v) if !(v.is_finite() && v >= 0.0) => Err(violation(
            field,
            format!("must be non-negative and finite, got {v}"),
        )),
        _ => Ok(()),
    }
}

impl ScenarioFile {
    /// Checks every invariant and builds the planner's view of the scenario.
    pub fn validate(&self) -> Result<LoadedScenario, ScenarioError> {
        if self.version != SCHEMA_VERSION {
            return Err(ScenarioError::Schema(format!(
                "unsupported version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        if self.id.trim().is_empty() {
            return Err(violation("id", "must not be empty"));
        }
        let bounds = check_box("workspace", self.workspace.min, self.workspace.max)?;

        let mut statics = Vec::with_capacity(self.static_obstacles.len());
        for (i, o) in self.static_obstacles.iter().enumerate() {
            let field = format!("static_obstacles[{i}]");
            let obstacle = match o {
                StaticObstacleSpec::Block { min, max } => {
                    let b = check_box(&field, *min, *max)?;
                    if !b.intersects(&bounds) {
                        return Err(violation(field, "lies entirely outside the workspace"));
                    }
                    Obstacle::Block(b)
                }
                StaticObstacleSpec::Sphere { center, radius } => {
                    check_finite(&format!("{field}.center"), center)?;
                    check_positive(&format!("{field}.radius"), *radius)?;
                    let c = Vec3::from(*center);
                    if point_aabb_distance(c, &bounds) > *radius {
                        return Err(violation(field, "lies entirely outside the workspace"));
                    }
                    Obstacle::Sphere(SphereObstacle {
                        center: c,
                        radius: *radius,
                    })
                }
            };
            statics.push(obstacle);
        }

        let mut dynamics = Vec::with_capacity(self.dynamic_obstacles.len());
        for (i, d) in self.dynamic_obstacles.iter().enumerate() {
            let field = format!("dynamic_obstacles[{i}]");
            check_finite(&format!("{field}.center"), &d.center)?;
            check_finite(&format!("{field}.velocity"), &d.velocity)?;
            check_positive(&format!("{field}.radius"), d.radius)?;
            let c = Vec3::from(d.center);
            if !bounds.contains(c) {
                return Err(violation(
                    format!("{field}.center"),
                    "must lie inside the workspace",
                ));
            }
            dynamics.push(DynamicObstacle {
                shape: SphereObstacle {
                    center: c,
                    radius: d.radius,
                },
                velocity: Vec3::from(d.velocity),
                motion: salp_route_core::env3d::MotionModel::ReflectAtBounds,
            });
        }
        let workspace = Workspace {
            bounds,
            static_obstacles: statics,
            dynamic_obstacles: dynamics,
        };

        if self.num_waypoints == 0 {
            return Err(violation("num_waypoints", "must be at least 1"));
        }
        check_positive("robot_speed", self.robot_speed)?;
        check_positive("sensor_radius", self.sensor_radius)?;
        check_positive("goal_tolerance", self.goal_tolerance)?;
        check_positive("control_step", self.control_step)?;

        for (name, p) in [("start", self.start), ("goal", self.goal)] {
            check_finite(name, &p)?;
            let v = Vec3::from(p);
            if !bounds.contains(v) {
                return Err(violation(name, "must lie inside the workspace"));
            }
        }
        // A goal inside an obstacle is left to the planner, which reports it
        // as unreachable.
        if let Some(i) = workspace.static_obstacle_containing(Vec3::from(self.start)) {
            return Err(violation(
                "start",
                format!("lies inside static_obstacles[{i}]"),
            ));
        }
        if point_in_collision(&workspace, Vec3::from(self.start), 0.0) {
            return Err(violation(
                "start",
                "lies inside a dynamic obstacle at t = 0",
            ));
        }

        let defaults = self.defaults.clone().unwrap_or_default();
        if let Some(a) = &defaults.algorithm {
            a.parse::<Algorithm>()
                .map_err(|e| violation("defaults.algorithm", e.to_string()))?;
        }
        if defaults.population == Some(0) {
            return Err(violation("defaults.population", "must be positive"));
        }
        if defaults.iterations == Some(0) {
            return Err(violation("defaults.iterations", "must be positive"));
        }
        check_non_negative("defaults.collision_weight", defaults.collision_weight)?;
        check_non_negative("defaults.smoothness_weight", defaults.smoothness_weight)?;
        check_non_negative("defaults.lookahead_steps", defaults.lookahead_steps)?;
        check_non_negative("defaults.clearance", defaults.clearance)?;
        if let Some(r) = defaults.sample_resolution {
            check_positive("defaults.sample_resolution", r)?;
        }
        if let Some(t) = defaults.max_sim_time {
            check_positive("defaults.max_sim_time", t)?;
        }

        let scenario = Scenario {
            workspace,
            start: Vec3::from(self.start),
            goal: Vec3::from(self.goal),
            num_waypoints: self.num_waypoints,
            robot_speed: self.robot_speed,
            sensor_radius: self.sensor_radius,
            goal_tolerance: self.goal_tolerance,
            control_step: self.control_step,
        };
        scenario
            .validate()
            .map_err(|e| violation("scenario", e.to_string()))?;
        Ok(LoadedScenario {
            id: self.id.clone(),
            scenario,
            defaults,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }
}

/// Parses a document without checking invariants.
pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile, ScenarioError> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            ScenarioError::Schema(e.to_string())
        } else {
            ScenarioError::Parse(e.to_string())
        }
    })
}

pub fn parse_scenario(text: &str) -> Result<LoadedScenario, ScenarioError> {
    parse_scenario_file(text)?.validate()
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<LoadedScenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn save_scenario(loaded: &LoadedScenario, path: impl AsRef<Path>) -> std::io::Result<()> {
    fs::write(path, loaded.to_file().to_json())
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// A path on disk, or the name of a bundled scenario when no such file
/// exists.
pub fn resolve_scenario(name_or_path: &str) -> Result<LoadedScenario, ScenarioError> {
    let path = Path::new(name_or_path);
    if path.exists() {
        return load_scenario(path);
    }
    match bundled(name_or_path) {
        Some(text) => parse_scenario(text),
        None => load_scenario(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "version": 1,
            "id": "t",
            "workspace": {"min": [0, 0, 0], "max": [10, 10, 10]},
            "start": [1, 1, 1],
            "goal": [9, 9, 9],
            "num_waypoints": 2,
            "robot_speed": 1.0,
            "sensor_radius": 3.0,
            "goal_tolerance": 0.5,
            "control_step": 0.5,
            "static_obstacles": [{"shape": "block", "min": [4, 4, 4], "max": [6, 6, 6]}]
        })
    }

    fn load_value(v: serde_json::Value) -> Result<LoadedScenario, ScenarioError> {
        parse_scenario(&v.to_string())
    }

    #[test]
    fn bundled_scenarios_load() {
        for (name, text) in BUNDLED {
            let s = parse_scenario(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&s.id, name);
        }
        let s = resolve_scenario("static_demo").unwrap();
        assert!(s.scenario.workspace.dynamic_obstacles.is_empty());
    }

    #[test]
    fn minimal_loads() {
        let s = load_value(minimal()).unwrap();
        assert_eq!(s.scenario.num_waypoints, 2);
        assert_eq!(s.algorithm(), Algorithm::Ssa);
    }

    #[test]
    fn inverted_axis_is_named() {
        let mut v = minimal();
        v["workspace"]["max"][1] = serde_json::json!(0);
        match load_value(v).unwrap_err() {
            ScenarioError::Invariant { field, message } => {
                assert_eq!(field, "workspace.max[1]");
                assert!(message.contains("y axis"), "{message}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_version_is_schema_error() {
        let mut v = minimal();
        v.as_object_mut().unwrap().remove("version");
        assert!(matches!(load_value(v), Err(ScenarioError::Schema(_))));
    }

    #[test]
    fn wrong_version_is_schema_error() {
        let mut v = minimal();
        v["version"] = serde_json::json!(2);
        assert!(matches!(load_value(v), Err(ScenarioError::Schema(_))));
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v = minimal();
        v["colour"] = serde_json::json!("red");
        assert!(matches!(load_value(v), Err(ScenarioError::Schema(_))));
        let mut v = minimal();
        v["static_obstacles"][0]["colour"] = serde_json::json!("red");
        assert!(matches!(load_value(v), Err(ScenarioError::Schema(_))));
    }

    #[test]
    fn syntax_error_is_parse_error() {
        assert!(matches!(
            parse_scenario("{\"version\": 1,"),
            Err(ScenarioError::Parse(_))
        ));
    }

    #[test]
    fn start_inside_obstacle() {
        let mut v = minimal();
        v["start"] = serde_json::json!([5, 5, 5]);
        match load_value(v).unwrap_err() {
            ScenarioError::Invariant { field, message } => {
                assert_eq!(field, "start");
                assert!(message.contains("static_obstacles[0]"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn gso_default_is_rejected() {
        let mut v = minimal();
        v["defaults"] = serde_json::json!({"algorithm": "gso"});
        match load_value(v).unwrap_err() {
            ScenarioError::Invariant { field, message } => {
                assert_eq!(field, "defaults.algorithm");
                assert!(message.contains("out of scope"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn zero_waypoints_rejected() {
        let mut v = minimal();
        v["num_waypoints"] = serde_json::json!(0);
        assert!(matches!(
            load_value(v),
            Err(ScenarioError::Invariant { field, .. }) if field == "num_waypoints"
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_scenario("/nonexistent/scenario.json"),
            Err(ScenarioError::Io { .. })
        ));
    }
}
