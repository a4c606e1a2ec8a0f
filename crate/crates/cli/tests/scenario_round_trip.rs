use proptest::prelude::*;
use salp_route::scenario_file::{
    load_scenario, parse_scenario_file, save_scenario, BoxSpec, DynamicObstacleSpec, MotionSpec,
    StaticObstacleSpec, BUNDLED,
};
use salp_route::ScenarioFile;

fn round_trip(file: &ScenarioFile) -> ScenarioFile {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    std::fs::write(&first, file.to_json()).unwrap();
    let loaded = load_scenario(&first).unwrap();
    let second = dir.path().join("b.json");
    save_scenario(&loaded, &second).unwrap();
    parse_scenario_file(&std::fs::read_to_string(&second).unwrap()).unwrap()
}

#[test]
fn bundled_scenarios_survive_save_and_load() {
    for (name, text) in BUNDLED {
        let file = parse_scenario_file(text).unwrap();
        assert_eq!(round_trip(&file), file, "{name}");
    }
}

fn scenario_strategy() -> impl Strategy<Value = ScenarioFile> {
    let block =
        (0.0f64..80.0, 0.0f64..80.0, 0.0f64..40.0, 1.0f64..15.0).prop_map(|(x, y, z, s)| {
            StaticObstacleSpec::Block {
                min: [x + 10.0, y + 10.0, z],
                max: [x + 10.0 + s, y + 10.0 + s, z + s],
            }
        });
    let sphere =
        (15.0f64..95.0, 15.0f64..95.0, 0.0f64..50.0, 0.5f64..8.0).prop_map(|(x, y, z, r)| {
            StaticObstacleSpec::Sphere {
                center: [x, y, z],
                radius: r,
            }
        });
    let mover = (
        15.0f64..95.0,
        15.0f64..95.0,
        0.0f64..50.0,
        0.5f64..5.0,
        -3.0f64..3.0,
    )
        .prop_map(|(x, y, z, r, v)| DynamicObstacleSpec {
            center: [x, y, z],
            radius: r,
            velocity: [v, -v / 2.0, 0.25],
            motion: MotionSpec::ReflectAtBounds,
        });
    (
        prop::collection::vec(prop_oneof![block, sphere], 0..6),
        prop::collection::vec(mover, 0..4),
        1usize..8,
        0.1f64..5.0,
    )
        .prop_map(|(statics, dynamics, w, speed)| ScenarioFile {
            version: 1,
            id: "generated".into(),
            workspace: BoxSpec {
                min: [0.0, 0.0, 0.0],
                max: [100.0, 100.0, 50.0],
            },
            start: [2.0, 2.0, 2.0],
            goal: [98.0, 98.0, 48.0],
            num_waypoints: w,
            robot_speed: speed,
            sensor_radius: 12.5,
            goal_tolerance: 1.0,
            control_step: 0.25,
            static_obstacles: statics,
            dynamic_obstacles: dynamics,
            defaults: None,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_scenarios_survive_save_and_load(file in scenario_strategy()) {
        prop_assert_eq!(round_trip(&file), file);
    }
}
