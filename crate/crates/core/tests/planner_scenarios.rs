use proptest::prelude::*;
use salp_route_core::env3d::collision_measure;
use salp_route_core::planner::{
    plan_static, route_cost, simulate_dynamic, NoClock, ReplanTrigger, TraceEvent,
};
use salp_route_core::{
    Aabb, AlgoParams, Algorithm, CostParams, DynamicObstacle, Obstacle, PlanError, Route, Scenario,
    SimConfig, SimOutcome, SphereObstacle, Vec3, Workspace,
};

fn block(min: [f64; 3], max: [f64; 3]) -> Obstacle {
    Obstacle::Block(Aabb::new(Vec3::from_array(min), Vec3::from_array(max)).unwrap())
}

fn scenario(workspace: Workspace, start: Vec3, goal: Vec3) -> Scenario {
    Scenario {
        workspace,
        start,
        goal,
        num_waypoints: 4,
        robot_speed: 2.0,
        sensor_radius: 10.0,
        goal_tolerance: 1.0,
        control_step: 0.5,
    }
}

fn cube(side: f64) -> Aabb {
    Aabb::new(Vec3::ZERO, Vec3::new(side, side, side)).unwrap()
}

/// A wall across x = 48..52 with a 20 x 20 opening at y 40..60, z 20..40.
fn wall_with_gap() -> Scenario {
    let statics = vec![
        block([48.0, 0.0, 0.0], [52.0, 40.0, 60.0]),
        block([48.0, 60.0, 0.0], [52.0, 100.0, 60.0]),
        block([48.0, 40.0, 0.0], [52.0, 60.0, 20.0]),
        block([48.0, 40.0, 40.0], [52.0, 60.0, 60.0]),
    ];
    let bounds = Aabb::new(Vec3::ZERO, Vec3::new(100.0, 100.0, 60.0)).unwrap();
    let mut s = scenario(
        Workspace::new(bounds, statics, vec![]).unwrap(),
        Vec3::new(10.0, 20.0, 10.0),
        Vec3::new(90.0, 80.0, 50.0),
    );
    s.num_waypoints = 3;
    s
}

fn cost_for(s: &Scenario) -> CostParams {
    CostParams::for_workspace(&s.workspace)
}

/// Two interior waypoints: a reference salp chain at 20 x 100 stays within 5%
/// of the straight line only up to W = 2 (median ratio 1.003; W = 4 gives 1.23).
#[test]
fn empty_workspace_plans_near_straight_line() {
    let mut s = scenario(
        Workspace::empty(cube(100.0)),
        Vec3::new(10.0, 10.0, 10.0),
        Vec3::new(90.0, 70.0, 40.0),
    );
    s.num_waypoints = 2;
    let straight = s.start.distance(s.goal);
    let mut costs: Vec<f64> = (0..10)
        .map(|seed| {
            plan_static(
                &s,
                &AlgoParams::new(Algorithm::Ssa, 20, 100),
                &cost_for(&s),
                seed,
                &NoClock,
            )
            .unwrap()
            .cost
        })
        .collect();
    costs.sort_by(f64::total_cmp);
    let median = 0.5 * (costs[4] + costs[5]);
    assert!(
        median <= 1.05 * straight,
        "median {median} vs straight {straight}"
    );
}

#[test]
fn goal_inside_obstacle_is_unreachable() {
    let w = Workspace::new(
        cube(100.0),
        vec![block([60.0, 60.0, 60.0], [80.0, 80.0, 80.0])],
        vec![],
    )
    .unwrap();
    let s = scenario(w, Vec3::new(10.0, 10.0, 10.0), Vec3::new(70.0, 70.0, 70.0));
    let err = plan_static(
        &s,
        &AlgoParams::new(Algorithm::Pso, 10, 10),
        &cost_for(&s),
        1,
        &NoClock,
    )
    .unwrap_err();
    assert!(matches!(err, PlanError::Unreachable(_)));
}

#[test]
fn wall_gap_is_usually_found() {
    let s = wall_with_gap();
    let cost = cost_for(&s);
    let clear = (0..30)
        .filter(|&seed| {
            let plan = plan_static(
                &s,
                &AlgoParams::new(Algorithm::Ssa, 20, 100),
                &cost,
                seed,
                &NoClock,
            )
            .unwrap();
            collision_measure(
                &plan.route.points,
                &s.workspace,
                0.0,
                s.robot_speed,
                cost.sample_resolution,
            ) == 0.0
        })
        .count();
    assert!(clear >= 24, "{clear}/30 collision-free");
}

#[test]
fn reported_cost_matches_route() {
    let s = wall_with_gap();
    let cost = cost_for(&s);
    for algorithm in Algorithm::ALL {
        let plan =
            plan_static(&s, &AlgoParams::new(algorithm, 10, 20), &cost, 3, &NoClock).unwrap();
        assert_eq!(
            plan.cost,
            route_cost(&plan.route, &s.workspace, &cost, 0.0, s.robot_speed)
        );
        assert_eq!(plan.route.points.len(), s.num_waypoints + 2);
        assert_eq!(plan.route.start(), s.start);
        assert_eq!(plan.route.goal(), s.goal);
    }
}

#[test]
fn open_space_simulation_flies_straight_to_goal() {
    let mut s = scenario(
        Workspace::empty(cube(100.0)),
        Vec3::new(10.0, 10.0, 10.0),
        Vec3::new(90.0, 10.0, 10.0),
    );
    s.num_waypoints = 2;
    let trace = simulate_dynamic(
        &s,
        &AlgoParams::new(Algorithm::Ssa, 20, 100),
        &cost_for(&s),
        4,
        &SimConfig::default(),
    )
    .unwrap();
    assert_eq!(trace.outcome, SimOutcome::GoalReached);
    assert!(trace.replans.is_empty());
    let nominal = s.start.distance(s.goal) / s.robot_speed;
    let t = trace.final_time();
    assert!(t >= 0.9 * nominal && t <= 1.1 * nominal, "{t} vs {nominal}");
}

#[test]
fn wall_sensed_mid_flight_triggers_replan() {
    let w = Workspace::new(
        cube(100.0),
        vec![block([48.0, 0.0, 0.0], [52.0, 60.0, 100.0])],
        vec![],
    )
    .unwrap();
    let s = scenario(w, Vec3::new(10.0, 20.0, 20.0), Vec3::new(90.0, 20.0, 20.0));
    let trace = simulate_dynamic(
        &s,
        &AlgoParams::new(Algorithm::Ssa, 20, 40),
        &cost_for(&s),
        2,
        &SimConfig::default(),
    )
    .unwrap();
    let first = trace
        .replans
        .iter()
        .find(|r| r.trigger == ReplanTrigger::NewObstacleSensed)
        .expect("wall should be sensed");
    assert!(first.t > 0.0);
    assert!(trace
        .samples
        .iter()
        .any(|p| p.event == TraceEvent::Replan(ReplanTrigger::NewObstacleSensed)));
}

#[test]
fn fully_known_static_world_follows_the_offline_plan() {
    let mut s = wall_with_gap();
    s.sensor_radius = 2.0 * s.workspace.bounds.diagonal();
    let params = AlgoParams::new(Algorithm::Ssa, 20, 100);
    let cost = cost_for(&s);
    for seed in 0..5 {
        let plan = plan_static(&s, &params, &cost, seed, &NoClock).unwrap();
        let trace = simulate_dynamic(&s, &params, &cost, seed, &SimConfig::default()).unwrap();
        assert_eq!(trace.initial_route, plan.route);
        if collision_measure(
            &plan.route.points,
            &s.workspace,
            0.0,
            s.robot_speed,
            cost.sample_resolution,
        ) == 0.0
        {
            assert!(trace.replans.is_empty(), "seed {seed}");
            assert_eq!(trace.outcome, SimOutcome::GoalReached);
        }
    }
}

#[test]
fn trace_stays_in_bounds_and_under_speed() {
    let mut s = wall_with_gap();
    s.workspace.dynamic_obstacles.push(
        DynamicObstacle::new(
            SphereObstacle::new(Vec3::new(70.0, 70.0, 30.0), 4.0).unwrap(),
            Vec3::new(-1.0, 0.5, 0.2),
        )
        .unwrap(),
    );
    let trace = simulate_dynamic(
        &s,
        &AlgoParams::new(Algorithm::Pso, 15, 30),
        &cost_for(&s),
        9,
        &SimConfig::default(),
    )
    .unwrap();
    let step = s.robot_speed * s.control_step;
    for w in trace.samples.windows(2) {
        assert!(s.workspace.bounds.contains(w[1].position));
        assert!(w[0].position.distance(w[1].position) <= step * (1.0 + 1e-9));
    }
}

#[test]
fn simulation_is_deterministic() {
    let s = wall_with_gap();
    let params = AlgoParams::new(Algorithm::Fa, 10, 20);
    let run = || simulate_dynamic(&s, &params, &cost_for(&s), 11, &SimConfig::default()).unwrap();
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn route_cost_is_translation_invariant(
        interior in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0, 0.0f64..60.0), 1..5),
        shift in (-500.0f64..500.0, -500.0f64..500.0, -500.0f64..500.0),
        t0 in 0.0f64..30.0,
        smooth in 0.0f64..5.0,
    ) {
        let mut s = wall_with_gap();
        s.workspace.dynamic_obstacles.push(
            DynamicObstacle::new(
                SphereObstacle::new(Vec3::new(30.0, 50.0, 30.0), 6.0).unwrap(),
                Vec3::new(2.0, -1.0, 0.5),
            )
            .unwrap(),
        );
        let mut points = vec![s.start];
        points.extend(interior.iter().map(|&(x, y, z)| Vec3::new(x, y, z)));
        points.push(s.goal);
        let route = Route { points };
        let by = Vec3::new(shift.0, shift.1, shift.2);
        let moved = Route { points: route.points.iter().map(|&p| p + by).collect() };
        let cost = CostParams { smoothness_weight: smooth, ..cost_for(&s) };
        let a = route_cost(&route, &s.workspace, &cost, t0, s.robot_speed);
        let b = route_cost(&moved, &s.workspace.translated(by), &cost, t0, s.robot_speed);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
    }
}

#[test]
fn blocked_goal_ends_simulation_as_unreachable() {
    let w = Workspace::new(
        cube(100.0),
        vec![block([60.0, 60.0, 60.0], [80.0, 80.0, 80.0])],
        vec![],
    )
    .unwrap();
    let s = scenario(w, Vec3::new(10.0, 10.0, 10.0), Vec3::new(70.0, 70.0, 70.0));
    let trace = simulate_dynamic(
        &s,
        &AlgoParams::new(Algorithm::Ssa, 10, 10),
        &cost_for(&s),
        1,
        &SimConfig::default(),
    )
    .unwrap();
    assert_eq!(trace.outcome, SimOutcome::Unreachable);
    assert_eq!(trace.samples.len(), 1);
}

#[test]
fn start_inside_obstacle_is_invalid() {
    let w = Workspace::new(
        cube(100.0),
        vec![block([0.0, 0.0, 0.0], [20.0, 20.0, 20.0])],
        vec![],
    )
    .unwrap();
    let s = scenario(w, Vec3::new(10.0, 10.0, 10.0), Vec3::new(70.0, 70.0, 70.0));
    let err = simulate_dynamic(
        &s,
        &AlgoParams::new(Algorithm::Ssa, 10, 10),
        &cost_for(&s),
        1,
        &SimConfig::default(),
    )
    .unwrap_err();
    assert!(matches!(err, PlanError::InvalidScenario(_)));
}
