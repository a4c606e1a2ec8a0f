//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; the process exits non-zero if
//! any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use salp_route::{resolve_scenario, run_suite, summarize, LoadedScenario};
use salp_route_core::env3d::{
    segment_intersects_aabb, segment_point_distance, segment_sphere_penetration,
};
use salp_route_core::planner::{
    decode, encode, plan_static, route_cost, simulate_dynamic, NoClock,
};
use salp_route_core::rng::SwarmRng;
use salp_route_core::swarm::{
    coefficient_r1, fa_run, pso_run, ssa_run, update_followers, FaState, PsoState, SsaState,
    SwarmOptimizer,
};
use salp_route_core::{
    Aabb, AlgoParams, Algorithm, CostParams, FaParams, FollowerMode, Obstacle, PsoParams, Route,
    Scenario, SearchBounds, SimOutcome, SimTrace, SphereObstacle, SsaParams, Vec3, Workspace,
};

/// 2 * e^-16, from a 30-digit evaluation.
const TWO_EXP_MINUS_16: f64 = 2.0 * 1.125_351_747_192_591_2e-7;

struct Verdict {
    pass: bool,
    detail: String,
}

type Check = fn() -> Verdict;

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("r1 closed form", r1_closed_form),
        (
            "monotone convergence on the 10-D sphere",
            monotone_convergence,
        ),
        ("bounds invariant fuzz", bounds_fuzz),
        ("plan and bench determinism", cli_determinism),
        ("collision geometry vs dense sampling", collision_oracle),
        ("follower update modes", follower_modes),
        (
            "static_demo: SSA median <= PSO median",
            static_demo_ordering,
        ),
        (
            "dynamic_demo: collision-free goal rate",
            dynamic_demo_success,
        ),
        ("planner identities", planner_identities),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let v = check();
        let secs = started.elapsed().as_secs_f64();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {tag}  {name}  ({}; {secs:.1}s)",
            k + 1,
            v.detail
        );
        if !v.pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn r1_closed_form() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut exact_start = true;
    for n in [1usize, 25, 100, 1_000_000] {
        exact_start &= coefficient_r1(0, n).unwrap() == 2.0;
        let end = coefficient_r1(n, n).unwrap();
        worst = worst.max(((end - TWO_EXP_MINUS_16) / TWO_EXP_MINUS_16).abs());
    }
    verdict(
        exact_start && worst <= 1e-12,
        format!("r1(0,N) == 2: {exact_start}, worst rel err at N: {worst:.2e}"),
    )
}

fn monotone_convergence() -> Verdict {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let bounds = SearchBounds::uniform(10, -5.0, 5.0).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["ssa", "pso", "fa"] {
        let mut worst: f64 = 0.0;
        for seed in 0..20 {
            let run = match name {
                "ssa" => ssa_run(&sphere, &bounds, &SsaParams::new(30, 500), seed),
                "pso" => pso_run(&sphere, &bounds, &PsoParams::new(30, 500), seed),
                _ => fa_run(&sphere, &bounds, &FaParams::new(30, 500), seed),
            }
            .unwrap();
            let h = &run.history;
            let mut prev = h.initial_best_fitness;
            for &f in &h.best_fitness_per_iteration {
                ok &= f <= prev;
                prev = f;
            }
            ok &= h.best_fitness_per_iteration.len() == 500;
            worst = worst.max(run.best_fitness / h.initial_best_fitness);
        }
        ok &= worst < 1e-2;
        notes.push(format!("{name} worst final/initial {worst:.1e}"));
    }
    verdict(ok, notes.join(", "))
}

fn bounds_fuzz() -> Verdict {
    let mut rng = SwarmRng::seed_from(0x5eed);
    let mut violations = 0usize;
    let mut checked_steps = 0usize;
    let objective = |x: &[f64]| {
        x.iter()
            .enumerate()
            .map(|(j, v)| (v - j as f64).powi(2) + 10.0 * (1.0 - (3.0 * v).cos()))
            .sum::<f64>()
    };
    for config in 0..1000u64 {
        let dim = 1 + (rng.uniform() * 8.0) as usize;
        let mut lower = Vec::with_capacity(dim);
        let mut upper = Vec::with_capacity(dim);
        for _ in 0..dim {
            let lo = rng.uniform_in(-1e3, 1e3);
            let width = if rng.uniform() < 0.05 {
                0.0
            } else {
                10f64.powf(rng.uniform_in(-3.0, 3.0))
            };
            lower.push(lo);
            upper.push(lo + width);
        }
        let bounds = SearchBounds::new(lower, upper).unwrap();
        let population = 1 + (rng.uniform() * 15.0) as usize;
        let iterations = 1 + (rng.uniform() * 30.0) as usize;
        let seed = (rng.uniform() * 1e12) as u64;
        let mut check = |opt: &mut dyn SwarmOptimizer| {
            while !opt.is_finished() {
                opt.step().unwrap();
                checked_steps += 1;
                if !opt.positions().iter().all(|p| bounds.contains(p)) {
                    violations += 1;
                }
            }
        };
        match config % 3 {
            0 => {
                let mut p = SsaParams::new(population.max(2), iterations);
                p.follower_mode = if rng.uniform() < 0.5 {
                    FollowerMode::OriginalSsa
                } else {
                    FollowerMode::PaperLiteral
                };
                p.branch_threshold = rng.uniform();
                let mut s = SsaState::new(&objective, &bounds, p, seed).unwrap();
                check(&mut s);
            }
            1 => {
                let mut p = PsoParams::new(population, iterations);
                p.inertia = rng.uniform_in(0.0, 1.2);
                p.cognitive = rng.uniform_in(0.0, 3.0);
                p.social = rng.uniform_in(0.0, 3.0);
                let mut s = PsoState::new(&objective, &bounds, p, seed).unwrap();
                check(&mut s);
            }
            _ => {
                let mut p = FaParams::new(population, iterations);
                p.alpha = rng.uniform_in(0.0, 1.0);
                p.gamma = rng.uniform_in(0.1, 10.0);
                p.beta0 = rng.uniform_in(0.0, 2.0);
                let mut s = FaState::new(&objective, &bounds, p, seed).unwrap();
                check(&mut s);
            }
        }
    }
    verdict(
        violations == 0,
        format!("1000 configurations, {checked_steps} iterations, {violations} out of bounds"),
    )
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_salp-route"))
        .args(args)
        .output()
        .expect("spawn salp-route")
}

/// JSON with every wall-clock field removed.
fn without_timing(path: &Path) -> serde_json::Value {
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(m) => {
                m.retain(|k, _| k != "wall_time_seconds" && k != "time_seconds");
                m.values_mut().for_each(strip);
            }
            serde_json::Value::Array(a) => a.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    strip(&mut v);
    v
}

/// Bench CSV with the `time_seconds` column dropped.
fn bench_csv_without_timing(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "time_seconds").unwrap();
    text.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(col);
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cli_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name);
    let mut ok = true;
    for run in ["a", "b"] {
        let plan = out(&format!("plan_{run}.csv"));
        let bench = out(&format!("bench_{run}.csv"));
        let p = run_cli(&[
            "plan",
            "--scenario",
            "static_demo",
            "--algo",
            "ssa",
            "--pop",
            "20",
            "--iters",
            "25",
            "--seed",
            "7",
            "--out",
            plan.to_str().unwrap(),
        ]);
        let b = run_cli(&[
            "bench",
            "--scenario",
            "static_demo",
            "--algos",
            "ssa,pso,fa",
            "--trials",
            "5",
            "--pop",
            "10",
            "--iters",
            "10",
            "--out",
            bench.to_str().unwrap(),
        ]);
        ok &= p.status.success() && b.status.success();
    }
    if !ok {
        return verdict(false, "a CLI invocation failed");
    }
    let same_plan_csv =
        std::fs::read(out("plan_a.csv")).unwrap() == std::fs::read(out("plan_b.csv")).unwrap();
    let same_plan_json = without_timing(&out("plan_a.json")) == without_timing(&out("plan_b.json"));
    let same_bench_csv = bench_csv_without_timing(&out("bench_a.csv"))
        == bench_csv_without_timing(&out("bench_b.csv"));
    let same_bench_json =
        without_timing(&out("bench_a.json")) == without_timing(&out("bench_b.json"));
    verdict(
        same_plan_csv && same_plan_json && same_bench_csv && same_bench_json,
        format!(
            "plan csv {same_plan_csv}, plan json {same_plan_json}, \
             bench csv {same_bench_csv}, bench json {same_bench_json}"
        ),
    )
}

fn random_point(rng: &mut SwarmRng, lo: f64, hi: f64) -> Vec3 {
    Vec3::new(
        rng.uniform_in(lo, hi),
        rng.uniform_in(lo, hi),
        rng.uniform_in(lo, hi),
    )
}

/// Signed distance to a box: negative inside.
fn box_signed_distance(p: Vec3, b: &Aabb) -> f64 {
    let mut outside = 0.0f64;
    let mut inside = f64::INFINITY;
    for k in 0..3 {
        let d = (b.min[k] - p[k]).max(p[k] - b.max[k]);
        if d > 0.0 {
            outside += d * d;
        }
        inside = inside.min(-d);
    }
    if outside > 0.0 {
        outside.sqrt()
    } else {
        -inside
    }
}

/// Minimum of `f` over `samples + 1` evenly spaced points of the segment.
fn sampled_min(p0: Vec3, p1: Vec3, samples: usize, f: impl Fn(Vec3) -> f64) -> f64 {
    (0..=samples)
        .map(|k| f(p0 + (p1 - p0) * (k as f64 / samples as f64)))
        .fold(f64::INFINITY, f64::min)
}

fn collision_oracle() -> Verdict {
    const CASES: usize = 10_000;
    const SAMPLES: usize = 4_000;
    let diag = (3.0f64 * 14.0 * 14.0).sqrt();
    let tangency = 1e-6 * diag;
    let mut rng = SwarmRng::seed_from(0xc011);

    let (mut box_agree, mut box_used) = (0usize, 0usize);
    for _ in 0..CASES {
        let corner = random_point(&mut rng, 0.0, 8.0);
        let size = random_point(&mut rng, 0.1, 4.0);
        let b = Aabb::new(corner, corner + size).unwrap();
        let (p0, p1) = (
            random_point(&mut rng, -2.0, 12.0),
            random_point(&mut rng, -2.0, 12.0),
        );
        let depth = sampled_min(p0, p1, SAMPLES, |p| box_signed_distance(p, &b));
        if depth.abs() < tangency {
            continue;
        }
        box_used += 1;
        if segment_intersects_aabb(p0, p1, &b) == (depth <= 0.0) {
            box_agree += 1;
        }
    }

    let (mut sphere_agree, mut sphere_used) = (0usize, 0usize);
    for _ in 0..CASES {
        let s = SphereObstacle::new(random_point(&mut rng, 0.0, 10.0), rng.uniform_in(0.1, 4.0))
            .unwrap();
        let (p0, p1) = (
            random_point(&mut rng, -2.0, 12.0),
            random_point(&mut rng, -2.0, 12.0),
        );
        let nearest = sampled_min(p0, p1, SAMPLES, |p| (p - s.center).norm());
        if (nearest - s.radius).abs() < tangency {
            continue;
        }
        sphere_used += 1;
        let hit = segment_point_distance(p0, p1, s.center) <= s.radius;
        let depth = segment_sphere_penetration(p0, p1, &s);
        let step = p0.distance(p1) / SAMPLES as f64;
        let depth_ok = (depth - (s.radius - nearest).max(0.0)).abs() <= step + 1e-9;
        if hit == (nearest <= s.radius) && depth_ok {
            sphere_agree += 1;
        }
    }

    let box_rate = box_agree as f64 / box_used as f64;
    let sphere_rate = sphere_agree as f64 / sphere_used as f64;
    verdict(
        box_rate >= 0.999 && sphere_rate >= 0.999 && box_used > 9_000 && sphere_used > 9_000,
        format!(
            "box {box_agree}/{box_used} ({:.3}%), sphere {sphere_agree}/{sphere_used} ({:.3}%)",
            100.0 * box_rate,
            100.0 * sphere_rate
        ),
    )
}

fn follower_modes() -> Verdict {
    let mut rng = SwarmRng::seed_from(0xf011);
    let mut literal_exact = true;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let m = 2 + (rng.uniform() * 10.0) as usize;
        let d = 1 + (rng.uniform() * 6.0) as usize;
        let chain: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..d).map(|_| rng.uniform_in(-50.0, 50.0)).collect())
            .collect();

        let mut literal = chain.clone();
        update_followers(&mut literal, FollowerMode::PaperLiteral).unwrap();
        literal_exact &= literal[1] == literal[0];

        let mut original = chain.clone();
        update_followers(&mut original, FollowerMode::OriginalSsa).unwrap();
        for i in 1..m {
            for j in 0..d {
                let expected = (chain[i][j] + original[i - 1][j]) / 2.0;
                let rel = (original[i][j] - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
            }
        }
    }
    verdict(
        literal_exact && worst <= 1e-12,
        format!(
            "leader-mean follower 2 == leader: {literal_exact}, original worst rel err {worst:.1e}"
        ),
    )
}

fn bundled(name: &str) -> LoadedScenario {
    resolve_scenario(name).unwrap_or_else(|e| panic!("bundled scenario {name}: {e}"))
}

fn static_demo_ordering() -> Verdict {
    let loaded = bundled("static_demo");
    let records = run_suite(
        &loaded.scenario,
        &loaded.id,
        &[Algorithm::Ssa, Algorithm::Pso],
        20,
        25,
        &loaded.cost_params(),
        30,
        1,
    )
    .unwrap();
    let summary = summarize(&records).unwrap();
    let median = |name: &str| {
        summary
            .algorithms
            .iter()
            .find(|a| a.algorithm == name)
            .and_then(|a| a.best_cost.as_ref())
            .map(|s| s.median)
            .unwrap_or(f64::NAN)
    };
    let (ssa, pso) = (median("ssa"), median("pso"));
    let pair = &summary.pairwise[0];
    verdict(
        ssa <= pso,
        format!(
            "median ssa {ssa:.4e}, pso {pso:.4e}; {} {} wins vs {} {} wins, sign test p = {:.2e}",
            pair.a, pair.a_wins, pair.b, pair.b_wins, pair.p_value
        ),
    )
}

/// Obstacle center at time `t` for a sphere bouncing between the walls,
/// obtained by unfolding the motion onto a circle of length twice the span.
fn bounced_center(center: Vec3, velocity: Vec3, bounds: &Aabb, t: f64) -> Vec3 {
    let mut out = center;
    for k in 0..3 {
        let span = bounds.max[k] - bounds.min[k];
        let u = (center[k] - bounds.min[k] + velocity[k] * t).rem_euclid(2.0 * span);
        let folded = if u > span { 2.0 * span - u } else { u };
        match k {
            0 => out.x = bounds.min[k] + folded,
            1 => out.y = bounds.min[k] + folded,
            _ => out.z = bounds.min[k] + folded,
        }
    }
    out
}

/// Re-checks a trace against the true world at ten sub-steps per control
/// step, interpolating the robot linearly between recorded samples.
fn trace_collides(trace: &SimTrace, world: &Workspace) -> bool {
    let hits = |p: Vec3, t: f64| {
        world.static_obstacles.iter().any(|o| match o {
            Obstacle::Block(b) => (0..3).all(|k| b.min[k] <= p[k] && p[k] <= b.max[k]),
            Obstacle::Sphere(s) => (p - s.center).norm() <= s.radius,
        }) || world.dynamic_obstacles.iter().any(|d| {
            let c = bounced_center(d.shape.center, d.velocity, &world.bounds, t);
            (p - c).norm() <= d.shape.radius
        })
    };
    trace.samples.windows(2).any(|w| {
        (0..=10).any(|k| {
            let s = k as f64 / 10.0;
            hits(
                w[0].position + (w[1].position - w[0].position) * s,
                w[0].t + (w[1].t - w[0].t) * s,
            )
        })
    })
}

fn dynamic_demo_success() -> Verdict {
    let loaded = bundled("dynamic_demo");
    let params = loaded.algo_params();
    let cost = loaded.cost_params();
    let config = loaded.sim_config();
    let mut successes = 0;
    let mut outcomes = Vec::new();
    for seed in 1..=30u64 {
        let trace = simulate_dynamic(&loaded.scenario, &params, &cost, seed, &config).unwrap();
        let clean = !trace_collides(&trace, &loaded.scenario.workspace);
        if trace.outcome == SimOutcome::GoalReached && trace.collision_count() == 0 && clean {
            successes += 1;
        } else {
            outcomes.push(format!(
                "seed {seed}: {:?}, checker clean {clean}",
                trace.outcome
            ));
        }
    }
    let rate = successes as f64 / 30.0;
    let mut detail = format!("{successes}/30 collision-free goal arrivals");
    if !outcomes.is_empty() {
        detail.push_str(&format!("; {}", outcomes.join("; ")));
    }
    verdict(rate >= 0.9, detail)
}

fn planner_identities() -> Verdict {
    let mut rng = SwarmRng::seed_from(0x1de7);
    let bounds = Aabb::new(Vec3::new(-20.0, 0.0, 5.0), Vec3::new(80.0, 50.0, 30.0)).unwrap();
    let mut round_trip = true;
    let mut worst_length: f64 = 0.0;
    let zero = CostParams {
        collision_weight: 0.0,
        smoothness_weight: 0.0,
        sample_resolution: 1.0,
    };
    let workspace = Workspace::empty(bounds);
    for _ in 0..1000 {
        let w = (rng.uniform() * 12.0) as usize;
        let points: Vec<Vec3> = (0..w + 2)
            .map(|_| {
                Vec3::new(
                    rng.uniform_in(-20.0, 80.0),
                    rng.uniform_in(0.0, 50.0),
                    rng.uniform_in(5.0, 30.0),
                )
            })
            .collect();
        let route = Route { points };
        let scenario = Scenario {
            workspace: workspace.clone(),
            start: route.start(),
            goal: route.goal(),
            num_waypoints: w,
            robot_speed: 1.0,
            sensor_radius: 10.0,
            goal_tolerance: 0.5,
            control_step: 0.5,
        };
        round_trip &= decode(&encode(&route), &scenario)
            .map(|r| r == route)
            .unwrap_or(false);

        let expected: f64 = route
            .points
            .windows(2)
            .map(|s| {
                let d = s[1] - s[0];
                (d.x * d.x + d.y * d.y + d.z * d.z).sqrt()
            })
            .sum();
        let got = route_cost(&route, &workspace, &zero, 0.0, 1.0);
        worst_length = worst_length.max((got - expected).abs() / expected.max(f64::MIN_POSITIVE));
    }

    let mut worst_replay: f64 = 0.0;
    for name in ["static_demo", "dynamic_demo"] {
        let loaded = bundled(name);
        let cost = loaded.cost_params();
        for algorithm in Algorithm::ALL {
            for seed in 1..=3 {
                let params = AlgoParams::new(algorithm, 12, 15);
                let plan = plan_static(&loaded.scenario, &params, &cost, seed, &NoClock).unwrap();
                let replay = route_cost(
                    &plan.route,
                    &loaded.scenario.workspace,
                    &cost,
                    0.0,
                    loaded.scenario.robot_speed,
                );
                worst_replay = worst_replay.max((plan.cost - replay).abs() / replay.abs());
            }
        }
    }
    verdict(
        round_trip && worst_length <= 1e-9 && worst_replay <= 1e-12,
        format!(
            "round trip {round_trip}, length rel err {worst_length:.1e}, \
             plan cost replay rel err {worst_replay:.1e}"
        ),
    )
}
