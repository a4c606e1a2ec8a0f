//! `salp-route plan | simulate | bench`.
//!
//! Data goes to `--out` (or stdout when omitted); diagnostics go to stderr.
//! Exit codes: 0 success, 1 bad arguments, 2 bad scenario, 3 runtime failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use salp_route_core::planner::{
    plan_static, simulate_dynamic, AlgoParams, Algorithm, PlanError, SimOutcome, TraceEvent,
};
use salp_route_core::swarm::FollowerMode;
use serde::Serialize;

use crate::bench::{run_suite_with, summarize};
use crate::clock::MonotonicClock;
use crate::output::{write_bench_csv, write_route_csv, write_trace_csv};
use crate::scenario_file::{resolve_scenario, LoadedScenario, ScenarioError};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SCENARIO: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "salp-route",
    version,
    about = "Swarm-optimized 3D route planning: plan, simulate, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Plan one route offline and write it as x,y,z rows.
    Plan(CommonArgs),
    /// Run the sense/plan/avoid loop and write the t,x,y,z,event trace.
    Simulate(SimulateArgs),
    /// Run seeded trial batteries and write per-trial records.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Scenario file, or the name of a bundled scenario (static_demo, dynamic_demo).
    #[arg(long)]
    scenario: String,
    /// Optimizer: ssa, pso or fa. Defaults to the scenario's choice, else ssa.
    #[arg(long, value_parser = parse_algorithm)]
    algo: Option<Algorithm>,
    /// Population size.
    #[arg(long)]
    pop: Option<usize>,
    /// Iterations per optimization.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; stdout when omitted. A JSON companion is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Salp follower update rule.
    #[arg(long, value_enum, default_value_t = FollowerArg::Original)]
    follower_mode: FollowerArg,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Simulated seconds before timing out.
    #[arg(long)]
    max_time: Option<f64>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated optimizers; defaults to --algo, else ssa,pso,fa.
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    algos: Option<Vec<Algorithm>>,
    /// Seeds per algorithm, starting at --seed.
    #[arg(long, default_value_t = 30)]
    trials: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FollowerArg {
    Original,
    LeaderMean,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse::<Algorithm>().map_err(|e| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Scenario(ScenarioError),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Scenario(_) => EXIT_SCENARIO,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
            CliError::Scenario(e) => write!(f, "{e}"),
        }
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::InvalidScenario(_) | PlanError::Env(_) => {
                CliError::Scenario(ScenarioError::Invariant {
                    field: "scenario".into(),
                    message: e.to_string(),
                })
            }
            PlanError::InvalidArgument(_) => CliError::Usage(e.to_string()),
            PlanError::Unreachable(_) | PlanError::Swarm(_) => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_error(path: Option<&Path>, e: io::Error) -> CliError {
    match path {
        Some(p) => CliError::Runtime(format!("cannot write {}: {e}", p.display())),
        None => CliError::Runtime(format!("cannot write output: {e}")),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Plan(a) => cmd_plan(&a, stdout),
        Command::Simulate(a) => cmd_simulate(&a, stdout, stderr),
        Command::Bench(a) => cmd_bench(&a, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(args: &CommonArgs) -> Result<LoadedScenario, CliError> {
    resolve_scenario(&args.scenario).map_err(CliError::Scenario)
}

fn algo_params(
    args: &CommonArgs,
    loaded: &LoadedScenario,
    algorithm: Algorithm,
) -> Result<AlgoParams, CliError> {
    let population = args.pop.unwrap_or_else(|| loaded.population());
    let iterations = args.iters.unwrap_or_else(|| loaded.iterations());
    let mut params = AlgoParams::new(algorithm, population, iterations);
    let check = match &mut params {
        AlgoParams::Ssa(p) => {
            p.follower_mode = match args.follower_mode {
                FollowerArg::Original => FollowerMode::OriginalSsa,
                FollowerArg::LeaderMean => FollowerMode::PaperLiteral,
            };
            p.validate()
        }
        AlgoParams::Pso(p) => p.validate(),
        AlgoParams::Fa(p) => p.validate(),
    };
    check.map_err(|e| CliError::Usage(format!("--pop/--iters: {e}")))?;
    Ok(params)
}

/// `route.csv` -> `route.json`; a `.json` data file gets `.result.json`.
fn companion_json(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("result.json")
    } else {
        out.with_extension("json")
    }
}

fn write_data(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    render: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(Some(path), e))?;
            let mut w = BufWriter::new(file);
            render(&mut w).map_err(|e| io_error(Some(path), e))?;
            w.flush().map_err(|e| io_error(Some(path), e))
        }
        None => render(stdout).map_err(|e| io_error(None, e)),
    }
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let Some(out) = out else {
        return Ok(());
    };
    let path = companion_json(out);
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("cannot encode JSON: {e}")))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| io_error(Some(&path), e))
}

#[derive(Serialize)]
struct PlanReport<'a> {
    scenario_id: &'a str,
    algorithm: &'a str,
    population: usize,
    iterations: usize,
    seed: u64,
    cost: f64,
    initial_best_cost: f64,
    evaluations: u64,
    wall_time_seconds: f64,
    history: &'a [f64],
    route: Vec<[f64; 3]>,
}

fn cmd_plan(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let loaded = load(args)?;
    let algorithm = args.algo.unwrap_or_else(|| loaded.algorithm());
    let params = algo_params(args, &loaded, algorithm)?;
    let cost = loaded.cost_params();
    let plan = plan_static(
        &loaded.scenario,
        &params,
        &cost,
        args.seed,
        &MonotonicClock::new(),
    )?;
    write_data(args.out.as_deref(), stdout, |w| {
        write_route_csv(w, &plan.route)
    })?;
    write_json(
        args.out.as_deref(),
        &PlanReport {
            scenario_id: &loaded.id,
            algorithm: algorithm.name(),
            population: params.population(),
            iterations: params.max_iterations(),
            seed: args.seed,
            cost: plan.cost,
            initial_best_cost: plan.history.initial_best_fitness,
            evaluations: plan.history.evaluations_used,
            wall_time_seconds: plan.wall_time_seconds,
            history: &plan.history.best_fitness_per_iteration,
            route: plan.route.points.iter().map(|p| p.to_array()).collect(),
        },
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct ReplanReport {
    t: f64,
    trigger: &'static str,
    position: [f64; 3],
}

#[derive(Serialize)]
struct SimReport<'a> {
    scenario_id: &'a str,
    algorithm: &'a str,
    population: usize,
    iterations: usize,
    seed: u64,
    outcome: &'static str,
    final_time: f64,
    steps: usize,
    collisions: usize,
    replans: Vec<ReplanReport>,
}

fn outcome_label(o: SimOutcome) -> &'static str {
    match o {
        SimOutcome::GoalReached => "goal_reached",
        SimOutcome::Timeout => "timeout",
        SimOutcome::Unreachable => "unreachable",
        SimOutcome::Collision => "collision",
    }
}

fn cmd_simulate(
    args: &SimulateArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let common = &args.common;
    let loaded = load(common)?;
    let algorithm = common.algo.unwrap_or_else(|| loaded.algorithm());
    let params = algo_params(common, &loaded, algorithm)?;
    let mut config = loaded.sim_config();
    if let Some(t) = args.max_time {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage("--max-time must be positive".into()));
        }
        config.max_sim_time = t;
    }
    let trace = simulate_dynamic(
        &loaded.scenario,
        &params,
        &loaded.cost_params(),
        common.seed,
        &config,
    )?;
    write_data(common.out.as_deref(), stdout, |w| {
        write_trace_csv(w, &trace)
    })?;
    write_json(
        common.out.as_deref(),
        &SimReport {
            scenario_id: &loaded.id,
            algorithm: algorithm.name(),
            population: params.population(),
            iterations: params.max_iterations(),
            seed: common.seed,
            outcome: outcome_label(trace.outcome),
            final_time: trace.final_time(),
            steps: trace.samples.len() - 1,
            collisions: trace.collision_count(),
            replans: trace
                .replans
                .iter()
                .map(|r| ReplanReport {
                    t: r.t,
                    trigger: TraceEvent::Replan(r.trigger).label(),
                    position: r.position.to_array(),
                })
                .collect(),
        },
    )?;
    let _ = writeln!(
        stderr,
        "{}: {} at t = {:.3} s after {} replans",
        loaded.id,
        outcome_label(trace.outcome),
        trace.final_time(),
        trace.replans.len()
    );
    if trace.outcome == SimOutcome::Unreachable {
        return Err(CliError::Runtime(
            "no collision-free route around known obstacles".into(),
        ));
    }
    Ok(0)
}

fn cmd_bench(
    args: &BenchArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let common = &args.common;
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let loaded = load(common)?;
    let algorithms = match (&args.algos, common.algo) {
        (Some(list), _) if !list.is_empty() => list.clone(),
        (_, Some(a)) => vec![a],
        _ => Algorithm::ALL.to_vec(),
    };
    let params = algorithms
        .iter()
        .map(|a| algo_params(common, &loaded, *a))
        .collect::<Result<Vec<_>, _>>()?;
    let records = run_suite_with(
        &loaded.scenario,
        &loaded.id,
        &params,
        &loaded.cost_params(),
        args.trials,
        common.seed,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    write_data(common.out.as_deref(), stdout, |w| {
        write_bench_csv(w, &records)
    })?;
    let summary = summarize(&records).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_json(common.out.as_deref(), &summary)?;
    for a in &summary.algorithms {
        if let Some(c) = &a.best_cost {
            let _ = writeln!(
                stderr,
                "{:>4}  median cost {:.6e}  mean {:.6e}  ({} trials, {} failed)",
                a.algorithm, c.median, c.mean, a.trials, a.failures
            );
        }
    }
    for p in &summary.pairwise {
        let _ = writeln!(
            stderr,
            "{} vs {}: {}-{} (ties {}), sign test p = {:.4}",
            p.a, p.b, p.a_wins, p.b_wins, p.ties, p.p_value
        );
    }
    if summary.algorithms.iter().any(|a| a.failures > 0) {
        let _ = writeln!(stderr, "warning: some trials failed; see the JSON summary");
    }
    Ok(0)
}
