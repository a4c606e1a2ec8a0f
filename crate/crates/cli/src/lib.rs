//! File formats, the benchmark harness, and the `salp-route` command line
//! for [`salp_route_core`].

pub mod bench;
pub mod cli;
pub mod clock;
pub mod output;
pub mod scenario_file;

pub use bench::{run_suite, run_trial, summarize, BenchRecord, BenchSummary};
pub use scenario_file::{
    load_scenario, resolve_scenario, LoadedScenario, ScenarioError, ScenarioFile,
};
