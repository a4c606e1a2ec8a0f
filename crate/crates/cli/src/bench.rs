//! Seeded trial batteries and their statistical summary.
//!
//! A trial is one offline plan; its record carries the best route cost and
//! the optimizer's wall time. Batteries run trials in parallel but always
//! return records in (algorithm, seed) order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use salp_route_core::planner::{plan_static, AlgoParams, Algorithm, CostParams, Scenario};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::MonotonicClock;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub algorithm: String,
    pub population: usize,
    pub iterations: usize,
    /// `NaN` when the trial failed.
    pub best_cost: f64,
    pub time_seconds: f64,
    pub seed: u64,
    pub scenario_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl BenchRecord {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("no records to summarize")]
    Empty,
    #[error("records mix {0}; summaries need one scenario, population and iteration count")]
    Heterogeneous(&'static str),
    #[error("num_seeds must be at least 1")]
    NoSeeds,
}

/// One offline plan. Planner failures are recorded, not dropped.
pub fn run_trial(
    scenario: &Scenario,
    scenario_id: &str,
    algorithm: Algorithm,
    population: usize,
    iterations: usize,
    cost: &CostParams,
    seed: u64,
) -> BenchRecord {
    let params = AlgoParams::new(algorithm, population, iterations);
    run_trial_with(scenario, scenario_id, &params, cost, seed)
}

/// [`run_trial`] with explicit optimizer coefficients.
pub fn run_trial_with(
    scenario: &Scenario,
    scenario_id: &str,
    params: &AlgoParams,
    cost: &CostParams,
    seed: u64,
) -> BenchRecord {
    let clock = MonotonicClock::new();
    let mut record = BenchRecord {
        algorithm: params.algorithm().name().to_string(),
        population: params.population(),
        iterations: params.max_iterations(),
        best_cost: f64::NAN,
        time_seconds: 0.0,
        seed,
        scenario_id: scenario_id.to_string(),
        failure: None,
    };
    match plan_static(scenario, params, cost, seed, &clock) {
        Ok(plan) => {
            record.best_cost = plan.cost;
            record.time_seconds = plan.wall_time_seconds;
        }
        Err(e) => record.failure = Some(e.to_string()),
    }
    record
}

/// Every algorithm on seeds `base_seed .. base_seed + num_seeds`.
#[allow(clippy::too_many_arguments)]
pub fn run_suite(
    scenario: &Scenario,
    scenario_id: &str,
    algorithms: &[Algorithm],
    population: usize,
    iterations: usize,
    cost: &CostParams,
    num_seeds: u64,
    base_seed: u64,
) -> Result<Vec<BenchRecord>, BenchError> {
    let params: Vec<AlgoParams> = algorithms
        .iter()
        .map(|a| AlgoParams::new(*a, population, iterations))
        .collect();
    run_suite_with(scenario, scenario_id, &params, cost, num_seeds, base_seed)
}

pub fn run_suite_with(
    scenario: &Scenario,
    scenario_id: &str,
    params: &[AlgoParams],
    cost: &CostParams,
    num_seeds: u64,
    base_seed: u64,
) -> Result<Vec<BenchRecord>, BenchError> {
    if num_seeds == 0 {
        return Err(BenchError::NoSeeds);
    }
    let jobs: Vec<(&AlgoParams, u64)> = params
        .iter()
        .flat_map(|p| (0..num_seeds).map(move |k| (p, base_seed.wrapping_add(k))))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|(p, seed)| run_trial_with(scenario, scenario_id, p, cost, *seed))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub median: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Order-independent: values are sorted before any arithmetic.
    fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        let mean = v.iter().sum::<f64>() / n as f64;
        Some(Stats {
            median,
            mean,
            min: v[0],
            max: v[n - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub trials: usize,
    pub failures: usize,
    /// Absent when every trial failed.
    pub best_cost: Option<Stats>,
    pub time_seconds: Option<Stats>,
}

/// Paired comparison of `a` against `b` over the seeds both completed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub a: String,
    pub b: String,
    pub paired_seeds: usize,
    /// Seeds where `a` found the strictly lower cost.
    pub a_wins: usize,
    pub b_wins: usize,
    pub ties: usize,
    /// Two-sided sign test; ties are discarded.
    pub p_value: f64,
    /// Algorithm with the lower median cost, or `None` when equal.
    pub lower_median: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub scenario_id: String,
    pub population: usize,
    pub iterations: usize,
    pub algorithms: Vec<AlgorithmSummary>,
    pub pairwise: Vec<PairwiseComparison>,
}

/// Per-algorithm statistics and pairwise sign tests. Algorithms are listed by
/// name, so the result does not depend on record order.
pub fn summarize(records: &[BenchRecord]) -> Result<BenchSummary, BenchError> {
    let first = records.first().ok_or(BenchError::Empty)?;
    if records.iter().any(|r| r.scenario_id != first.scenario_id) {
        return Err(BenchError::Heterogeneous("scenarios"));
    }
    if records.iter().any(|r| r.population != first.population) {
        return Err(BenchError::Heterogeneous("populations"));
    }
    if records.iter().any(|r| r.iterations != first.iterations) {
        return Err(BenchError::Heterogeneous("iteration counts"));
    }

    let mut by_algo: BTreeMap<&str, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        by_algo.entry(r.algorithm.as_str()).or_default().push(r);
    }

    let algorithms: Vec<AlgorithmSummary> = by_algo
        .iter()
        .map(|(name, rs)| {
            let ok: Vec<&&BenchRecord> = rs.iter().filter(|r| r.succeeded()).collect();
            let costs: Vec<f64> = ok.iter().map(|r| r.best_cost).collect();
            let times: Vec<f64> = ok.iter().map(|r| r.time_seconds).collect();
            AlgorithmSummary {
                algorithm: name.to_string(),
                trials: rs.len(),
                failures: rs.len() - ok.len(),
                best_cost: Stats::of(&costs),
                time_seconds: Stats::of(&times),
            }
        })
        .collect();

    let names: Vec<&str> = by_algo.keys().copied().collect();
    let mut pairwise = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            pairwise.push(compare(
                names[i],
                &by_algo[names[i]],
                &algorithms[i],
                names[j],
                &by_algo[names[j]],
                &algorithms[j],
            ));
        }
    }

    Ok(BenchSummary {
        scenario_id: first.scenario_id.clone(),
        population: first.population,
        iterations: first.iterations,
        algorithms,
        pairwise,
    })
}

fn per_seed(rs: &[&BenchRecord]) -> BTreeMap<u64, f64> {
    rs.iter()
        .filter(|r| r.succeeded())
        .map(|r| (r.seed, r.best_cost))
        .collect()
}

fn compare(
    a: &str,
    ra: &[&BenchRecord],
    sa: &AlgorithmSummary,
    b: &str,
    rb: &[&BenchRecord],
    sb: &AlgorithmSummary,
) -> PairwiseComparison {
    let (ca, cb) = (per_seed(ra), per_seed(rb));
    let (mut a_wins, mut b_wins, mut ties, mut paired) = (0, 0, 0, 0);
    for (seed, x) in &ca {
        if let Some(y) = cb.get(seed) {
            paired += 1;
            match x.total_cmp(y) {
                std::cmp::Ordering::Less => a_wins += 1,
                std::cmp::Ordering::Greater => b_wins += 1,
                std::cmp::Ordering::Equal => ties += 1,
            }
        }
    }
    let lower_median = match (&sa.best_cost, &sb.best_cost) {
        (Some(x), Some(y)) if x.median < y.median => Some(a.to_string()),
        (Some(x), Some(y)) if y.median < x.median => Some(b.to_string()),
        _ => None,
    };
    PairwiseComparison {
        a: a.to_string(),
        b: b.to_string(),
        paired_seeds: paired,
        a_wins,
        b_wins,
        ties,
        p_value: sign_test_p(a_wins as u64, b_wins as u64),
        lower_median,
    }
}

/// Two-sided exact sign test: `min(1, 2 * P[X <= min(wins, losses)])` for
/// `X ~ Binomial(wins + losses, 1/2)`.
pub fn sign_test_p(wins: u64, losses: u64) -> f64 {
    let n = wins + losses;
    if n == 0 {
        return 1.0;
    }
    let k = wins.min(losses);
    let ln_half_n = n as f64 * std::f64::consts::LN_2;
    let mut ln_choose = 0.0_f64;
    let mut tail = 0.0_f64;
    for i in 0..=k {
        if i > 0 {
            ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        tail += (ln_choose - ln_half_n).exp();
    }
    (2.0 * tail).min(1.0)
}
