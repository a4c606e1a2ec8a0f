//! Box-bounded continuous minimization by swarm metaheuristics.
//!
//! Three optimizers share one stepping interface ([`SwarmOptimizer`]):
//!
//! * [`ssa`]: the salp swarm chain (one leader chasing the food source,
//!   followers tracking their predecessor).
//! * [`pso`]: global-best particle swarm with constriction constants.
//! * [`fa`]: the firefly algorithm with a decaying random walk.
//!
//! Every run is a pure function of `(objective, bounds, params, seed)`.
//! Populations are visited in ascending index and dimensions in ascending
//! order, so the sequence of random draws is fixed.

use alloc::vec::Vec;
use core::fmt;

use crate::rng::SwarmRng;

pub mod fa;
pub mod pso;
pub mod ssa;

pub use fa::{fa_run, FaParams, FaState};
pub use pso::{pso_run, PsoParams, PsoState};
pub use ssa::{
    coefficient_r1, leader_coordinate, ssa_run, update_followers, update_leader, FollowerMode,
    SsaParams, SsaState,
};

/// A scalar function to minimize.
pub trait Objective {
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn evaluate(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SwarmError {
    InvalidArgument(&'static str),
    /// Bounds with mismatched lengths, zero dimensions, or an inverted axis.
    InvalidBounds {
        dimension: usize,
    },
    InvalidState(&'static str),
    /// The objective returned NaN or an infinity.
    NonFiniteFitness {
        index: usize,
        iteration: usize,
        value: f64,
    },
}

impl fmt::Display for SwarmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwarmError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            SwarmError::InvalidBounds { dimension } => {
                write!(f, "invalid search bounds at dimension {dimension}")
            }
            SwarmError::InvalidState(msg) => write!(f, "invalid swarm state: {msg}"),
            SwarmError::NonFiniteFitness {
                index,
                iteration,
                value,
            } => write!(
                f,
                "objective returned {value} for member {index} at iteration {iteration}"
            ),
        }
    }
}

impl core::error::Error for SwarmError {}

/// Per-dimension box `lower[j] <= x[j] <= upper[j]`.
///
/// Degenerate axes (`lower[j] == upper[j]`) are accepted; they pin that
/// coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SwarmError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(SwarmError::InvalidBounds {
                dimension: lower.len().min(upper.len()),
            });
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(SwarmError::InvalidBounds { dimension: j });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval on every one of `dim` axes.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self, SwarmError> {
        Self::new(alloc::vec![lower; dim], alloc::vec![upper; dim])
    }

    /// `lower`/`upper` repeated `times` times, e.g. a 3D box tiled per waypoint.
    pub fn tiled(lower: &[f64], upper: &[f64], times: usize) -> Result<Self, SwarmError> {
        let lo = lower
            .iter()
            .copied()
            .cycle()
            .take(lower.len() * times)
            .collect();
        let hi = upper
            .iter()
            .copied()
            .cycle()
            .take(upper.len() * times)
            .collect();
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn range(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    /// Uniform point in the box, drawing one value per dimension in order.
    pub(crate) fn sample(&self, rng: &mut SwarmRng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| rng.uniform_in(*lo, *hi))
            .collect()
    }
}

/// Saturates every coordinate into its interval. In-bounds input comes back
/// unchanged.
pub fn clamp_to_bounds(position: &[f64], bounds: &SearchBounds) -> Vec<f64> {
    let mut out = position.to_vec();
    clamp_in_place(&mut out, bounds);
    out
}

pub(crate) fn clamp_in_place(position: &mut [f64], bounds: &SearchBounds) {
    for (v, (lo, hi)) in position
        .iter_mut()
        .zip(bounds.lower.iter().zip(&bounds.upper))
    {
        // NaN saturates to the lower bound.
        *v = if *v >= *hi {
            *hi
        } else if *v >= *lo {
            *v
        } else {
            *lo
        };
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunHistory {
    /// Best-so-far fitness after each completed iteration (length N).
    pub best_fitness_per_iteration: Vec<f64>,
    /// Best fitness of the initial population, before the first iteration.
    pub initial_best_fitness: f64,
    pub evaluations_used: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub history: RunHistory,
}

/// Common stepping interface; one `step` is one full iteration.
pub trait SwarmOptimizer {
    fn step(&mut self) -> Result<(), SwarmError>;

    /// Current population, one row per member.
    fn positions(&self) -> &[Vec<f64>];

    fn best_position(&self) -> &[f64];

    fn best_fitness(&self) -> f64;

    /// Completed iterations.
    fn iteration(&self) -> usize;

    fn max_iterations(&self) -> usize;

    fn history(&self) -> &RunHistory;

    fn is_finished(&self) -> bool {
        self.iteration() >= self.max_iterations()
    }

    fn run_to_end(mut self) -> Result<RunResult, SwarmError>
    where
        Self: Sized,
    {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(RunResult {
            best_position: self.best_position().to_vec(),
            best_fitness: self.best_fitness(),
            history: self.history().clone(),
        })
    }
}

pub(crate) fn evaluate_checked<O: Objective + ?Sized>(
    objective: &O,
    x: &[f64],
    index: usize,
    iteration: usize,
) -> Result<f64, SwarmError> {
    let value = objective.evaluate(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SwarmError::NonFiniteFitness {
            index,
            iteration,
            value,
        })
    }
}

/// Index of the smallest value; the lowest index wins ties.
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Random initial population with optional warm-start rows.
///
/// All `population` rows are drawn first so the random stream does not depend
/// on how many warm rows are supplied; warm rows then overwrite the leading
/// rows after clamping.
pub(crate) fn initial_population(
    bounds: &SearchBounds,
    population: usize,
    warm_start: &[Vec<f64>],
    rng: &mut SwarmRng,
) -> Result<Vec<Vec<f64>>, SwarmError> {
    let mut rows: Vec<Vec<f64>> = (0..population).map(|_| bounds.sample(rng)).collect();
    for (row, warm) in rows.iter_mut().zip(warm_start) {
        if warm.len() != bounds.dim() {
            return Err(SwarmError::InvalidArgument(
                "warm-start row length differs from the search dimension",
            ));
        }
        *row = clamp_to_bounds(warm, bounds);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn clamp_identity_inside() {
        let b = SearchBounds::uniform(3, -1.0, 1.0).unwrap();
        let x = vec![0.5, -0.25, 1.0];
        assert_eq!(clamp_to_bounds(&x, &b), x);
    }

    #[test]
    fn clamp_saturates_above_and_below() {
        let b = SearchBounds::new(vec![0.0, -2.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(clamp_to_bounds(&[1.0 + 5.0, 0.0], &b), vec![1.0, 0.0]);
        assert_eq!(clamp_to_bounds(&[0.5, -2.0 - 0.001], &b), vec![0.5, -2.0]);
    }

    #[test]
    fn bounds_reject_bad_shapes() {
        assert!(SearchBounds::new(vec![], vec![]).is_err());
        assert!(SearchBounds::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert_eq!(
            SearchBounds::new(vec![0.0, 2.0], vec![1.0, 1.0]),
            Err(SwarmError::InvalidBounds { dimension: 1 })
        );
        assert!(SearchBounds::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn tiled_repeats_axes() {
        let b = SearchBounds::tiled(&[0.0, 1.0, 2.0], &[10.0, 11.0, 12.0], 2).unwrap();
        assert_eq!(b.lower(), &[0.0, 1.0, 2.0, 0.0, 1.0, 2.0]);
        assert_eq!(b.upper(), &[10.0, 11.0, 12.0, 10.0, 11.0, 12.0]);
    }

    #[test]
    fn argmin_prefers_lowest_index() {
        assert_eq!(argmin(&[3.0, 1.0, 1.0, 2.0]), 1);
    }
}
