//! Firefly algorithm.
//!
//! A firefly moves toward every brighter (lower-fitness) firefly with
//! attractiveness `beta0 * exp(-gamma * r^2)` plus a uniform jitter. The
//! distance `r` is measured after dividing each axis by its range, so
//! `gamma` does not depend on the units of the search space. A firefly
//! with no brighter neighbour takes a pure random walk. The jitter scale is
//! `alpha * (upper - lower)` per dimension and shrinks geometrically by
//! `alpha_decay` each iteration.
//!
//! Brightness is frozen at the start of an iteration; positions are updated
//! in place, so later moves see earlier ones. Draw order: per firefly `i`
//! ascending, per brighter `k` ascending, one draw per dimension.

use alloc::vec::Vec;

use super::{
    argmin, clamp_in_place, evaluate_checked, initial_population, Objective, RunHistory, RunResult,
    SearchBounds, SwarmError, SwarmOptimizer,
};
use crate::rng::SwarmRng;

#[derive(Clone, Debug, PartialEq)]
pub struct FaParams {
    pub population: usize,
    pub max_iterations: usize,
    /// Random-walk scale as a fraction of each axis' range.
    pub alpha: f64,
    /// Multiplier applied to `alpha` after every iteration.
    pub alpha_decay: f64,
    pub beta0: f64,
    pub gamma: f64,
}

impl Default for FaParams {
    fn default() -> Self {
        Self {
            population: 20,
            max_iterations: 25,
            alpha: 0.2,
            alpha_decay: 0.97,
            beta0: 1.0,
            gamma: 1.0,
        }
    }
}

impl FaParams {
    pub fn new(population: usize, max_iterations: usize) -> Self {
        Self {
            population,
            max_iterations,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SwarmError> {
        if self.population == 0 {
            return Err(SwarmError::InvalidArgument("population must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(SwarmError::InvalidArgument(
                "max_iterations must be positive",
            ));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(SwarmError::InvalidArgument("alpha must be finite and >= 0"));
        }
        if !(self.alpha_decay.is_finite() && self.alpha_decay > 0.0) {
            return Err(SwarmError::InvalidArgument(
                "alpha_decay must be finite and > 0",
            ));
        }
        if !(self.beta0.is_finite() && self.beta0 > 0.0) {
            return Err(SwarmError::InvalidArgument("beta0 must be finite and > 0"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(SwarmError::InvalidArgument("gamma must be finite and > 0"));
        }
        Ok(())
    }
}

pub struct FaState<'a, O: Objective + ?Sized> {
    objective: &'a O,
    bounds: &'a SearchBounds,
    params: FaParams,
    rng: SwarmRng,
    positions: Vec<Vec<f64>>,
    fitness: Vec<f64>,
    best_position: Vec<f64>,
    best_fitness: f64,
    alpha_now: f64,
    iteration: usize,
    history: RunHistory,
}

impl<'a, O: Objective + ?Sized> FaState<'a, O> {
    pub fn new(
        objective: &'a O,
        bounds: &'a SearchBounds,
        params: FaParams,
        seed: u64,
    ) -> Result<Self, SwarmError> {
        Self::with_warm_start(objective, bounds, params, seed, &[])
    }

    pub fn with_warm_start(
        objective: &'a O,
        bounds: &'a SearchBounds,
        params: FaParams,
        seed: u64,
        warm_start: &[Vec<f64>],
    ) -> Result<Self, SwarmError> {
        params.validate()?;
        let mut rng = SwarmRng::seed_from(seed);
        let positions = initial_population(bounds, params.population, warm_start, &mut rng)?;
        let fitness = positions
            .iter()
            .enumerate()
            .map(|(i, x)| evaluate_checked(objective, x, i, 0))
            .collect::<Result<Vec<_>, _>>()?;
        let best = argmin(&fitness);
        let history = RunHistory {
            best_fitness_per_iteration: Vec::with_capacity(params.max_iterations),
            initial_best_fitness: fitness[best],
            evaluations_used: params.population as u64,
            seed,
        };
        Ok(Self {
            objective,
            bounds,
            rng,
            best_position: positions[best].clone(),
            best_fitness: fitness[best],
            alpha_now: params.alpha,
            positions,
            fitness,
            params,
            iteration: 0,
            history,
        })
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    fn jitter(&mut self, i: usize, toward: Option<(usize, f64)>) {
        let (positions, bounds, alpha) = (&mut self.positions, self.bounds, self.alpha_now);
        let target = toward.map(|(k, beta)| (positions[k].clone(), beta));
        let x = &mut positions[i];
        for (j, xj) in x.iter_mut().enumerate() {
            let u = self.rng.uniform();
            let walk = alpha * bounds.range(j) * (u - 0.5);
            match &target {
                Some((xk, beta)) => *xj += beta * (xk[j] - *xj) + walk,
                None => *xj += walk,
            }
        }
        clamp_in_place(x, bounds);
    }
}

/// Squared distance with each axis divided by its range; pinned axes
/// contribute nothing.
fn normalized_squared_distance(a: &[f64], b: &[f64], bounds: &SearchBounds) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(j, (x, y))| {
            let range = bounds.range(j);
            if range > 0.0 {
                let d = (x - y) / range;
                d * d
            } else {
                0.0
            }
        })
        .sum()
}

impl<O: Objective + ?Sized> SwarmOptimizer for FaState<'_, O> {
    fn step(&mut self) -> Result<(), SwarmError> {
        if self.is_finished() {
            return Err(SwarmError::InvalidState("run already finished"));
        }
        let n = self.iteration + 1;
        let light = self.fitness.clone();
        let count = self.positions.len();
        for i in 0..count {
            let mut moved = false;
            for k in 0..count {
                if light[k] < light[i] {
                    let r2 = normalized_squared_distance(
                        &self.positions[i],
                        &self.positions[k],
                        self.bounds,
                    );
                    let beta = self.params.beta0 * libm::exp(-self.params.gamma * r2);
                    self.jitter(i, Some((k, beta)));
                    moved = true;
                }
            }
            if !moved {
                self.jitter(i, None);
            }
        }
        for (i, x) in self.positions.iter().enumerate() {
            self.fitness[i] = evaluate_checked(self.objective, x, i, n)?;
        }
        self.history.evaluations_used += count as u64;
        let best = argmin(&self.fitness);
        if self.fitness[best] < self.best_fitness {
            self.best_fitness = self.fitness[best];
            self.best_position.clone_from(&self.positions[best]);
        }
        self.history
            .best_fitness_per_iteration
            .push(self.best_fitness);
        self.alpha_now *= self.params.alpha_decay;
        self.iteration = n;
        Ok(())
    }

    fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    fn best_position(&self) -> &[f64] {
        &self.best_position
    }

    fn best_fitness(&self) -> f64 {
        self.best_fitness
    }

    fn iteration(&self) -> usize {
        self.iteration
    }

    fn max_iterations(&self) -> usize {
        self.params.max_iterations
    }

    fn history(&self) -> &RunHistory {
        &self.history
    }
}

pub fn fa_run<O: Objective + ?Sized>(
    objective: &O,
    bounds: &SearchBounds,
    params: &FaParams,
    seed: u64,
) -> Result<RunResult, SwarmError> {
    FaState::new(objective, bounds, params.clone(), seed)?.run_to_end()
}
