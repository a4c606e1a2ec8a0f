//! Global-best particle swarm.
//!
//! Each particle carries a position, a velocity, and its personal best; the
//! swarm shares one global best. Updates are synchronous: every particle moves
//! using the bests from the previous iteration, then all are re-evaluated.
//!
//! Draw order: at start, per particle `i` ascending, `m` position draws then
//! `m` velocity draws. Per iteration, per particle, per dimension: `u1` then
//! `u2`.

use alloc::vec::Vec;

use super::{
    argmin, clamp_in_place, evaluate_checked, initial_population, Objective, RunHistory, RunResult,
    SearchBounds, SwarmError, SwarmOptimizer,
};
use crate::rng::SwarmRng;

#[derive(Clone, Debug, PartialEq)]
pub struct PsoParams {
    pub population: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            population: 20,
            max_iterations: 25,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
        }
    }
}

impl PsoParams {
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
        if ![self.inertia, self.cognitive, self.social]
            .iter()
            .all(|c| c.is_finite() && *c >= 0.0)
        {
            return Err(SwarmError::InvalidArgument(
                "PSO coefficients must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

pub struct PsoState<'a, O: Objective + ?Sized> {
    objective: &'a O,
    bounds: &'a SearchBounds,
    params: PsoParams,
    rng: SwarmRng,
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    fitness: Vec<f64>,
    personal_best_positions: Vec<Vec<f64>>,
    personal_best_fitness: Vec<f64>,
    global_best_position: Vec<f64>,
    global_best_fitness: f64,
    iteration: usize,
    history: RunHistory,
}

impl<'a, O: Objective + ?Sized> PsoState<'a, O> {
    pub fn new(
        objective: &'a O,
        bounds: &'a SearchBounds,
        params: PsoParams,
        seed: u64,
    ) -> Result<Self, SwarmError> {
        Self::with_warm_start(objective, bounds, params, seed, &[])
    }

    pub fn with_warm_start(
        objective: &'a O,
        bounds: &'a SearchBounds,
        params: PsoParams,
        seed: u64,
        warm_start: &[Vec<f64>],
    ) -> Result<Self, SwarmError> {
        params.validate()?;
        let mut rng = SwarmRng::seed_from(seed);
        let positions = initial_population(bounds, params.population, warm_start, &mut rng)?;
        // Initial velocity points from the particle to a second uniform point.
        let velocities: Vec<Vec<f64>> = positions
            .iter()
            .map(|x| {
                x.iter()
                    .enumerate()
                    .map(|(j, xj)| rng.uniform_in(bounds.lower()[j], bounds.upper()[j]) - xj)
                    .collect()
            })
            .collect();
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
            personal_best_positions: positions.clone(),
            personal_best_fitness: fitness.clone(),
            global_best_position: positions[best].clone(),
            global_best_fitness: fitness[best],
            positions,
            velocities,
            fitness,
            params,
            iteration: 0,
            history,
        })
    }

    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }

    /// Fitness of the current positions.
    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn personal_best_positions(&self) -> &[Vec<f64>] {
        &self.personal_best_positions
    }

    pub fn personal_best_fitness(&self) -> &[f64] {
        &self.personal_best_fitness
    }
}

impl<O: Objective + ?Sized> SwarmOptimizer for PsoState<'_, O> {
    fn step(&mut self) -> Result<(), SwarmError> {
        if self.is_finished() {
            return Err(SwarmError::InvalidState("run already finished"));
        }
        let n = self.iteration + 1;
        let PsoParams {
            inertia,
            cognitive,
            social,
            ..
        } = self.params;
        for i in 0..self.positions.len() {
            let x = &mut self.positions[i];
            let v = &mut self.velocities[i];
            let pbest = &self.personal_best_positions[i];
            for j in 0..x.len() {
                let u1 = self.rng.uniform();
                let u2 = self.rng.uniform();
                let vmax = self.bounds.range(j);
                let vj = inertia * v[j]
                    + cognitive * u1 * (pbest[j] - x[j])
                    + social * u2 * (self.global_best_position[j] - x[j]);
                v[j] = vj.clamp(-vmax, vmax);
                x[j] += v[j];
            }
            clamp_in_place(x, self.bounds);
        }
        for (i, x) in self.positions.iter().enumerate() {
            let f = evaluate_checked(self.objective, x, i, n)?;
            self.fitness[i] = f;
            if f < self.personal_best_fitness[i] {
                self.personal_best_fitness[i] = f;
                self.personal_best_positions[i].clone_from(x);
            }
        }
        self.history.evaluations_used += self.positions.len() as u64;
        let best = argmin(&self.personal_best_fitness);
        if self.personal_best_fitness[best] < self.global_best_fitness {
            self.global_best_fitness = self.personal_best_fitness[best];
            self.global_best_position
                .clone_from(&self.personal_best_positions[best]);
        }
        self.history
            .best_fitness_per_iteration
            .push(self.global_best_fitness);
        self.iteration = n;
        Ok(())
    }

    fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    fn best_position(&self) -> &[f64] {
        &self.global_best_position
    }

    fn best_fitness(&self) -> f64 {
        self.global_best_fitness
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

pub fn pso_run<O: Objective + ?Sized>(
    objective: &O,
    bounds: &SearchBounds,
    params: &PsoParams,
    seed: u64,
) -> Result<RunResult, SwarmError> {
    PsoState::new(objective, bounds, params.clone(), seed)?.run_to_end()
}
