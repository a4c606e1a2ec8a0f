//! Salp swarm algorithm.
//!
//! The population is a chain. Row 0 is the leader, which jumps around the
//! best-so-far solution ("food") with a step scaled by a coefficient that
//! decays over the run. Every other row moves to the midpoint between itself
//! and its freshly updated predecessor, so the chain drags behind the leader.
//!
//! Random draw order per iteration: for each dimension `j` ascending, the
//! leader draws `r2` then `r3`. Followers consume no randomness.

use alloc::vec::Vec;

use super::{
    argmin, clamp_in_place, evaluate_checked, initial_population, Objective, RunHistory, RunResult,
    SearchBounds, SwarmError, SwarmOptimizer,
};
use crate::rng::SwarmRng;

/// How a follower combines its predecessor with the chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FollowerMode {
    /// `x[i] <- (x[i] + x[i-1]) / 2`, predecessor already updated.
    #[default]
    OriginalSsa,
    /// `x[i] <- (x[0] + x[i-1]) / 2`; the second salp lands on the leader.
    PaperLiteral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsaParams {
    pub population: usize,
    pub max_iterations: usize,
    pub follower_mode: FollowerMode,
    /// Leader steps in the positive direction when `r3 >= branch_threshold`.
    pub branch_threshold: f64,
}

impl Default for SsaParams {
    fn default() -> Self {
        Self {
            population: 20,
            max_iterations: 25,
            follower_mode: FollowerMode::OriginalSsa,
            branch_threshold: 0.5,
        }
    }
}

impl SsaParams {
    pub fn new(population: usize, max_iterations: usize) -> Self {
        Self {
            population,
            max_iterations,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SwarmError> {
        if self.population < 2 {
            return Err(SwarmError::InvalidArgument(
                "salp swarm needs a leader and at least one follower",
            ));
        }
        if self.max_iterations == 0 {
            return Err(SwarmError::InvalidArgument(
                "max_iterations must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.branch_threshold) {
            return Err(SwarmError::InvalidArgument(
                "branch_threshold must lie in [0, 1]",
            ));
        }
        Ok(())
    }
}

/// Leader step coefficient `2 * exp(-(4n/N)^2)` at iteration `n` of `N`.
pub fn coefficient_r1(n: usize, max_iterations: usize) -> Result<f64, SwarmError> {
    if max_iterations == 0 {
        return Err(SwarmError::InvalidArgument(
            "max_iterations must be positive",
        ));
    }
    if n > max_iterations {
        return Err(SwarmError::InvalidArgument(
            "iteration exceeds max_iterations",
        ));
    }
    let ratio = 4.0 * n as f64 / max_iterations as f64;
    Ok(2.0 * libm::exp(-(ratio * ratio)))
}

/// One leader coordinate given explicit draws.
#[inline]
pub fn leader_coordinate(
    food: f64,
    lower: f64,
    upper: f64,
    r1: f64,
    r2: f64,
    r3: f64,
    branch_threshold: f64,
) -> f64 {
    let step = r1 * ((upper - lower) * r2 + lower);
    if r3 >= branch_threshold {
        food + step
    } else {
        food - step
    }
}

/// New leader position around `food`. Not clamped; the caller clamps the
/// whole chain after the followers have moved.
pub fn update_leader(
    food: &[f64],
    bounds: &SearchBounds,
    branch_threshold: f64,
    r1: f64,
    rng: &mut SwarmRng,
) -> Vec<f64> {
    food.iter()
        .enumerate()
        .map(|(j, &f)| {
            let r2 = rng.uniform();
            let r3 = rng.uniform();
            leader_coordinate(
                f,
                bounds.lower()[j],
                bounds.upper()[j],
                r1,
                r2,
                r3,
                branch_threshold,
            )
        })
        .collect()
}

/// Moves rows `1..M` in ascending order; row 0 must already hold the new
/// leader.
pub fn update_followers(positions: &mut [Vec<f64>], mode: FollowerMode) -> Result<(), SwarmError> {
    if positions.len() < 2 {
        return Err(SwarmError::InvalidState("chain has no followers"));
    }
    for i in 1..positions.len() {
        let (done, rest) = positions.split_at_mut(i);
        let predecessor = &done[i - 1];
        let leader = &done[0];
        let row = &mut rest[0];
        match mode {
            FollowerMode::OriginalSsa => {
                for (x, p) in row.iter_mut().zip(predecessor) {
                    *x = 0.5 * (*x + *p);
                }
            }
            FollowerMode::PaperLiteral => {
                for ((x, l), p) in row.iter_mut().zip(leader).zip(predecessor) {
                    *x = 0.5 * (*l + *p);
                }
            }
        }
    }
    Ok(())
}

/// A salp chain in progress.
pub struct SsaState<'a, O: Objective + ?Sized> {
    objective: &'a O,
    bounds: &'a SearchBounds,
    params: SsaParams,
    rng: SwarmRng,
    positions: Vec<Vec<f64>>,
    fitness: Vec<f64>,
    food_position: Vec<f64>,
    food_fitness: f64,
    iteration: usize,
    history: RunHistory,
}

impl<'a, O: Objective + ?Sized> SsaState<'a, O> {
    pub fn new(
        objective: &'a O,
        bounds: &'a SearchBounds,
        params: SsaParams,
        seed: u64,
    ) -> Result<Self, SwarmError> {
        Self::with_warm_start(objective, bounds, params, seed, &[])
    }

    /// Like [`SsaState::new`] but the leading rows start at `warm_start`.
    pub fn with_warm_start(
        objective: &'a O,
        bounds: &'a SearchBounds,
        params: SsaParams,
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
        let food_fitness = fitness[best];
        let history = RunHistory {
            best_fitness_per_iteration: Vec::with_capacity(params.max_iterations),
            initial_best_fitness: food_fitness,
            evaluations_used: params.population as u64,
            seed,
        };
        Ok(Self {
            objective,
            bounds,
            food_position: positions[best].clone(),
            food_fitness,
            params,
            rng,
            positions,
            fitness,
            iteration: 0,
            history,
        })
    }

    pub fn food_position(&self) -> &[f64] {
        &self.food_position
    }

    pub fn food_fitness(&self) -> f64 {
        self.food_fitness
    }

    /// Fitness of the current population.
    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn params(&self) -> &SsaParams {
        &self.params
    }
}

impl<O: Objective + ?Sized> SwarmOptimizer for SsaState<'_, O> {
    fn step(&mut self) -> Result<(), SwarmError> {
        if self.is_finished() {
            return Err(SwarmError::InvalidState("run already finished"));
        }
        let n = self.iteration + 1;
        let r1 = coefficient_r1(n, self.params.max_iterations)?;
        self.positions[0] = update_leader(
            &self.food_position,
            self.bounds,
            self.params.branch_threshold,
            r1,
            &mut self.rng,
        );
        update_followers(&mut self.positions, self.params.follower_mode)?;
        for row in &mut self.positions {
            clamp_in_place(row, self.bounds);
        }
        for (i, x) in self.positions.iter().enumerate() {
            self.fitness[i] = evaluate_checked(self.objective, x, i, n)?;
        }
        self.history.evaluations_used += self.positions.len() as u64;
        let best = argmin(&self.fitness);
        if self.fitness[best] < self.food_fitness {
            self.food_fitness = self.fitness[best];
            self.food_position.clone_from(&self.positions[best]);
        }
        self.history
            .best_fitness_per_iteration
            .push(self.food_fitness);
        self.iteration = n;
        Ok(())
    }

    fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    fn best_position(&self) -> &[f64] {
        &self.food_position
    }

    fn best_fitness(&self) -> f64 {
        self.food_fitness
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

/// Runs the salp chain for exactly `params.max_iterations` iterations.
pub fn ssa_run<O: Objective + ?Sized>(
    objective: &O,
    bounds: &SearchBounds,
    params: &SsaParams,
    seed: u64,
) -> Result<RunResult, SwarmError> {
    SsaState::new(objective, bounds, params.clone(), seed)?.run_to_end()
}
