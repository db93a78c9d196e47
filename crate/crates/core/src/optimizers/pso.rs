use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Evaluator, Metaheuristic, Population};

/// Global-best PSO with velocity clamping and reflecting walls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    /// Cognitive coefficient.
    pub c1: f64,
    /// Social coefficient.
    pub c2: f64,
    /// Inertia weight.
    pub w: f64,
    /// Per-dimension speed limit, as a fraction of the unit range.
    pub max_velocity: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            c1: 0.1,
            c2: 0.1,
            w: 0.8,
            max_velocity: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PsoState {
    pub params: PsoParams,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// Personal bests.
    pub personal: Population,
    pub global_best: Vec<f64>,
    pub global_fitness: f64,
}

impl PsoState {
    pub fn new(
        params: PsoParams,
        size: usize,
        dimension: usize,
        eval: &mut Evaluator,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let personal = Population::random(size, dimension, eval, rng);
        let vmax = params.max_velocity;
        let velocities = (0..personal.len())
            .map(|_| {
                (0..dimension)
                    .map(|_| rng.random_range(-vmax..=vmax))
                    .collect()
            })
            .collect();
        let (global_best, global_fitness) = if personal.is_empty() {
            (vec![0.5; dimension], f64::NEG_INFINITY)
        } else {
            let b = personal.best_index();
            (personal.members[b].clone(), personal.fitness[b])
        };
        Self {
            params,
            positions: personal.members.clone(),
            velocities,
            personal,
            global_best,
            global_fitness,
        }
    }
}

/// Mirrors a coordinate back into `[0, 1]`, flipping its velocity.
fn reflect(x: &mut f64, v: &mut f64) {
    if *x < 0.0 {
        *x = -*x;
        *v = -*v;
    } else if *x > 1.0 {
        *x = 2.0 - *x;
        *v = -*v;
    }
    *x = x.clamp(0.0, 1.0);
}

impl Metaheuristic for PsoState {
    fn step(&mut self, eval: &mut Evaluator, rng: &mut ChaCha8Rng) {
        let p = &self.params;
        for i in 0..self.positions.len() {
            let x = &mut self.positions[i];
            let v = &mut self.velocities[i];
            let pbest = &self.personal.members[i];
            for j in 0..x.len() {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                v[j] = (p.w * v[j]
                    + p.c1 * r1 * (pbest[j] - x[j])
                    + p.c2 * r2 * (self.global_best[j] - x[j]))
                    .clamp(-p.max_velocity, p.max_velocity);
                x[j] += v[j];
                reflect(&mut x[j], &mut v[j]);
            }
            let Some(f) = eval.evaluate(x) else {
                return;
            };
            if f >= self.personal.fitness[i] {
                self.personal.members[i].clone_from(x);
                self.personal.fitness[i] = f;
            }
            if f >= self.global_fitness {
                self.global_best.clone_from(x);
                self.global_fitness = f;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn frozen_swarm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut objective = |x: &[f64]| x[0];
        let mut observer = |_: &[f64], _: f64| {};
        let mut eval = Evaluator::new(1000, &mut objective, &mut observer);
        let params = PsoParams {
            c1: 0.0,
            c2: 0.0,
            w: 0.0,
            ..PsoParams::default()
        };
        let mut state = PsoState::new(params, 10, 3, &mut eval, &mut rng);
        let before = state.positions.clone();
        state.step(&mut eval, &mut rng);
        assert!(state.velocities.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(state.positions, before);
        state.step(&mut eval, &mut rng);
        assert_eq!(state.positions, before);
    }

    #[test]
    fn reflection_stays_in_box() {
        let (mut x, mut v) = (-0.15, -0.2);
        reflect(&mut x, &mut v);
        assert!((x - 0.15).abs() < 1e-12 && v == 0.2);
        let (mut x, mut v) = (1.1, 0.2);
        reflect(&mut x, &mut v);
        assert!((x - 0.9).abs() < 1e-12 && v == -0.2);
    }

    #[test]
    fn global_best_is_best_personal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut objective = |x: &[f64]| -(x[0] - 0.7).abs();
        let mut observer = |_: &[f64], _: f64| {};
        let mut eval = Evaluator::new(2000, &mut objective, &mut observer);
        let mut state = PsoState::new(PsoParams::default(), 10, 2, &mut eval, &mut rng);
        while !eval.exhausted() {
            state.step(&mut eval, &mut rng);
            let b = state.personal.best_index();
            assert_eq!(state.personal.fitness[b], state.global_fitness);
        }
    }
}
