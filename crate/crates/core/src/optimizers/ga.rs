use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Evaluator, Metaheuristic, Population};

/// Real-coded generational GA: tournament selection, uniform crossover,
/// uniform-reset mutation and a single elite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    /// Per-gene mutation probability `pm`.
    pub mutation_rate: f64,
    /// Crossover probability `pc` per parent pair.
    pub crossover_rate: f64,
    pub tournament_size: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            mutation_rate: 0.01,
            crossover_rate: 0.8,
            tournament_size: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaState {
    pub params: GaParams,
    pub population: Population,
}

impl GaState {
    pub fn new(
        params: GaParams,
        size: usize,
        dimension: usize,
        eval: &mut Evaluator,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        Self {
            params,
            population: Population::random(size, dimension, eval, rng),
        }
    }

    fn tournament(&self, rng: &mut ChaCha8Rng) -> usize {
        let n = self.population.len();
        let mut best = rng.random_range(0..n);
        for _ in 1..self.params.tournament_size {
            let c = rng.random_range(0..n);
            if self.population.fitness[c] > self.population.fitness[best] {
                best = c;
            }
        }
        best
    }
}

impl Metaheuristic for GaState {
    fn step(&mut self, eval: &mut Evaluator, rng: &mut ChaCha8Rng) {
        let n = self.population.len();
        if n < 2 {
            return;
        }
        let p = &self.params;
        let elite = self.population.best_index();
        let mut next = Population {
            members: vec![self.population.members[elite].clone()],
            fitness: vec![self.population.fitness[elite]],
        };

        'fill: while next.len() < n {
            let a = &self.population.members[self.tournament(rng)];
            let b = &self.population.members[self.tournament(rng)];
            let (mut c1, mut c2) = (a.clone(), b.clone());
            if rng.random::<f64>() < p.crossover_rate {
                for j in 0..c1.len() {
                    if rng.random_bool(0.5) {
                        std::mem::swap(&mut c1[j], &mut c2[j]);
                    }
                }
            }
            for child in [c1, c2] {
                if next.len() == n {
                    break;
                }
                let mut child = child;
                for gene in child.iter_mut() {
                    if rng.random::<f64>() < p.mutation_rate {
                        *gene = rng.random::<f64>();
                    }
                }
                let Some(f) = eval.evaluate(&child) else {
                    break 'fill;
                };
                next.members.push(child);
                next.fitness.push(f);
            }
        }

        if next.len() < n {
            // Budget ran out mid-generation: top up with the best survivors.
            for i in self.population.ranking() {
                if next.len() == n {
                    break;
                }
                if i != elite {
                    next.members.push(self.population.members[i].clone());
                    next.fitness.push(self.population.fitness[i]);
                }
            }
        }
        self.population = next;
    }
}
