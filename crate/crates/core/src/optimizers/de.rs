use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{distinct_indices, Evaluator, Metaheuristic, Population};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeParams {
    /// Differential weight.
    pub f: f64,
    /// Crossover probability.
    pub cr: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self { f: 0.5, cr: 0.9 }
    }
}

/// DE/rand/1/bin trial vector.
///
/// The mutant `base + f·(a − b)` is mixed with `target` by binomial
/// crossover; dimension `j_rand` always comes from the mutant. The result is
/// clamped to the unit box.
#[allow(clippy::too_many_arguments)]
pub fn rand_1_bin(
    target: &[f64],
    base: &[f64],
    a: &[f64],
    b: &[f64],
    f: f64,
    cr: f64,
    j_rand: usize,
    rng: &mut impl Rng,
) -> Vec<f64> {
    (0..target.len())
        .map(|j| {
            if j == j_rand || rng.random::<f64>() < cr {
                (base[j] + f * (a[j] - b[j])).clamp(0.0, 1.0)
            } else {
                target[j]
            }
        })
        .collect()
}

/// Classic differential evolution with greedy one-to-one selection.
#[derive(Debug, Clone)]
pub struct DeState {
    pub params: DeParams,
    pub population: Population,
}

impl DeState {
    pub fn new(
        params: DeParams,
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
}

impl Metaheuristic for DeState {
    fn step(&mut self, eval: &mut Evaluator, rng: &mut ChaCha8Rng) {
        let pop = &self.population;
        let n = pop.len();
        if n < 4 {
            return;
        }
        let d = pop.members[0].len();
        let mut next = pop.clone();
        for i in 0..n {
            let [r1, r2, r3] = distinct_indices::<3>(rng, n, i);
            let j_rand = rng.random_range(0..d);
            let trial = rand_1_bin(
                &pop.members[i],
                &pop.members[r1],
                &pop.members[r2],
                &pop.members[r3],
                self.params.f,
                self.params.cr,
                j_rand,
                rng,
            );
            let Some(f) = eval.evaluate(&trial) else {
                break;
            };
            if f >= pop.fitness[i] {
                next.members[i] = trial;
                next.fitness[i] = f;
            }
        }
        self.population = next;
    }
}
