use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{distinct_indices, rand_1_bin, Evaluator, Metaheuristic, Population};

/// Self-adaptive DE: every individual carries its own `F` and `CR`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JdeParams {
    pub f0: f64,
    pub cr0: f64,
    /// Probability of regenerating `F` (and, independently, `CR`) before a
    /// trial is produced.
    pub tau: f64,
    /// Regenerated `F` is uniform in `[f_lower, f_lower + f_range]`.
    pub f_lower: f64,
    pub f_range: f64,
}

impl Default for JdeParams {
    fn default() -> Self {
        Self {
            f0: 0.5,
            cr0: 0.9,
            tau: 0.1,
            f_lower: 0.1,
            f_range: 0.9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JdeState {
    pub params: JdeParams,
    pub population: Population,
    pub f: Vec<f64>,
    pub cr: Vec<f64>,
}

impl JdeState {
    pub fn new(
        params: JdeParams,
        size: usize,
        dimension: usize,
        eval: &mut Evaluator,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let population = Population::random(size, dimension, eval, rng);
        let n = population.len();
        Self {
            f: vec![params.f0; n],
            cr: vec![params.cr0; n],
            params,
            population,
        }
    }
}

impl Metaheuristic for JdeState {
    fn step(&mut self, eval: &mut Evaluator, rng: &mut ChaCha8Rng) {
        let n = self.population.len();
        if n < 4 {
            return;
        }
        let d = self.population.members[0].len();
        let p = &self.params;
        let mut next = self.population.clone();
        for i in 0..n {
            let f = if rng.random::<f64>() < p.tau {
                p.f_lower + rng.random::<f64>() * p.f_range
            } else {
                self.f[i]
            };
            let cr = if rng.random::<f64>() < p.tau {
                rng.random::<f64>()
            } else {
                self.cr[i]
            };
            let pop = &self.population;
            let [r1, r2, r3] = distinct_indices::<3>(rng, n, i);
            let j_rand = rng.random_range(0..d);
            let trial = rand_1_bin(
                &pop.members[i],
                &pop.members[r1],
                &pop.members[r2],
                &pop.members[r3],
                f,
                cr,
                j_rand,
                rng,
            );
            let Some(fit) = eval.evaluate(&trial) else {
                break;
            };
            if fit >= pop.fitness[i] {
                next.members[i] = trial;
                next.fitness[i] = fit;
                self.f[i] = f;
                self.cr[i] = cr;
            }
        }
        self.population = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn parameters_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut objective = |x: &[f64]| -x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>();
        let mut observer = |_: &[f64], _: f64| {};
        let mut eval = Evaluator::new(3000, &mut objective, &mut observer);
        let mut state = JdeState::new(JdeParams::default(), 20, 4, &mut eval, &mut rng);
        while !eval.exhausted() {
            state.step(&mut eval, &mut rng);
        }
        assert!(state.f.iter().all(|f| (0.1..=1.0).contains(f)));
        assert!(state.cr.iter().all(|c| (0.0..=1.0).contains(c)));
        // Some individuals adapted away from the initial values.
        assert!(state.f.iter().any(|&f| f != 0.5) || state.cr.iter().any(|&c| c != 0.9));
    }

    #[test]
    fn tau_zero_keeps_initial_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut objective = |x: &[f64]| x[0];
        let mut observer = |_: &[f64], _: f64| {};
        let mut eval = Evaluator::new(500, &mut objective, &mut observer);
        let params = JdeParams {
            tau: 0.0,
            ..JdeParams::default()
        };
        let mut state = JdeState::new(params, 10, 3, &mut eval, &mut rng);
        state.step(&mut eval, &mut rng);
        assert!(state.f.iter().all(|&f| f == 0.5));
        assert!(state.cr.iter().all(|&c| c == 0.9));
    }
}
