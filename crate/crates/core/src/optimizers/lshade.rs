//! Success-history adaptive DE with linear population size reduction.
//!
//! Each generation draws a memory slot per individual, samples
//! `CR ~ N(M_CR, 0.1)` and `F ~ Cauchy(M_F, 0.1)` around it, and builds the
//! trial with current-to-pbest/1 using an external archive of replaced
//! parents. Successful parameters update the memory through weighted Lehmer
//! means. The population shrinks linearly from `np_init` to `np_min` as the
//! evaluation budget is consumed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Evaluator, Metaheuristic, Population};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LshadeParams {
    /// History length `H`.
    pub memory_size: usize,
    /// Fraction of the population eligible as pbest.
    pub p_best: f64,
    /// Archive capacity relative to the current population size.
    pub arc_rate: f64,
    /// Initial population; `None` means `18·D`.
    pub np_init: Option<usize>,
    pub np_min: usize,
}

impl Default for LshadeParams {
    fn default() -> Self {
        Self {
            memory_size: 5,
            p_best: 0.1,
            arc_rate: 2.0,
            np_init: None,
            np_min: 4,
        }
    }
}

impl LshadeParams {
    pub fn initial_population(&self, dimension: usize) -> usize {
        self.np_init.unwrap_or(18 * dimension)
    }
}

/// `round(np_init + (np_min − np_init)·used/max_fes)`.
pub fn lshade_population_size(np_init: usize, np_min: usize, used: usize, max_fes: usize) -> usize {
    let progress = (used as f64 / max_fes as f64).min(1.0);
    let size = np_init as f64 + (np_min as f64 - np_init as f64) * progress;
    (size.round() as usize).max(np_min)
}

/// Weighted Lehmer mean `Σ w·s² / Σ w·s`.
fn lehmer_mean(values: &[f64], weights: &[f64]) -> f64 {
    let num: f64 = values.iter().zip(weights).map(|(s, w)| w * s * s).sum();
    let den: f64 = values.iter().zip(weights).map(|(s, w)| w * s).sum();
    num / den
}

#[derive(Debug, Clone)]
pub struct LshadeState {
    pub params: LshadeParams,
    pub population: Population,
    pub archive: Vec<Vec<f64>>,
    /// `None` is the terminal CR value: once set, CR stays at zero.
    pub memory_cr: Vec<Option<f64>>,
    pub memory_f: Vec<f64>,
    next_slot: usize,
    np_init: usize,
}

impl LshadeState {
    pub fn new(
        params: LshadeParams,
        dimension: usize,
        eval: &mut Evaluator,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let np_init = params.initial_population(dimension);
        let population = Population::random(np_init, dimension, eval, rng);
        Self {
            memory_cr: vec![Some(0.5); params.memory_size],
            memory_f: vec![0.5; params.memory_size],
            params,
            population,
            archive: Vec::new(),
            next_slot: 0,
            np_init,
        }
    }

    fn archive_capacity(&self, population: usize) -> usize {
        (self.params.arc_rate * population as f64).round() as usize
    }

    fn trim_archive(&mut self, capacity: usize, rng: &mut ChaCha8Rng) {
        while self.archive.len() > capacity {
            let victim = rng.random_range(0..self.archive.len());
            self.archive.swap_remove(victim);
        }
    }
}

impl Metaheuristic for LshadeState {
    fn step(&mut self, eval: &mut Evaluator, rng: &mut ChaCha8Rng) {
        let n = self.population.len();
        if n < 4 {
            return;
        }
        let d = self.population.members[0].len();
        let h = self.params.memory_size;
        let ranking = self.population.ranking();
        let p_count = ((self.params.p_best * n as f64).round() as usize).clamp(2, n);

        struct Trial {
            index: usize,
            x: Vec<f64>,
            fitness: f64,
            f: f64,
            cr: f64,
        }
        let mut trials = Vec::with_capacity(n);

        for i in 0..n {
            let slot = rng.random_range(0..h);
            let cr = match self.memory_cr[slot] {
                None => 0.0,
                Some(m) => Normal::new(m, 0.1)
                    .expect("positive std")
                    .sample(rng)
                    .clamp(0.0, 1.0),
            };
            let cauchy = Cauchy::new(self.memory_f[slot], 0.1).expect("positive scale");
            let f = loop {
                let f = cauchy.sample(rng);
                if f > 0.0 {
                    break f.min(1.0);
                }
            };

            let pop = &self.population;
            let pbest = ranking[rng.random_range(0..p_count)];
            let r1 = loop {
                let r = rng.random_range(0..n);
                if r != i {
                    break r;
                }
            };
            let pool = n + self.archive.len();
            let r2 = loop {
                let r = rng.random_range(0..pool);
                if r != i && r != r1 {
                    break r;
                }
            };
            let x_r2 = if r2 < n {
                &pop.members[r2]
            } else {
                &self.archive[r2 - n]
            };

            let x = &pop.members[i];
            let j_rand = rng.random_range(0..d);
            let trial: Vec<f64> = (0..d)
                .map(|j| {
                    if j == j_rand || rng.random::<f64>() < cr {
                        (x[j]
                            + f * (pop.members[pbest][j] - x[j])
                            + f * (pop.members[r1][j] - x_r2[j]))
                            .clamp(0.0, 1.0)
                    } else {
                        x[j]
                    }
                })
                .collect();

            let Some(fitness) = eval.evaluate(&trial) else {
                break;
            };
            trials.push(Trial {
                index: i,
                x: trial,
                fitness,
                f,
                cr,
            });
        }

        let mut s_f = Vec::new();
        let mut s_cr = Vec::new();
        let mut gains = Vec::new();
        for t in trials {
            let parent = self.population.fitness[t.index];
            if t.fitness < parent {
                continue;
            }
            if t.fitness > parent {
                let old = std::mem::replace(&mut self.population.members[t.index], t.x);
                self.archive.push(old);
                s_f.push(t.f);
                s_cr.push(t.cr);
                gains.push(t.fitness - parent);
            } else {
                self.population.members[t.index] = t.x;
            }
            self.population.fitness[t.index] = t.fitness;
        }
        let capacity = self.archive_capacity(n);
        self.trim_archive(capacity, rng);

        if !s_f.is_empty() {
            let total: f64 = gains.iter().sum();
            let weights: Vec<f64> = if total > 0.0 && total.is_finite() {
                gains.iter().map(|g| g / total).collect()
            } else {
                vec![1.0 / gains.len() as f64; gains.len()]
            };
            let k = self.next_slot;
            let max_cr = s_cr.iter().copied().fold(0.0, f64::max);
            self.memory_cr[k] = match self.memory_cr[k] {
                Some(_) if max_cr > 0.0 => Some(lehmer_mean(&s_cr, &weights)),
                _ => None,
            };
            self.memory_f[k] = lehmer_mean(&s_f, &weights);
            self.next_slot = (k + 1) % h;
        }

        let target = lshade_population_size(
            self.np_init,
            self.params.np_min,
            eval.used(),
            eval.max_fes(),
        );
        if target < n {
            let keep: Vec<usize> = self.population.ranking().into_iter().take(target).collect();
            self.population = Population {
                members: keep
                    .iter()
                    .map(|&i| self.population.members[i].clone())
                    .collect(),
                fitness: keep.iter().map(|&i| self.population.fitness[i]).collect(),
            };
            let capacity = self.archive_capacity(target);
            self.trim_archive(capacity, rng);
        }
    }
}
