//! Population-based maximizers over the unit hypercube.
//!
//! All five algorithms share the same contract: the population is sampled
//! uniformly in `[0,1]^D`, every candidate handed to the objective is
//! clamped into the box, and the run stops the moment `max_fes` objective
//! evaluations have been spent, even in the middle of a generation. A run is
//! a deterministic function of the seed, the configuration and the
//! objective.

mod de;
mod ga;
mod jde;
mod lshade;
mod pso;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use de::{rand_1_bin, DeParams, DeState};
pub use ga::{GaParams, GaState};
pub use jde::{JdeParams, JdeState};
pub use lshade::{lshade_population_size, LshadeParams, LshadeState};
pub use pso::{PsoParams, PsoState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    De,
    Ga,
    Pso,
    Lshade,
    Jde,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::De,
        Algorithm::Ga,
        Algorithm::Pso,
        Algorithm::Lshade,
        Algorithm::Jde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::De => "DE",
            Algorithm::Ga => "GA",
            Algorithm::Pso => "PSO",
            Algorithm::Lshade => "LSHADE",
            Algorithm::Jde => "jDE",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "de" => Ok(Algorithm::De),
            "ga" => Ok(Algorithm::Ga),
            "pso" => Ok(Algorithm::Pso),
            "lshade" => Ok(Algorithm::Lshade),
            "jde" => Ok(Algorithm::Jde),
            _ => Err(format!(
                "unknown algorithm {s:?}; valid names: de, ga, pso, lshade, jde"
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmParams {
    pub de: DeParams,
    pub ga: GaParams,
    pub pso: PsoParams,
    pub lshade: LshadeParams,
    pub jde: JdeParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub dimension: usize,
    /// Population size `NP`. LSHADE sizes its own population from
    /// [`LshadeParams`].
    pub population: usize,
    pub max_fes: usize,
    pub seed: u64,
    pub params: AlgorithmParams,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::De,
            dimension: crate::encoding::genotype_len(crate::encoding::DEFAULT_MAX_LEN),
            population: 50,
            max_fes: 10_000,
            seed: 0,
            params: AlgorithmParams::default(),
        }
    }
}

fn unit(field: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::config(field, format!("{value} outside [0, 1]")))
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::config("dimension", "must be positive"));
        }
        let min_population = match self.algorithm {
            Algorithm::De | Algorithm::Jde => 4,
            Algorithm::Ga => 2,
            Algorithm::Pso | Algorithm::Lshade => 1,
        };
        if self.population < min_population {
            return Err(Error::config(
                "population",
                format!(
                    "{} needs at least {min_population} individuals",
                    self.algorithm
                ),
            ));
        }
        if self.max_fes < self.population {
            return Err(Error::config(
                "max_fes",
                "must be at least the population size",
            ));
        }
        let p = &self.params;
        match self.algorithm {
            Algorithm::De => {
                if !(p.de.f > 0.0 && p.de.f <= 1.0) {
                    return Err(Error::config("de.f", "must lie in (0, 1]"));
                }
                unit("de.cr", p.de.cr)?;
            }
            Algorithm::Ga => {
                unit("ga.mutation_rate", p.ga.mutation_rate)?;
                unit("ga.crossover_rate", p.ga.crossover_rate)?;
                if p.ga.tournament_size == 0 {
                    return Err(Error::config("ga.tournament_size", "must be positive"));
                }
            }
            Algorithm::Pso => {
                if p.pso.w.is_nan() || p.pso.w <= 0.0 {
                    return Err(Error::config("pso.w", "must be positive"));
                }
                if !(p.pso.c1 >= 0.0 && p.pso.c2 >= 0.0) {
                    return Err(Error::config("pso.c1/c2", "must be non-negative"));
                }
                if p.pso.max_velocity.is_nan() || p.pso.max_velocity <= 0.0 {
                    return Err(Error::config("pso.max_velocity", "must be positive"));
                }
            }
            Algorithm::Jde => {
                if !(p.jde.f0 > 0.0 && p.jde.f0 <= 1.0) {
                    return Err(Error::config("jde.f0", "must lie in (0, 1]"));
                }
                unit("jde.cr0", p.jde.cr0)?;
                unit("jde.tau", p.jde.tau)?;
                if !(p.jde.f_lower > 0.0 && p.jde.f_lower + p.jde.f_range <= 1.0 + 1e-12) {
                    return Err(Error::config(
                        "jde.f_lower",
                        "F range must stay within (0, 1]",
                    ));
                }
            }
            Algorithm::Lshade => {
                let l = &p.lshade;
                if l.memory_size == 0 {
                    return Err(Error::config("lshade.memory_size", "must be at least 1"));
                }
                if !(l.p_best > 0.0 && l.p_best <= 1.0) {
                    return Err(Error::config("lshade.p_best", "must lie in (0, 1]"));
                }
                if l.arc_rate.is_nan() || l.arc_rate < 0.0 {
                    return Err(Error::config("lshade.arc_rate", "must be non-negative"));
                }
                if l.np_min < 4 {
                    return Err(Error::config("lshade.np_min", "must be at least 4"));
                }
                if l.initial_population(self.dimension) < l.np_min {
                    return Err(Error::config("lshade.np_init", "must be at least np_min"));
                }
            }
        }
        Ok(())
    }
}

/// Result of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub best_genotype: Vec<f64>,
    pub best_fitness: f64,
    pub evaluations_used: usize,
}

/// Budgeted gateway to the objective. Tracks the best point seen and feeds
/// every evaluation to an observer.
pub struct Evaluator<'a> {
    objective: &'a mut dyn FnMut(&[f64]) -> f64,
    observer: &'a mut dyn FnMut(&[f64], f64),
    used: usize,
    max_fes: usize,
    best: Option<(Vec<f64>, f64)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        max_fes: usize,
        objective: &'a mut dyn FnMut(&[f64]) -> f64,
        observer: &'a mut dyn FnMut(&[f64], f64),
    ) -> Self {
        Self {
            objective,
            observer,
            used: 0,
            max_fes,
            best: None,
        }
    }

    /// Evaluates `x`, or returns `None` once the budget is spent. NaN
    /// results are treated as the worst possible fitness.
    pub fn evaluate(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        debug_assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        let raw = (self.objective)(x);
        let fitness = if raw.is_nan() { f64::NEG_INFINITY } else { raw };
        self.used += 1;
        (self.observer)(x, fitness);
        if self.best.as_ref().is_none_or(|(_, b)| fitness > *b) {
            self.best = Some((x.to_vec(), fitness));
        }
        Some(fitness)
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn max_fes(&self) -> usize {
        self.max_fes
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.max_fes
    }

    pub fn best(&self) -> Option<(&[f64], f64)> {
        self.best.as_ref().map(|(x, f)| (x.as_slice(), *f))
    }
}

/// Population members and their fitness values.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
}

impl Population {
    /// Samples up to `size` points uniformly and evaluates them; stops early
    /// if the budget runs out.
    pub fn random(size: usize, dimension: usize, eval: &mut Evaluator, rng: &mut impl Rng) -> Self {
        let mut members = Vec::with_capacity(size);
        let mut fitness = Vec::with_capacity(size);
        for _ in 0..size {
            let x: Vec<f64> = (0..dimension).map(|_| rng.random::<f64>()).collect();
            match eval.evaluate(&x) {
                Some(f) => {
                    members.push(x);
                    fitness.push(f);
                }
                None => break,
            }
        }
        Self { members, fitness }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best_index(&self) -> usize {
        (0..self.len())
            .max_by(|&a, &b| self.fitness[a].total_cmp(&self.fitness[b]).then(b.cmp(&a)))
            .expect("population is not empty")
    }

    /// Indices sorted from best to worst.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.fitness[b].total_cmp(&self.fitness[a]).then(a.cmp(&b)));
        order
    }
}

/// One generation of a metaheuristic.
pub trait Metaheuristic {
    fn step(&mut self, eval: &mut Evaluator, rng: &mut ChaCha8Rng);
}

/// Draws `count` distinct indices from `0..n`, none equal to `exclude`.
pub(crate) fn distinct_indices<const N: usize>(
    rng: &mut impl Rng,
    n: usize,
    exclude: usize,
) -> [usize; N] {
    debug_assert!(n > N);
    let mut out = [usize::MAX; N];
    for k in 0..N {
        loop {
            let r = rng.random_range(0..n);
            if r != exclude && !out[..k].contains(&r) {
                out[k] = r;
                break;
            }
        }
    }
    out
}

/// Runs the configured algorithm, maximizing `objective`.
pub fn optimize<F>(config: &OptimizerConfig, objective: F) -> Result<RunTrace>
where
    F: FnMut(&[f64]) -> f64,
{
    optimize_observed(config, objective, |_, _| {})
}

/// Like [`optimize`], calling `observer` with every evaluated point and its
/// fitness, in evaluation order.
pub fn optimize_observed<F, H>(
    config: &OptimizerConfig,
    mut objective: F,
    mut observer: H,
) -> Result<RunTrace>
where
    F: FnMut(&[f64]) -> f64,
    H: FnMut(&[f64], f64),
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut eval = Evaluator::new(config.max_fes, &mut objective, &mut observer);
    let d = config.dimension;
    let np = config.population;
    let p = &config.params;

    let mut state: Box<dyn Metaheuristic> = match config.algorithm {
        Algorithm::De => Box::new(DeState::new(p.de.clone(), np, d, &mut eval, &mut rng)),
        Algorithm::Ga => Box::new(GaState::new(p.ga.clone(), np, d, &mut eval, &mut rng)),
        Algorithm::Pso => Box::new(PsoState::new(p.pso.clone(), np, d, &mut eval, &mut rng)),
        Algorithm::Jde => Box::new(JdeState::new(p.jde.clone(), np, d, &mut eval, &mut rng)),
        Algorithm::Lshade => Box::new(LshadeState::new(p.lshade.clone(), d, &mut eval, &mut rng)),
    };

    while !eval.exhausted() {
        let before = eval.used();
        state.step(&mut eval, &mut rng);
        if eval.used() == before {
            break;
        }
    }

    let (x, f) = eval.best().expect("max_fes >= 1 guarantees an evaluation");
    Ok(RunTrace {
        best_genotype: x.to_vec(),
        best_fitness: f,
        evaluations_used: eval.used(),
    })
}
