//! Mining runs: database + decoder + optimizer, with every valid rule met
//! during the search archived under a canonical identity.

mod output;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{DecodeConfig, FitnessWeights, RuleObjective};
use crate::error::{Error, Result};
use crate::measures::{Counting, Rule, RuleMetrics, TimeWindow};
use crate::optimizers::{optimize, Algorithm, OptimizerConfig, RunTrace};
use crate::preprocess::TransactionDatabase;

pub use output::{
    format_rule, read_rules_csv, report_table, write_report_csv, write_rules_csv, write_rules_text,
    ReportRow, RuleRecord,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinerConfig {
    pub weights: FitnessWeights,
    /// Rules are archived only when support exceeds this.
    pub s_min: f64,
    /// Rules are archived only when confidence exceeds this.
    pub c_min: f64,
    pub runs: usize,
    pub counting: Counting,
    /// Decimal places kept when comparing interval endpoints for identity.
    pub precision: u32,
    pub optimizer: OptimizerConfig,
    pub decode: DecodeConfig,
}

impl Default for MinerConfig {
    fn default() -> Self {
        Self {
            weights: FitnessWeights::default(),
            s_min: 0.0,
            c_min: 0.0,
            runs: 10,
            counting: Counting::Days,
            precision: 4,
            optimizer: OptimizerConfig::default(),
            decode: DecodeConfig::default(),
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        for (field, v) in [("s_min", self.s_min), ("c_min", self.c_min)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(field, "must lie in [0, 1]"));
            }
        }
        if self.precision > 12 {
            return Err(Error::config("precision", "at most 12 decimal places"));
        }
        Ok(())
    }

    /// Seed of run `index`: the base seed plus the run index.
    pub fn run_seed(&self, index: usize) -> u64 {
        self.optimizer.seed.wrapping_add(index as u64)
    }
}

/// Order-insensitive, quantized identity of a rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleKey {
    pub antecedent: Vec<(usize, i64, i64)>,
    pub consequent: Vec<(usize, i64, i64)>,
    pub window: TimeWindow,
}

pub fn canonical_identity(rule: &Rule, precision: u32) -> RuleKey {
    let scale = 10f64.powi(precision as i32);
    let side = |conditions: &[crate::measures::AttributeCondition]| {
        let mut keyed: Vec<(usize, i64, i64)> = conditions
            .iter()
            .map(|c| {
                (
                    c.feature,
                    (c.lo * scale).round() as i64,
                    (c.hi * scale).round() as i64,
                )
            })
            .collect();
        keyed.sort_unstable();
        keyed
    };
    RuleKey {
        antecedent: side(&rule.antecedent),
        consequent: side(&rule.consequent),
        window: rule.window,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchivedRule {
    pub rule: Rule,
    pub metrics: RuleMetrics,
}

/// Distinct rules keyed by [`canonical_identity`]; the first rule seen for
/// a key is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleArchive {
    precision: u32,
    rules: BTreeMap<RuleKey, ArchivedRule>,
}

impl RuleArchive {
    pub fn new(precision: u32) -> Self {
        Self {
            precision,
            rules: BTreeMap::new(),
        }
    }

    /// Returns `true` if the rule was new.
    pub fn insert(&mut self, rule: Rule, metrics: RuleMetrics) -> bool {
        let key = canonical_identity(&rule, self.precision);
        match self.rules.entry(key) {
            std::collections::btree_map::Entry::Occupied(_) => false,
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(ArchivedRule { rule, metrics });
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ArchivedRule> {
        self.rules.values()
    }

    pub fn contains(&self, rule: &Rule) -> bool {
        self.rules
            .contains_key(&canonical_identity(rule, self.precision))
    }

    /// Set union; entries already present are kept.
    pub fn merge(&mut self, other: &RuleArchive) {
        for (key, entry) in &other.rules {
            self.rules
                .entry(key.clone())
                .or_insert_with(|| entry.clone());
        }
    }
}

/// What a report needs to know about one rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleSummary {
    pub antecedent_len: usize,
    pub consequent_len: usize,
    pub window: TimeWindow,
    pub metrics: RuleMetrics,
}

impl From<&ArchivedRule> for RuleSummary {
    fn from(a: &ArchivedRule) -> Self {
        Self {
            antecedent_len: a.rule.antecedent.len(),
            consequent_len: a.rule.consequent.len(),
            window: a.rule.window,
            metrics: a.metrics,
        }
    }
}

/// Aggregate statistics of a rule set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunReport {
    pub mean_support: f64,
    pub mean_confidence: f64,
    pub mean_inclusion: f64,
    pub mean_amplitude: f64,
    pub mean_antlen: f64,
    pub mean_conlen: f64,
    pub numrules: usize,
    /// Fraction of the `K` classes covered by the union of rule windows.
    pub interval_coverage: f64,
}

impl RunReport {
    /// Means over the rules; an empty set gives an all-zero report.
    pub fn from_rules<I>(rules: I, k: u32) -> Self
    where
        I: IntoIterator<Item = RuleSummary>,
    {
        let mut covered = vec![false; k as usize];
        let mut r = RunReport::default();
        for s in rules {
            r.numrules += 1;
            r.mean_support += s.metrics.support;
            r.mean_confidence += s.metrics.confidence;
            r.mean_inclusion += s.metrics.inclusion;
            r.mean_amplitude += s.metrics.amplitude;
            r.mean_antlen += s.antecedent_len as f64;
            r.mean_conlen += s.consequent_len as f64;
            for c in s.window.t1..=s.window.t2.min(k) {
                covered[(c - 1) as usize] = true;
            }
        }
        if r.numrules > 0 {
            let n = r.numrules as f64;
            r.mean_support /= n;
            r.mean_confidence /= n;
            r.mean_inclusion /= n;
            r.mean_amplitude /= n;
            r.mean_antlen /= n;
            r.mean_conlen /= n;
            r.interval_coverage = covered.iter().filter(|&&c| c).count() as f64 / f64::from(k);
        }
        r
    }

    /// Field-wise mean of several reports; `numrules` is rounded.
    pub fn mean_of(reports: &[RunReport]) -> RunReport {
        if reports.is_empty() {
            return RunReport::default();
        }
        let n = reports.len() as f64;
        let avg = |f: fn(&RunReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        RunReport {
            mean_support: avg(|r| r.mean_support),
            mean_confidence: avg(|r| r.mean_confidence),
            mean_inclusion: avg(|r| r.mean_inclusion),
            mean_amplitude: avg(|r| r.mean_amplitude),
            mean_antlen: avg(|r| r.mean_antlen),
            mean_conlen: avg(|r| r.mean_conlen),
            numrules: avg(|r| r.numrules as f64).round() as usize,
            interval_coverage: avg(|r| r.interval_coverage),
        }
    }
}

pub fn report(archive: &RuleArchive, k: u32) -> RunReport {
    RunReport::from_rules(archive.iter().map(RuleSummary::from), k)
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub trace: RunTrace,
    pub archive: RuleArchive,
    pub report: RunReport,
}

#[derive(Debug, Clone)]
pub struct MiningOutcome {
    pub algorithm: Algorithm,
    /// Ordered by run index.
    pub runs: Vec<RunResult>,
    /// Mean of the per-run reports.
    pub mean: RunReport,
}

impl MiningOutcome {
    /// Union of all run archives.
    pub fn merged_archive(&self) -> RuleArchive {
        let mut merged = RuleArchive::new(self.runs.first().map_or(4, |r| r.archive.precision));
        for r in &self.runs {
            merged.merge(&r.archive);
        }
        merged
    }
}

/// One optimizer run with archiving.
pub fn mine_run(db: &TransactionDatabase, config: &MinerConfig, run: usize) -> Result<RunResult> {
    let objective = RuleObjective::new(db, &config.decode, config.weights, config.counting)?;
    let seed = config.run_seed(run);
    let optimizer = OptimizerConfig {
        dimension: objective.dimension(),
        seed,
        ..config.optimizer.clone()
    };
    let mut archive = RuleArchive::new(config.precision);
    // Presence draws (stochastic mode) use their own stream of the run seed.
    let mut decode_rng = ChaCha8Rng::seed_from_u64(seed);
    decode_rng.set_stream(1);

    let trace = optimize(&optimizer, |x| {
        let eval = objective
            .evaluate_with(x, &mut decode_rng)
            .expect("optimizer points have the decoder's dimension and lie in the unit box");
        let fitness = eval.fitness();
        if let Some(rule) = eval.rule {
            if eval.metrics.support > config.s_min && eval.metrics.confidence > config.c_min {
                archive.insert(rule, eval.metrics);
            }
        }
        fitness
    })?;

    let report = report(&archive, db.k());
    Ok(RunResult {
        run,
        seed,
        trace,
        archive,
        report,
    })
}

/// Runs `config.runs` independent repetitions (in parallel) of the
/// configured algorithm.
pub fn mine(db: &TransactionDatabase, config: &MinerConfig) -> Result<MiningOutcome> {
    config.validate()?;
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|run| mine_run(db, config, run))
        .collect::<Result<Vec<_>>>()?;
    let mean = RunReport::mean_of(&runs.iter().map(|r| r.report).collect::<Vec<_>>());
    Ok(MiningOutcome {
        algorithm: config.optimizer.algorithm,
        runs,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::AttributeCondition;

    fn rule(conds: &[(usize, f64, f64)], cut: usize, window: (u32, u32)) -> Rule {
        let mut antecedent: Vec<_> = conds
            .iter()
            .map(|&(f, lo, hi)| AttributeCondition::new(f, lo, hi))
            .collect();
        let consequent = antecedent.split_off(cut);
        Rule {
            antecedent,
            consequent,
            window: TimeWindow::new(window.0, window.1),
        }
    }

    fn metrics(s: f64, c: f64, i: f64, a: f64) -> RuleMetrics {
        RuleMetrics {
            support: s,
            confidence: c,
            inclusion: i,
            amplitude: a,
            fitness: 0.0,
        }
    }

    #[test]
    fn identity_ignores_order_and_sub_quantum_noise() {
        let a = rule(&[(0, 1.0, 2.0), (3, 0.5, 0.7), (5, 1.0, 1.0)], 2, (1, 3));
        let b = rule(&[(3, 0.5, 0.7), (0, 1.0, 2.0), (5, 1.0, 1.0)], 2, (1, 3));
        assert_eq!(canonical_identity(&a, 4), canonical_identity(&b, 4));
        let c = rule(
            &[(0, 1.00001, 2.0), (3, 0.5, 0.70002), (5, 1.0, 1.0)],
            2,
            (1, 3),
        );
        assert_eq!(canonical_identity(&a, 4), canonical_identity(&c, 4));
        let d = rule(&[(0, 1.001, 2.0), (3, 0.5, 0.7), (5, 1.0, 1.0)], 2, (1, 3));
        assert_ne!(canonical_identity(&a, 4), canonical_identity(&d, 4));
        // Moving a condition across the implication changes the rule.
        let e = rule(&[(0, 1.0, 2.0), (3, 0.5, 0.7), (5, 1.0, 1.0)], 1, (1, 3));
        assert_ne!(canonical_identity(&a, 4), canonical_identity(&e, 4));
        let f = rule(&[(0, 1.0, 2.0), (3, 0.5, 0.7), (5, 1.0, 1.0)], 2, (1, 4));
        assert_ne!(canonical_identity(&a, 4), canonical_identity(&f, 4));
    }

    #[test]
    fn archive_deduplicates() {
        let mut archive = RuleArchive::new(4);
        let r = rule(&[(0, 1.0, 2.0), (1, 0.0, 1.0)], 1, (2, 2));
        assert!(archive.insert(r.clone(), metrics(0.5, 0.5, 0.1, 0.9)));
        assert!(!archive.insert(r.clone(), metrics(0.5, 0.5, 0.1, 0.9)));
        assert_eq!(archive.len(), 1);
        assert!(archive.contains(&r));
        let mut other = RuleArchive::new(4);
        other.insert(
            rule(&[(0, 1.0, 2.0), (1, 0.0, 1.0)], 1, (3, 3)),
            metrics(0.1, 0.2, 0.1, 0.9),
        );
        other.insert(r, metrics(0.5, 0.5, 0.1, 0.9));
        archive.merge(&other);
        assert_eq!(archive.len(), 2);
    }

    #[test]
    fn coverage() {
        let mut archive = RuleArchive::new(4);
        archive.insert(
            rule(&[(0, 1.0, 2.0), (1, 0.0, 1.0)], 1, (1, 12)),
            metrics(0.1, 0.1, 0.1, 0.1),
        );
        archive.insert(
            rule(&[(0, 1.0, 2.0), (1, 0.0, 1.0)], 1, (13, 24)),
            metrics(0.1, 0.1, 0.1, 0.1),
        );
        assert_eq!(report(&archive, 24).interval_coverage, 1.0);

        let mut single = RuleArchive::new(4);
        single.insert(
            rule(&[(0, 1.0, 2.0), (1, 0.0, 1.0)], 1, (12, 14)),
            metrics(0.1, 0.1, 0.1, 0.1),
        );
        assert_eq!(report(&single, 24).interval_coverage, 0.125);
    }

    #[test]
    fn report_means() {
        let mut archive = RuleArchive::new(4);
        archive.insert(
            rule(&[(0, 1.0, 2.0), (1, 0.0, 1.0), (2, 0.0, 1.0)], 2, (12, 14)),
            metrics(0.4, 0.8, 3.0 / 18.0, 17.0 / 18.0),
        );
        let r = report(&archive, 24);
        assert_eq!(r.numrules, 1);
        assert_eq!(r.mean_support, 0.4);
        assert_eq!(r.mean_confidence, 0.8);
        assert_eq!(r.mean_inclusion, 3.0 / 18.0);
        assert_eq!(r.mean_amplitude, 17.0 / 18.0);
        assert_eq!((r.mean_antlen, r.mean_conlen), (2.0, 1.0));

        archive.insert(
            rule(&[(4, 1.0, 2.0), (1, 0.0, 1.0)], 1, (1, 1)),
            metrics(0.2, 0.6, 2.0 / 18.0, 15.0 / 18.0),
        );
        let r = report(&archive, 24);
        assert!((r.mean_support - 0.3).abs() < 1e-15);
        assert!((r.mean_confidence - 0.7).abs() < 1e-15);
        assert!((r.mean_inclusion - 2.5 / 18.0).abs() < 1e-15);
        assert!((r.mean_amplitude - 16.0 / 18.0).abs() < 1e-15);
        assert_eq!((r.mean_antlen, r.mean_conlen), (1.5, 1.0));
    }

    #[test]
    fn empty_report_is_zero() {
        assert_eq!(report(&RuleArchive::new(4), 24), RunReport::default());
        assert_eq!(RunReport::mean_of(&[]), RunReport::default());
    }

    #[test]
    fn config_validation() {
        let mut c = MinerConfig::default();
        c.validate().unwrap();
        c.runs = 0;
        assert!(c.validate().is_err());
        c.runs = 1;
        c.s_min = 1.5;
        assert!(c.validate().is_err());
        assert_eq!(MinerConfig::default().run_seed(3), 3);
    }
}
