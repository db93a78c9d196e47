//! Genotype → rule mapping and the weighted fitness.
//!
//! A genotype for rules of at most `L` conditions is a vector in
//! `[0,1]^(4L+3)`. Each of the first `L` quadruples describes one candidate
//! condition:
//!
//! | element | meaning                                                     |
//! |---------|-------------------------------------------------------------|
//! | `4j`    | feature selector and ordering key                           |
//! | `4j+1`  | one interval endpoint, as a fraction of the feature domain  |
//! | `4j+2`  | the other interval endpoint                                 |
//! | `4j+3`  | presence threshold                                          |
//!
//! The trailing three elements encode the time window endpoints and the
//! cutting point that splits the ordered conditions into antecedent and
//! consequent.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, AttributeCondition, Counting, Rule, RuleMetrics, TimeWindow};
use crate::preprocess::{TransactionDatabase, CLASS_FEATURE, SEQUENCE_FEATURE};

pub const DEFAULT_MAX_LEN: usize = 4;

/// Genotype length for rules of at most `max_len` conditions.
pub const fn genotype_len(max_len: usize) -> usize {
    4 * max_len + 3
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// A condition is present iff its threshold element is at least 0.5.
    #[default]
    Deterministic,
    /// A condition is present iff a fresh uniform draw is below its
    /// threshold element.
    Stochastic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodeConfig {
    pub threshold_mode: ThresholdMode,
    /// Maximum rule length `L`.
    pub max_len: usize,
    /// Features never used in rules. `None` excludes the `SEQUENCE` and
    /// `CLASS` columns when present.
    pub excluded_features: Option<BTreeSet<usize>>,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            threshold_mode: ThresholdMode::Deterministic,
            max_len: DEFAULT_MAX_LEN,
            excluded_features: None,
        }
    }
}

/// Database-bound decoder: the selectable features, their domains and `K`.
#[derive(Debug, Clone)]
pub struct Decoder {
    mode: ThresholdMode,
    max_len: usize,
    selectable: Vec<usize>,
    domain_lo: Vec<f64>,
    domain_hi: Vec<f64>,
    k: u32,
}

impl Decoder {
    pub fn new(db: &TransactionDatabase, config: &DecodeConfig) -> Result<Self> {
        if config.max_len < 2 {
            return Err(Error::config(
                "max_len",
                "rules need room for at least 2 conditions",
            ));
        }
        let excluded: BTreeSet<usize> = match &config.excluded_features {
            Some(set) => set.clone(),
            None => [SEQUENCE_FEATURE, CLASS_FEATURE]
                .iter()
                .filter_map(|name| db.feature_index(name))
                .collect(),
        };
        let selectable: Vec<usize> = (0..db.n_features())
            .filter(|j| !excluded.contains(j))
            .collect();
        if selectable.len() < 2 {
            return Err(Error::config(
                "excluded_features",
                "at least two features must remain selectable",
            ));
        }
        Ok(Self {
            mode: config.threshold_mode,
            max_len: config.max_len,
            selectable,
            domain_lo: db.domain_lo().to_vec(),
            domain_hi: db.domain_hi().to_vec(),
            k: db.k(),
        })
    }

    pub fn genotype_len(&self) -> usize {
        genotype_len(self.max_len)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn mode(&self) -> ThresholdMode {
        self.mode
    }

    pub fn selectable_features(&self) -> &[usize] {
        &self.selectable
    }

    fn check(&self, genotype: &[f64]) -> Result<()> {
        if genotype.len() != self.genotype_len() {
            return Err(Error::GenotypeLength {
                expected: self.genotype_len(),
                actual: genotype.len(),
            });
        }
        if let Some((index, &value)) = genotype
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::GenotypeRange { index, value });
        }
        Ok(())
    }

    /// Decodes in deterministic threshold mode.
    pub fn decode(&self, genotype: &[f64]) -> Result<Option<Rule>> {
        if self.mode == ThresholdMode::Stochastic {
            return Err(Error::MissingRng);
        }
        self.decode_inner(genotype, &mut |x| x >= 0.5)
    }

    /// Decodes using `rng` for presence draws in stochastic mode; the rng is
    /// left untouched in deterministic mode.
    pub fn decode_with<R: Rng + ?Sized>(
        &self,
        genotype: &[f64],
        rng: &mut R,
    ) -> Result<Option<Rule>> {
        match self.mode {
            ThresholdMode::Deterministic => self.decode_inner(genotype, &mut |x| x >= 0.5),
            ThresholdMode::Stochastic => {
                self.decode_inner(genotype, &mut |x| rng.random::<f64>() < x)
            }
        }
    }

    /// Returns `Ok(None)` when fewer than two conditions are enabled.
    fn decode_inner(
        &self,
        genotype: &[f64],
        present: &mut dyn FnMut(f64) -> bool,
    ) -> Result<Option<Rule>> {
        self.check(genotype)?;
        let l = self.max_len;
        let n_sel = self.selectable.len();

        // (sort key, quadruple index, condition)
        let mut enabled: Vec<(f64, usize, AttributeCondition)> = Vec::with_capacity(l);
        for j in 0..l {
            let q = &genotype[4 * j..4 * j + 4];
            if !present(q[3]) {
                continue;
            }
            let cell = ((q[0] * n_sel as f64) as usize).min(n_sel - 1);
            let feature = self.selectable[cell];
            let (lo_dom, hi_dom) = (self.domain_lo[feature], self.domain_hi[feature]);
            let span = hi_dom - lo_dom;
            let (u, v) = if q[1] < q[2] {
                (q[1], q[2])
            } else {
                (q[2], q[1])
            };
            let lo = (lo_dom + span * u).clamp(lo_dom, hi_dom);
            let hi = (lo_dom + span * v).clamp(lo, hi_dom);
            enabled.push((q[0], j, AttributeCondition::new(feature, lo, hi)));
        }

        enabled.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut seen = BTreeSet::new();
        let conditions: Vec<AttributeCondition> = enabled
            .into_iter()
            .map(|(_, _, c)| c)
            .filter(|c| seen.insert(c.feature))
            .collect();

        let e = conditions.len();
        if e < 2 {
            return Ok(None);
        }

        let window = decode_window(genotype[4 * l], genotype[4 * l + 1], self.k);
        let cut = cutting_point(genotype[4 * l + 2], l).min(e - 1);
        let mut antecedent = conditions;
        let consequent = antecedent.split_off(cut);
        Ok(Some(Rule {
            antecedent,
            consequent,
            window,
        }))
    }
}

/// Maps two window genes to an ordered class range in `[1, K]`.
pub fn decode_window(a: f64, b: f64, k: u32) -> TimeWindow {
    let endpoint = |x: f64| ((f64::from(k) * x) as u32 + 1).clamp(1, k);
    let (p, q) = (endpoint(a), endpoint(b));
    TimeWindow::new(p.min(q), p.max(q))
}

/// `⌊x·(L−1)⌋ + 1`, clamped to `[1, L−1]`.
pub fn cutting_point(x: f64, max_len: usize) -> usize {
    (((x * (max_len - 1) as f64) as usize) + 1).clamp(1, max_len - 1)
}

/// Weights of support, confidence, inclusion and amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitnessWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for FitnessWeights {
    fn default() -> Self {
        Self::new(1.0, 1.0, 1.0, 1.0)
    }
}

impl FitnessWeights {
    pub const fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma, self.delta];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::config("weights", "must be finite and non-negative"));
        }
        if all.iter().sum::<f64>() <= 0.0 {
            return Err(Error::config("weights", "must not all be zero"));
        }
        Ok(())
    }

    /// Weighted mean of the four measures.
    pub fn combine(&self, support: f64, confidence: f64, inclusion: f64, amplitude: f64) -> f64 {
        let num = self.alpha * support
            + self.beta * confidence
            + self.gamma * inclusion
            + self.delta * amplitude;
        num / (self.alpha + self.beta + self.gamma + self.delta)
    }
}

/// One scored genotype.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub rule: Option<Rule>,
    pub metrics: RuleMetrics,
}

impl Evaluation {
    pub fn fitness(&self) -> f64 {
        self.metrics.fitness
    }
}

const ZERO_METRICS: RuleMetrics = RuleMetrics {
    support: 0.0,
    confidence: 0.0,
    inclusion: 0.0,
    amplitude: 0.0,
    fitness: 0.0,
};

/// The mining objective: decode, measure and weight.
#[derive(Debug, Clone)]
pub struct RuleObjective<'db> {
    db: &'db TransactionDatabase,
    decoder: Decoder,
    weights: FitnessWeights,
    counting: Counting,
}

impl<'db> RuleObjective<'db> {
    pub fn new(
        db: &'db TransactionDatabase,
        decode: &DecodeConfig,
        weights: FitnessWeights,
        counting: Counting,
    ) -> Result<Self> {
        weights.validate()?;
        Ok(Self {
            db,
            decoder: Decoder::new(db, decode)?,
            weights,
            counting,
        })
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    pub fn database(&self) -> &'db TransactionDatabase {
        self.db
    }

    pub fn dimension(&self) -> usize {
        self.decoder.genotype_len()
    }

    /// Metrics and fitness of an already decoded rule.
    pub fn score(&self, rule: &Rule) -> RuleMetrics {
        let mut m = measures::measure(rule, self.db, self.counting);
        m.fitness = self
            .weights
            .combine(m.support, m.confidence, m.inclusion, m.amplitude);
        m
    }

    pub fn evaluate_with<R: Rng + ?Sized>(
        &self,
        genotype: &[f64],
        rng: &mut R,
    ) -> Result<Evaluation> {
        let rule = self.decoder.decode_with(genotype, rng)?;
        let metrics = rule.as_ref().map_or(ZERO_METRICS, |r| self.score(r));
        Ok(Evaluation { rule, metrics })
    }

    pub fn evaluate(&self, genotype: &[f64]) -> Result<Evaluation> {
        let rule = self.decoder.decode(genotype)?;
        let metrics = rule.as_ref().map_or(ZERO_METRICS, |r| self.score(r));
        Ok(Evaluation { rule, metrics })
    }
}

/// Fitness of a genotype; invalid rules score zero.
pub fn fitness<R: Rng + ?Sized>(
    genotype: &[f64],
    db: &TransactionDatabase,
    weights: &FitnessWeights,
    config: &DecodeConfig,
    rng: &mut R,
) -> Result<f64> {
    let objective = RuleObjective::new(db, config, *weights, Counting::Days)?;
    Ok(objective.evaluate_with(genotype, rng)?.fitness())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Five features; the fifth is CLASS and is excluded by default.
    fn db() -> TransactionDatabase {
        TransactionDatabase::new(
            vec![
                "A".into(),
                "B".into(),
                "C".into(),
                "D".into(),
                "CLASS".into(),
            ],
            vec![
                vec![0.0, 10.0, -5.0, 1.0, 1.0],
                vec![1.0, 20.0, 5.0, 1.0, 24.0],
            ],
            vec![0, 0],
            vec![1, 24],
            24,
        )
        .unwrap()
    }

    fn decoder() -> Decoder {
        Decoder::new(&db(), &DecodeConfig::default()).unwrap()
    }

    #[test]
    fn window_and_cutting_point() {
        assert_eq!(decode_window(0.5, 0.25, 24), TimeWindow::new(7, 13));
        assert_eq!(decode_window(0.0, 1.0, 24), TimeWindow::new(1, 24));
        assert_eq!(decode_window(1.0, 1.0, 24), TimeWindow::new(24, 24));
        assert_eq!(cutting_point(0.0, 4), 1);
        assert_eq!(cutting_point(0.99, 4), 3);
        assert_eq!(cutting_point(1.0, 4), 3);
        assert_eq!(cutting_point(0.5, 4), 2);
    }

    #[test]
    fn no_enabled_conditions_is_invalid() {
        assert_eq!(decoder().decode(&[0.0; 19]).unwrap(), None);
    }

    #[test]
    fn all_ones_collapse_to_one_feature() {
        let rule = decoder().decode(&[1.0; 19]);
        // Every quadruple selects the same (last selectable) feature, so only
        // one condition survives de-duplication.
        assert_eq!(rule.unwrap(), None);
    }

    #[test]
    fn malformed_genotypes_fail() {
        assert!(matches!(
            decoder().decode(&[0.5; 18]),
            Err(Error::GenotypeLength {
                expected: 19,
                actual: 18
            })
        ));
        let mut g = [0.5; 19];
        g[3] = 1.5;
        assert!(matches!(
            decoder().decode(&g),
            Err(Error::GenotypeRange { index: 3, .. })
        ));
    }

    #[test]
    fn hand_traced_decode() {
        let db = db();
        let d = decoder();
        assert_eq!(d.selectable_features(), &[0, 1, 2, 3]);
        #[rustfmt::skip]
        let g = [
            0.80, 0.25, 0.75, 0.9, // feature ⌊0.8·4⌋ = 3 (D), enabled
            0.10, 0.60, 0.20, 0.7, // feature 0 (A), bounds swapped
            0.55, 0.00, 1.00, 0.2, // disabled
            0.30, 0.50, 0.50, 0.5, // feature 1 (B), point interval
            0.5, 0.25,             // window [7, 13]
            0.0,                   // Cp = 1
        ];
        let rule = d.decode(&g).unwrap().unwrap();
        // Ordered by key: A (0.10), B (0.30), D (0.80).
        let features: Vec<usize> = rule.conditions().map(|c| c.feature).collect();
        assert_eq!(features, vec![0, 1, 3]);
        assert_eq!(rule.antecedent.len(), 1);
        assert_eq!(rule.consequent.len(), 2);
        assert_eq!(rule.window, TimeWindow::new(7, 13));
        let a = rule.antecedent[0];
        assert!((a.lo - 0.2).abs() < 1e-12 && (a.hi - 0.6).abs() < 1e-12);
        let b = rule.consequent[0];
        assert_eq!((b.lo, b.hi), (15.0, 15.0));
        // D has a constant domain [1, 1].
        assert_eq!((rule.consequent[1].lo, rule.consequent[1].hi), (1.0, 1.0));
        rule.validate(&db, 4).unwrap();
    }

    #[test]
    fn cut_is_clamped_to_enabled_count() {
        let d = decoder();
        let mut g = [0.0; 19];
        g[0] = 0.1;
        g[3] = 1.0;
        g[4] = 0.3;
        g[7] = 1.0;
        g[18] = 1.0; // Cp = 3, but only two conditions
        let rule = d.decode(&g).unwrap().unwrap();
        assert_eq!((rule.antecedent.len(), rule.consequent.len()), (1, 1));
    }

    #[test]
    fn duplicate_features_keep_the_first_in_order() {
        let d = decoder();
        let mut g = [0.0; 19];
        for (j, key) in [0.30, 0.26, 0.60].iter().enumerate() {
            g[4 * j] = *key;
            g[4 * j + 3] = 1.0;
        }
        g[6] = 1.0; // the 0.26 copy of feature 1 spans the full domain
        let rule = d.decode(&g).unwrap().unwrap();
        let features: Vec<usize> = rule.conditions().map(|c| c.feature).collect();
        assert_eq!(features, vec![1, 2]);
        assert_eq!(rule.antecedent[0].hi, 20.0);
    }

    #[test]
    fn stochastic_mode_needs_rng_and_follows_it() {
        let db = db();
        let config = DecodeConfig {
            threshold_mode: ThresholdMode::Stochastic,
            ..DecodeConfig::default()
        };
        let d = Decoder::new(&db, &config).unwrap();
        assert!(matches!(d.decode(&[0.5; 19]), Err(Error::MissingRng)));
        let mut g = [0.5; 19];
        for j in 0..4 {
            g[4 * j] = 0.1 + 0.25 * j as f64;
        }
        let a = d
            .decode_with(&g, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        let b = d
            .decode_with(&g, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        assert_eq!(a, b);
        let mut ones = g;
        for j in 0..4 {
            ones[4 * j + 3] = 1.0;
        }
        let rule = d
            .decode_with(&ones, &mut ChaCha8Rng::seed_from_u64(2))
            .unwrap()
            .unwrap();
        assert_eq!(rule.len(), 4);
    }

    #[test]
    fn decoder_config_errors() {
        let db = db();
        let short = DecodeConfig {
            max_len: 1,
            ..DecodeConfig::default()
        };
        assert!(Decoder::new(&db, &short).is_err());
        let excluded = DecodeConfig {
            excluded_features: Some([0, 1, 2, 4].into_iter().collect()),
            ..DecodeConfig::default()
        };
        assert!(Decoder::new(&db, &excluded).is_err());
    }

    #[test]
    fn fitness_arithmetic() {
        let w = FitnessWeights::default();
        let f = w.combine(0.4, 0.8, 3.0 / 18.0, 17.0 / 18.0);
        assert!((f - 26.0 / 45.0).abs() < 1e-12);
        assert!((f - 0.57778).abs() < 5e-6);
        let s = FitnessWeights::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(s.combine(0.37, 0.9, 0.1, 0.2), 0.37);
        assert!(FitnessWeights::new(0.0, 0.0, 0.0, 0.0).validate().is_err());
        assert!(FitnessWeights::new(-1.0, 1.0, 0.0, 0.0).validate().is_err());
    }

    #[test]
    fn invalid_rule_scores_zero() {
        let db = db();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = fitness(
            &[0.0; 19],
            &db,
            &FitnessWeights::default(),
            &DecodeConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn support_only_weights_give_support() {
        let db = db();
        let objective = RuleObjective::new(
            &db,
            &DecodeConfig::default(),
            FitnessWeights::new(1.0, 0.0, 0.0, 0.0),
            Counting::Days,
        )
        .unwrap();
        let mut g = [0.0; 19];
        g[0] = 0.1;
        g[2] = 1.0;
        g[3] = 1.0;
        g[4] = 0.3;
        g[6] = 1.0;
        g[7] = 1.0;
        g[17] = 1.0;
        let eval = objective.evaluate(&g).unwrap();
        let rule = eval.rule.unwrap();
        assert_eq!(eval.metrics.fitness, measures::support_t(&rule, &db));
        assert_eq!(eval.metrics.fitness, 1.0);
    }
}
