//! Rule-quality measures over a [`TransactionDatabase`].
//!
//! Support and confidence are restricted to a time window `[t1, t2]` of
//! time-of-day classes. By default they are counted per day: a day counts
//! toward a numerator if at least one of its in-window transactions matches,
//! and support divides by the number of days in the database. The literal
//! per-transaction reading is available as [`Counting::Transactions`].
//!
//! Inclusion and amplitude do not depend on time.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::preprocess::TransactionDatabase;

/// `feature ∈ [lo, hi]`, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributeCondition {
    pub feature: usize,
    pub lo: f64,
    pub hi: f64,
}

impl AttributeCondition {
    pub fn new(feature: usize, lo: f64, hi: f64) -> Self {
        Self { feature, lo, hi }
    }

    #[inline]
    pub fn holds(&self, row: &[f64]) -> bool {
        let v = row[self.feature];
        self.lo <= v && v <= self.hi
    }
}

/// Inclusive range of time-of-day classes, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeWindow {
    pub t1: u32,
    pub t2: u32,
}

impl TimeWindow {
    pub fn new(t1: u32, t2: u32) -> Self {
        Self { t1, t2 }
    }

    /// The window spanning every class of a day.
    pub fn full(k: u32) -> Self {
        Self { t1: 1, t2: k }
    }

    #[inline]
    pub fn contains(&self, class: u32) -> bool {
        self.t1 <= class && class <= self.t2
    }

    pub fn len(&self) -> u32 {
        self.t2 + 1 - self.t1
    }

    pub fn is_empty(&self) -> bool {
        self.t2 < self.t1
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.t1, self.t2)
    }
}

/// `X(Δt) ⇒ Y(Δt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub antecedent: Vec<AttributeCondition>,
    pub consequent: Vec<AttributeCondition>,
    pub window: TimeWindow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleViolation {
    EmptySide,
    TooLong { len: usize, max: usize },
    SharedFeature(usize),
    UnknownFeature(usize),
    BadInterval { feature: usize, lo: f64, hi: f64 },
    BadWindow(TimeWindow),
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleViolation::EmptySide => write!(f, "antecedent and consequent must be non-empty"),
            RuleViolation::TooLong { len, max } => {
                write!(f, "rule has {len} conditions, max {max}")
            }
            RuleViolation::SharedFeature(j) => write!(f, "feature {j} appears more than once"),
            RuleViolation::UnknownFeature(j) => write!(f, "feature {j} does not exist"),
            RuleViolation::BadInterval { feature, lo, hi } => {
                write!(
                    f,
                    "interval [{lo}, {hi}] of feature {feature} is outside its domain"
                )
            }
            RuleViolation::BadWindow(w) => write!(f, "time window {w} is invalid"),
        }
    }
}

impl Rule {
    pub fn len(&self) -> usize {
        self.antecedent.len() + self.consequent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn conditions(&self) -> impl Iterator<Item = &AttributeCondition> {
        self.antecedent.iter().chain(&self.consequent)
    }

    /// Checks structural invariants against a database and a maximum length.
    pub fn validate(&self, db: &TransactionDatabase, max_len: usize) -> Result<(), RuleViolation> {
        if self.antecedent.is_empty() || self.consequent.is_empty() {
            return Err(RuleViolation::EmptySide);
        }
        if self.len() > max_len {
            return Err(RuleViolation::TooLong {
                len: self.len(),
                max: max_len,
            });
        }
        let mut seen = vec![false; db.n_features()];
        for c in self.conditions() {
            if c.feature >= db.n_features() {
                return Err(RuleViolation::UnknownFeature(c.feature));
            }
            if std::mem::replace(&mut seen[c.feature], true) {
                return Err(RuleViolation::SharedFeature(c.feature));
            }
            let (dlo, dhi) = (db.domain_lo()[c.feature], db.domain_hi()[c.feature]);
            if !(dlo <= c.lo && c.lo <= c.hi && c.hi <= dhi) {
                return Err(RuleViolation::BadInterval {
                    feature: c.feature,
                    lo: c.lo,
                    hi: c.hi,
                });
            }
        }
        let w = self.window;
        if !(1 <= w.t1 && w.t1 <= w.t2 && w.t2 <= db.k()) {
            return Err(RuleViolation::BadWindow(w));
        }
        Ok(())
    }
}

/// Every condition holds for the row. An empty list matches everything.
pub fn matches(row: &[f64], conditions: &[AttributeCondition]) -> bool {
    conditions.iter().all(|c| c.holds(row))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Counting {
    /// Count distinct days with at least one matching in-window transaction.
    #[default]
    Days,
    /// Count individual in-window transactions.
    Transactions,
}

/// Raw numerators and denominators behind support and confidence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WindowCounts {
    /// Units matching `X ∪ Y` within the window.
    pub both: usize,
    /// Units matching `X` within the window.
    pub antecedent: usize,
    /// Support denominator.
    pub total: usize,
}

impl WindowCounts {
    pub fn support(&self) -> f64 {
        ratio(self.both, self.total)
    }

    pub fn confidence(&self) -> f64 {
        ratio(self.both, self.antecedent)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn count(rule: &Rule, db: &TransactionDatabase, counting: Counting) -> WindowCounts {
    match counting {
        Counting::Days => count_days(rule, db),
        Counting::Transactions => count_transactions(rule, db),
    }
}

fn count_days(rule: &Rule, db: &TransactionDatabase) -> WindowCounts {
    // 0 = no match seen, 1 = X matched, 2 = X and Y matched
    let mut state = vec![0u8; db.n_sequences()];
    for (i, row) in db.rows().enumerate() {
        if !rule.window.contains(db.class(i)) {
            continue;
        }
        let slot = db.day_slot(i);
        if state[slot] == 2 || !matches(row, &rule.antecedent) {
            continue;
        }
        state[slot] = if matches(row, &rule.consequent) { 2 } else { 1 };
    }
    WindowCounts {
        both: state.iter().filter(|&&s| s == 2).count(),
        antecedent: state.iter().filter(|&&s| s >= 1).count(),
        total: db.n_sequences(),
    }
}

fn count_transactions(rule: &Rule, db: &TransactionDatabase) -> WindowCounts {
    let mut counts = WindowCounts::default();
    for (i, row) in db.rows().enumerate() {
        if !rule.window.contains(db.class(i)) {
            continue;
        }
        counts.total += 1;
        if matches(row, &rule.antecedent) {
            counts.antecedent += 1;
            if matches(row, &rule.consequent) {
                counts.both += 1;
            }
        }
    }
    counts
}

pub fn support_t(rule: &Rule, db: &TransactionDatabase) -> f64 {
    count_days(rule, db).support()
}

pub fn confidence_t(rule: &Rule, db: &TransactionDatabase) -> f64 {
    count_days(rule, db).confidence()
}

/// `(|X| + |Y|) / M`.
pub fn inclusion(rule: &Rule, n_features: usize) -> f64 {
    rule.len() as f64 / n_features as f64
}

/// `1 − (1/M)·Σ (hi − lo)/(domain_hi − domain_lo)` over the rule's
/// conditions. Constant features contribute zero width.
pub fn amplitude(rule: &Rule, db: &TransactionDatabase) -> f64 {
    let widths: f64 = rule
        .conditions()
        .map(|c| {
            let span = db.domain_hi()[c.feature] - db.domain_lo()[c.feature];
            if span > 0.0 {
                (c.hi - c.lo) / span
            } else {
                0.0
            }
        })
        .sum();
    1.0 - widths / db.n_features() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleMetrics {
    pub support: f64,
    pub confidence: f64,
    pub inclusion: f64,
    pub amplitude: f64,
    pub fitness: f64,
}

/// Support, confidence, inclusion and amplitude of a rule; `fitness` is left
/// at zero for the caller to fill in.
pub fn measure(rule: &Rule, db: &TransactionDatabase, counting: Counting) -> RuleMetrics {
    let counts = count(rule, db, counting);
    RuleMetrics {
        support: counts.support(),
        confidence: counts.confidence(),
        inclusion: inclusion(rule, db.n_features()),
        amplitude: amplitude(rule, db),
        fitness: 0.0,
    }
}
