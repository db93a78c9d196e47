//! Shared fixtures and a brute-force reference for time-window counting.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use tsarm::datagen::{generate, GenConfig};
use tsarm::measures::{AttributeCondition, Rule, TimeWindow};
use tsarm::preprocess::{build_database, PreprocessConfig, TransactionDatabase};

/// Day-level counts by direct enumeration: for every day, scan all of its
/// transactions. Returns `(days with X∪Y, days with X, days)`.
pub fn oracle_day_counts(rule: &Rule, db: &TransactionDatabase) -> (usize, usize, usize) {
    let days: BTreeSet<u32> = db.sequences().iter().copied().collect();
    let holds = |i: usize, conds: &[AttributeCondition]| {
        conds.iter().all(|c| {
            let v = db.value(i, c.feature);
            v >= c.lo && v <= c.hi
        })
    };
    let in_window = |i: usize| {
        let c = db.class(i);
        c >= rule.window.t1 && c <= rule.window.t2
    };
    let (mut both, mut ante) = (0, 0);
    for &day in &days {
        let rows: Vec<usize> = (0..db.n_transactions())
            .filter(|&i| db.sequence(i) == day && in_window(i))
            .collect();
        if rows
            .iter()
            .any(|&i| holds(i, &rule.antecedent) && holds(i, &rule.consequent))
        {
            both += 1;
        }
        if rows.iter().any(|&i| holds(i, &rule.antecedent)) {
            ante += 1;
        }
    }
    (both, ante, days.len())
}

/// Transaction-level counts by direct enumeration.
pub fn oracle_transaction_counts(rule: &Rule, db: &TransactionDatabase) -> (usize, usize, usize) {
    let (mut both, mut ante, mut total) = (0, 0, 0);
    for i in 0..db.n_transactions() {
        let c = db.class(i);
        if c < rule.window.t1 || c > rule.window.t2 {
            continue;
        }
        total += 1;
        let x = rule
            .antecedent
            .iter()
            .all(|a| (a.lo..=a.hi).contains(&db.value(i, a.feature)));
        let y = rule
            .consequent
            .iter()
            .all(|a| (a.lo..=a.hi).contains(&db.value(i, a.feature)));
        ante += x as usize;
        both += (x && y) as usize;
    }
    (both, ante, total)
}

pub fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// A small database with integer-valued features so that interval
/// conditions match often.
pub fn random_db(rng: &mut impl Rng, max_rows: usize, max_features: usize) -> TransactionDatabase {
    let m = rng.random_range(2..=max_features);
    let n = rng.random_range(1..=max_rows);
    let k = rng.random_range(1..=24);
    let days = rng.random_range(1..=6);
    let names = (0..m).map(|j| format!("F{j}")).collect();
    let rows = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| f64::from(rng.random_range(0..5u8)))
                .collect()
        })
        .collect();
    let sequences = (0..n).map(|_| rng.random_range(1..=days)).collect();
    let classes = (0..n).map(|_| rng.random_range(1..=k)).collect();
    TransactionDatabase::new(names, rows, sequences, classes, k).unwrap()
}

/// A rule over `db` with disjoint, non-empty sides.
pub fn random_rule(rng: &mut impl Rng, db: &TransactionDatabase) -> Rule {
    let m = db.n_features();
    let mut features: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        features.swap(i, rng.random_range(0..=i));
    }
    let len = rng.random_range(2..=m.min(4));
    let cut = rng.random_range(1..len);
    let mut conds: Vec<AttributeCondition> = features[..len]
        .iter()
        .map(|&f| {
            let a = rng.random_range(-1.0..5.0f64).round();
            let b = rng.random_range(-1.0..5.0f64).round();
            AttributeCondition::new(f, a.min(b), a.max(b))
        })
        .collect();
    let consequent = conds.split_off(cut);
    let t1 = rng.random_range(1..=db.k());
    let t2 = rng.random_range(t1..=db.k());
    Rule {
        antecedent: conds,
        consequent,
        window: TimeWindow::new(t1, t2),
    }
}

/// The 14-day hourly database: 336 transactions of 18 features.
pub fn fourteen_day_db(seed: u64) -> TransactionDatabase {
    let records = generate(&GenConfig {
        days: 14,
        seed,
        ..GenConfig::default()
    })
    .unwrap();
    build_database(&records, &PreprocessConfig::default()).unwrap()
}

/// `-Σ (x − 0.5)²`, maximized at the centre of the box.
pub fn neg_sphere(x: &[f64]) -> f64 {
    -x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>()
}
