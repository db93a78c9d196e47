use std::collections::BTreeMap;

use super::{Transaction, FEATURE_NAMES};
use crate::error::{Error, Result};

pub const SEQUENCE_FEATURE: &str = "SEQUENCE";
pub const CLASS_FEATURE: &str = "CLASS";

/// N×M numeric feature matrix with the time placement of every row.
///
/// Each row carries a day index (`SEQUENCE`) and a time-of-day class in
/// `[1, K]`. For databases built from sensor telemetry these two values also
/// appear as the last two feature columns. Domain bounds are the observed
/// per-feature minimum and maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionDatabase {
    feature_names: Vec<String>,
    values: Vec<f64>,
    sequences: Vec<u32>,
    classes: Vec<u32>,
    /// Dense index of each row's sequence among the distinct sequences.
    day_slots: Vec<usize>,
    domain_lo: Vec<f64>,
    domain_hi: Vec<f64>,
    k: u32,
    n_sequences: usize,
}

impl TransactionDatabase {
    /// Builds a database from explicit columns.
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        sequences: Vec<u32>,
        classes: Vec<u32>,
        k: u32,
    ) -> Result<Self> {
        let m = feature_names.len();
        if m == 0 {
            return Err(Error::InvalidDatabase("no features".into()));
        }
        if rows.is_empty() {
            return Err(Error::NoTransactions);
        }
        if k == 0 {
            return Err(Error::config("classes", "must be at least 1"));
        }
        if sequences.len() != rows.len() || classes.len() != rows.len() {
            return Err(Error::InvalidDatabase(format!(
                "{} rows but {} sequences and {} classes",
                rows.len(),
                sequences.len(),
                classes.len()
            )));
        }
        if let Some(i) = classes.iter().position(|&c| c < 1 || c > k) {
            return Err(Error::InvalidDatabase(format!(
                "row {i} has class {} outside [1, {k}]",
                classes[i]
            )));
        }

        let mut values = Vec::with_capacity(rows.len() * m);
        let mut domain_lo = vec![f64::INFINITY; m];
        let mut domain_hi = vec![f64::NEG_INFINITY; m];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidDatabase(format!(
                    "row {i} has {} values, expected {m}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidDatabase(format!(
                        "row {i} feature {} is not finite",
                        feature_names[j]
                    )));
                }
                domain_lo[j] = domain_lo[j].min(v);
                domain_hi[j] = domain_hi[j].max(v);
            }
            values.extend_from_slice(row);
        }

        let mut slots = BTreeMap::new();
        for &s in &sequences {
            let next = slots.len();
            slots.entry(s).or_insert(next);
        }
        // Re-number in ascending sequence order.
        for (dense, slot) in slots.values_mut().enumerate() {
            *slot = dense;
        }
        let day_slots = sequences.iter().map(|s| slots[s]).collect();

        Ok(Self {
            feature_names,
            values,
            sequences,
            classes,
            day_slots,
            domain_lo,
            domain_hi,
            k,
            n_sequences: slots.len(),
        })
    }

    /// Builds the 18-feature database from preprocessed frames.
    pub fn from_transactions(transactions: &[Transaction], k: u32) -> Result<Self> {
        let rows = transactions.iter().map(|t| t.to_row().to_vec()).collect();
        Self::new(
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            rows,
            transactions.iter().map(|t| t.sequence).collect(),
            transactions.iter().map(|t| t.class).collect(),
            k,
        )
    }

    pub fn n_transactions(&self) -> usize {
        self.sequences.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.n_features();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_features())
    }

    pub fn value(&self, i: usize, feature: usize) -> f64 {
        self.values[i * self.n_features() + feature]
    }

    pub fn sequence(&self, i: usize) -> u32 {
        self.sequences[i]
    }

    pub fn sequences(&self) -> &[u32] {
        &self.sequences
    }

    pub fn class(&self, i: usize) -> u32 {
        self.classes[i]
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    /// Position of row `i`'s day among the distinct days, in `[0, n_sequences)`.
    pub fn day_slot(&self, i: usize) -> usize {
        self.day_slots[i]
    }

    pub fn domain_lo(&self) -> &[f64] {
        &self.domain_lo
    }

    pub fn domain_hi(&self) -> &[f64] {
        &self.domain_hi
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n_sequences(&self) -> usize {
        self.n_sequences
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(m: usize) -> Vec<String> {
        (0..m).map(|j| format!("F{j}")).collect()
    }

    #[test]
    fn domains_and_sequences() {
        let db = TransactionDatabase::new(
            names(2),
            vec![vec![1.0, 5.0], vec![-2.0, 5.0], vec![3.0, 5.0]],
            vec![7, 3, 7],
            vec![1, 2, 2],
            2,
        )
        .unwrap();
        assert_eq!(db.domain_lo(), &[-2.0, 5.0]);
        assert_eq!(db.domain_hi(), &[3.0, 5.0]);
        assert_eq!(db.n_sequences(), 2);
        assert_eq!(db.day_slot(0), 1);
        assert_eq!(db.day_slot(1), 0);
        assert_eq!(db.row(2), &[3.0, 5.0]);
        assert_eq!(db.rows().len(), 3);
    }

    #[test]
    fn rejects_inconsistent_input() {
        assert!(TransactionDatabase::new(names(1), vec![], vec![], vec![], 1).is_err());
        assert!(TransactionDatabase::new(names(1), vec![vec![1.0]], vec![0], vec![3], 2).is_err());
        assert!(TransactionDatabase::new(names(2), vec![vec![1.0]], vec![0], vec![1], 2).is_err());
        assert!(
            TransactionDatabase::new(names(1), vec![vec![f64::NAN]], vec![0], vec![1], 2).is_err()
        );
        assert!(TransactionDatabase::new(names(1), vec![vec![1.0]], vec![0], vec![1], 0).is_err());
    }
}
