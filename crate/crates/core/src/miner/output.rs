//! Rule listings and report tables.

use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::measures::{Rule, RuleMetrics, TimeWindow};

use super::{ArchivedRule, MiningOutcome, RuleSummary, RunReport};

const RULES_HEADER: [&str; 14] = [
    "algorithm",
    "run",
    "antecedent",
    "consequent",
    "antlen",
    "conlen",
    "t1",
    "t2",
    "k",
    "support",
    "confidence",
    "inclusion",
    "amplitude",
    "fitness",
];

/// A rule as stored in a rules CSV: feature names instead of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleRecord {
    pub algorithm: String,
    /// 1-based run number.
    pub run: usize,
    pub antecedent: Vec<(String, f64, f64)>,
    pub consequent: Vec<(String, f64, f64)>,
    pub window: TimeWindow,
    pub k: u32,
    pub metrics: RuleMetrics,
}

fn named(
    rule_side: &[crate::measures::AttributeCondition],
    names: &[String],
) -> Vec<(String, f64, f64)> {
    rule_side
        .iter()
        .map(|c| (names[c.feature].clone(), c.lo, c.hi))
        .collect()
}

impl RuleRecord {
    pub fn new(
        algorithm: &str,
        run: usize,
        archived: &ArchivedRule,
        names: &[String],
        k: u32,
    ) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            run,
            antecedent: named(&archived.rule.antecedent, names),
            consequent: named(&archived.rule.consequent, names),
            window: archived.rule.window,
            k,
            metrics: archived.metrics,
        }
    }

    /// Every archived rule of every run, in run order.
    pub fn from_outcome(outcome: &MiningOutcome, names: &[String], k: u32) -> Vec<Self> {
        outcome
            .runs
            .iter()
            .flat_map(|r| {
                r.archive
                    .iter()
                    .map(move |a| Self::new(outcome.algorithm.name(), r.run + 1, a, names, k))
            })
            .collect()
    }

    pub fn summary(&self) -> RuleSummary {
        RuleSummary {
            antecedent_len: self.antecedent.len(),
            consequent_len: self.consequent.len(),
            window: self.window,
            metrics: self.metrics,
        }
    }
}

fn write_side(out: &mut impl fmt::Write, side: &[(String, f64, f64)]) -> fmt::Result {
    for (i, (name, lo, hi)) in side.iter().enumerate() {
        if i > 0 {
            out.write_str(" AND ")?;
        }
        write!(out, "{name} ∈ [{lo:.4}, {hi:.4}]")?;
    }
    Ok(())
}

impl fmt::Display for RuleRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IF ")?;
        write_side(f, &self.antecedent)?;
        f.write_str(" THEN ")?;
        write_side(f, &self.consequent)?;
        let m = &self.metrics;
        write!(
            f,
            " @ Δt={} | supp={:.4} conf={:.4} incl={:.4} ampl={:.4} fit={:.4}",
            self.window, m.support, m.confidence, m.inclusion, m.amplitude, m.fitness
        )
    }
}

/// `IF A ∈ [lo, hi] AND … THEN … @ Δt=[t1,t2] | supp=… conf=… …`
pub fn format_rule(rule: &Rule, metrics: &RuleMetrics, names: &[String]) -> String {
    let record = RuleRecord {
        algorithm: String::new(),
        run: 0,
        antecedent: named(&rule.antecedent, names),
        consequent: named(&rule.consequent, names),
        window: rule.window,
        k: 0,
        metrics: *metrics,
    };
    record.to_string()
}

fn encode_side(side: &[(String, f64, f64)]) -> String {
    side.iter()
        .map(|(n, lo, hi)| format!("{n}[{lo},{hi}]"))
        .collect::<Vec<_>>()
        .join(" & ")
}

fn decode_side(text: &str) -> std::result::Result<Vec<(String, f64, f64)>, String> {
    text.split(" & ")
        .map(|item| {
            let (name, rest) = item
                .split_once('[')
                .ok_or_else(|| format!("condition {item:?} lacks '['"))?;
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| format!("condition {item:?} lacks ']'"))?;
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| format!("condition {item:?} lacks ','"))?;
            let lo: f64 = lo
                .trim()
                .parse()
                .map_err(|e| format!("bad bound {lo:?}: {e}"))?;
            let hi: f64 = hi
                .trim()
                .parse()
                .map_err(|e| format!("bad bound {hi:?}: {e}"))?;
            if name.is_empty() {
                return Err(format!("condition {item:?} has no feature name"));
            }
            Ok((name.to_string(), lo, hi))
        })
        .collect()
}

pub fn write_rules_csv(path: &Path, records: &[RuleRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let wrap = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(RULES_HEADER).map_err(wrap)?;
    for r in records {
        let m = &r.metrics;
        w.write_record([
            r.algorithm.clone(),
            r.run.to_string(),
            encode_side(&r.antecedent),
            encode_side(&r.consequent),
            r.antecedent.len().to_string(),
            r.consequent.len().to_string(),
            r.window.t1.to_string(),
            r.window.t2.to_string(),
            r.k.to_string(),
            m.support.to_string(),
            m.confidence.to_string(),
            m.inclusion.to_string(),
            m.amplitude.to_string(),
            m.fitness.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rules_csv(path: &Path) -> Result<Vec<RuleRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(file);
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 1;
        let row = row.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if i == 0 {
            if row.iter().ne(RULES_HEADER) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("expected header {}", RULES_HEADER.join(",")),
                ));
            }
            continue;
        }
        records.push(parse_rule_row(&row).map_err(|m| Error::parse(path, line, m))?);
    }
    Ok(records)
}

fn parse_rule_row(row: &csv::StringRecord) -> std::result::Result<RuleRecord, String> {
    if row.len() != RULES_HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            RULES_HEADER.len(),
            row.len()
        ));
    }
    fn num<T: std::str::FromStr>(
        row: &csv::StringRecord,
        i: usize,
    ) -> std::result::Result<T, String>
    where
        T::Err: fmt::Display,
    {
        row[i]
            .trim()
            .parse()
            .map_err(|e| format!("column {}: {e}", RULES_HEADER[i]))
    }
    let antecedent = decode_side(&row[2])?;
    let consequent = decode_side(&row[3])?;
    let (antlen, conlen): (usize, usize) = (num(row, 4)?, num(row, 5)?);
    if antlen != antecedent.len() || conlen != consequent.len() {
        return Err("antlen/conlen disagree with the listed conditions".into());
    }
    let (t1, t2, k): (u32, u32, u32) = (num(row, 6)?, num(row, 7)?, num(row, 8)?);
    if !(1 <= t1 && t1 <= t2 && t2 <= k) {
        return Err(format!("window [{t1},{t2}] not within 1..={k}"));
    }
    Ok(RuleRecord {
        algorithm: row[0].to_string(),
        run: num(row, 1)?,
        antecedent,
        consequent,
        window: TimeWindow::new(t1, t2),
        k,
        metrics: RuleMetrics {
            support: num(row, 9)?,
            confidence: num(row, 10)?,
            inclusion: num(row, 11)?,
            amplitude: num(row, 12)?,
            fitness: num(row, 13)?,
        },
    })
}

pub fn write_rules_text(path: &Path, records: &[RuleRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        writeln!(w, "{} run {}: {r}", r.algorithm, r.run).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One line of a report table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub algorithm: String,
    /// `None` for the mean over runs.
    pub run: Option<usize>,
    pub report: RunReport,
}

impl ReportRow {
    pub fn label(&self) -> String {
        match self.run {
            Some(r) => format!("{} run {r}", self.algorithm),
            None => format!("{} mean", self.algorithm),
        }
    }

    /// Per-run rows followed by the mean row.
    pub fn for_outcome(outcome: &MiningOutcome) -> Vec<ReportRow> {
        let name = outcome.algorithm.name().to_string();
        let mut rows: Vec<ReportRow> = outcome
            .runs
            .iter()
            .map(|r| ReportRow {
                algorithm: name.clone(),
                run: Some(r.run + 1),
                report: r.report,
            })
            .collect();
        rows.push(ReportRow {
            algorithm: name,
            run: None,
            report: outcome.mean,
        });
        rows
    }

    /// Rebuilds per-run and mean rows from rule records, grouping by
    /// algorithm (in order of first appearance) and run. Runs that archived
    /// no rule do not appear in a rules file and so cannot be counted.
    pub fn from_records(records: &[RuleRecord]) -> Vec<ReportRow> {
        let mut algorithms: Vec<&str> = Vec::new();
        for r in records {
            if !algorithms.contains(&r.algorithm.as_str()) {
                algorithms.push(&r.algorithm);
            }
        }
        let mut rows = Vec::new();
        for algorithm in algorithms {
            let mut runs: Vec<usize> = records
                .iter()
                .filter(|r| r.algorithm == algorithm)
                .map(|r| r.run)
                .collect();
            runs.sort_unstable();
            runs.dedup();
            let mut reports = Vec::new();
            for run in runs {
                let of_run = records
                    .iter()
                    .filter(|r| r.algorithm == algorithm && r.run == run);
                let k = of_run.clone().map(|r| r.k).max().unwrap_or(1);
                let report = RunReport::from_rules(of_run.map(RuleRecord::summary), k);
                reports.push(report);
                rows.push(ReportRow {
                    algorithm: algorithm.to_string(),
                    run: Some(run),
                    report,
                });
            }
            rows.push(ReportRow {
                algorithm: algorithm.to_string(),
                run: None,
                report: RunReport::mean_of(&reports),
            });
        }
        rows
    }
}

/// Fixed-width text table with one row per [`ReportRow`].
pub fn report_table(rows: &[ReportRow]) -> String {
    let labels: Vec<String> = rows.iter().map(ReportRow::label).collect();
    let width = labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0)
        .max(9);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>8}  {:>9}",
        "Algorithm", "supp", "conf", "incl", "ampl", "antlen", "conlen", "Numrules", "Intervals"
    );
    for (label, row) in labels.iter().zip(rows) {
        let r = &row.report;
        let _ = writeln!(
            out,
            "{:<width$}  {:>6.2}  {:>6.2}  {:>6.2}  {:>6.2}  {:>6.2}  {:>6.2}  {:>8}  {:>8.1}%",
            label,
            r.mean_support,
            r.mean_confidence,
            r.mean_inclusion,
            r.mean_amplitude,
            r.mean_antlen,
            r.mean_conlen,
            r.numrules,
            r.interval_coverage * 100.0
        );
    }
    out
}

pub fn write_report_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let wrap = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record([
        "algorithm",
        "run",
        "support",
        "confidence",
        "inclusion",
        "amplitude",
        "antlen",
        "conlen",
        "numrules",
        "intervals",
    ])
    .map_err(wrap)?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.algorithm.clone(),
            row.run
                .map_or_else(|| "mean".to_string(), |r| r.to_string()),
            r.mean_support.to_string(),
            r.mean_confidence.to_string(),
            r.mean_inclusion.to_string(),
            r.mean_amplitude.to_string(),
            r.mean_antlen.to_string(),
            r.mean_conlen.to_string(),
            r.numrules.to_string(),
            r.interval_coverage.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::AttributeCondition;

    fn record(run: usize, window: (u32, u32)) -> RuleRecord {
        RuleRecord {
            algorithm: "DE".into(),
            run,
            antecedent: vec![("AVG_TEMPERATURE".into(), 24.1, 25.3)],
            consequent: vec![("MAX_LIGHT".into(), 0.0, 120.5), ("CLASS".into(), 3.0, 7.0)],
            window: TimeWindow::new(window.0, window.1),
            k: 24,
            metrics: RuleMetrics {
                support: 0.4,
                confidence: 0.8,
                inclusion: 3.0 / 18.0,
                amplitude: 17.0 / 18.0,
                fitness: 26.0 / 45.0,
            },
        }
    }

    #[test]
    fn rules_csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rules.csv");
        let records = vec![record(1, (7, 13)), record(2, (1, 24))];
        write_rules_csv(&path, &records).unwrap();
        assert_eq!(read_rules_csv(&path).unwrap(), records);
    }

    #[test]
    fn rules_csv_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rules.csv");
        write_rules_csv(&path, &[record(1, (7, 13))]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace(",7,13,", ",13,7,")).unwrap();
        let err = read_rules_csv(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        std::fs::write(&path, "a,b\n").unwrap();
        assert!(matches!(
            read_rules_csv(&path).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn rule_line_format() {
        let names: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let rule = Rule {
            antecedent: vec![AttributeCondition::new(0, 1.0, 2.5)],
            consequent: vec![AttributeCondition::new(2, 0.0, 0.125)],
            window: TimeWindow::new(7, 13),
        };
        let m = RuleMetrics {
            support: 0.4,
            confidence: 0.8,
            inclusion: 0.1,
            amplitude: 0.9,
            fitness: 0.55,
        };
        assert_eq!(
            format_rule(&rule, &m, &names),
            "IF A ∈ [1.0000, 2.5000] THEN C ∈ [0.0000, 0.1250] @ Δt=[7,13] | \
             supp=0.4000 conf=0.8000 incl=0.1000 ampl=0.9000 fit=0.5500"
        );
    }

    #[test]
    fn report_rows_from_records() {
        let records = vec![record(1, (1, 12)), record(1, (13, 24)), record(2, (12, 14))];
        let rows = ReportRow::from_records(&records);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].report.numrules, 2);
        assert_eq!(rows[0].report.interval_coverage, 1.0);
        assert_eq!(rows[1].report.interval_coverage, 0.125);
        assert_eq!(rows[2].run, None);
        assert_eq!(rows[2].report.numrules, 2);
        assert!((rows[2].report.interval_coverage - 0.5625).abs() < 1e-12);
        let table = report_table(&rows);
        assert!(table.lines().next().unwrap().contains("Numrules"));
        assert!(table.contains("DE mean"));
        assert!(table.contains("100.0%"));
    }
}
