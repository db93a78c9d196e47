//! Raw telemetry → time-frame transactions.
//!
//! Records are grouped into fixed-duration frames aligned to midnight. Each
//! frame is reduced by the MIN/MAX/AVG/DIF modifiers over the four sensed
//! indicators, and its date and time of day become the `SEQUENCE` and
//! `CLASS` features.

mod database;
mod io;

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::datagen::{SensorRecord, SECONDS_PER_DAY};
use crate::error::{Error, Result};

pub use database::{TransactionDatabase, CLASS_FEATURE, SEQUENCE_FEATURE};
pub use io::{
    parse_sensor_csv, parse_sensor_reader, read_database, sidecar_path, write_database,
    DatabaseMeta,
};

/// Compound feature names, in transaction-column order.
pub const FEATURE_NAMES: [&str; 18] = [
    "AVG_TEMPERATURE",
    "MAX_TEMPERATURE",
    "MIN_TEMPERATURE",
    "DIF_TEMPERATURE",
    "AVG_HUMIDITY",
    "MAX_HUMIDITY",
    "MIN_HUMIDITY",
    "DIF_HUMIDITY",
    "AVG_MOISTURE",
    "MAX_MOISTURE",
    "MIN_MOISTURE",
    "DIF_MOISTURE",
    "AVG_LIGHT",
    "MAX_LIGHT",
    "MIN_LIGHT",
    "DIF_LIGHT",
    "SEQUENCE",
    "CLASS",
];

/// Number of modifier-derived features (everything except SEQUENCE and CLASS).
pub const SENSED_FEATURES: usize = 16;

/// Wall-clock time of day with one-second resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeOfDay(u32);

impl TimeOfDay {
    pub fn from_hms(hours: u32, minutes: u32, seconds: u32) -> Result<Self> {
        timestamp_of(hours, minutes, seconds).map(TimeOfDay)
    }

    pub fn from_seconds(seconds: u32) -> Result<Self> {
        if seconds < SECONDS_PER_DAY {
            Ok(TimeOfDay(seconds))
        } else {
            Err(Error::InvalidTime {
                hours: seconds / 3600,
                minutes: seconds / 60 % 60,
                seconds: seconds % 60,
            })
        }
    }

    /// Seconds since midnight, in `[0, 86399]`.
    pub fn seconds(self) -> u32 {
        self.0
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:02}:{:02}:{:02}",
            self.0 / 3600,
            self.0 / 60 % 60,
            self.0 % 60
        )
    }
}

impl FromStr for TimeOfDay {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut parts = s.trim().split(':');
        let mut next = |name: &str| -> std::result::Result<u32, String> {
            let part = parts
                .next()
                .ok_or_else(|| format!("time {s:?} is not hh:mm:ss"))?;
            part.parse::<u32>()
                .map_err(|_| format!("time {s:?} has a non-numeric {name}"))
        };
        let (h, m, sec) = (next("hour")?, next("minute")?, next("second")?);
        if parts.next().is_some() {
            return Err(format!("time {s:?} is not hh:mm:ss"));
        }
        TimeOfDay::from_hms(h, m, sec).map_err(|e| e.to_string())
    }
}

/// `hh·3600 + mm·60 + ss`, rejecting out-of-range components.
pub fn timestamp_of(hours: u32, minutes: u32, seconds: u32) -> Result<u32> {
    if hours < 24 && minutes < 60 && seconds < 60 {
        Ok(hours * 3600 + minutes * 60 + seconds)
    } else {
        Err(Error::InvalidTime {
            hours,
            minutes,
            seconds,
        })
    }
}

/// Time-of-day class `⌊timestamp/86400 · K⌋ + 1`, computed in integers.
///
/// # Panics
/// If `k == 0` or `timestamp` is not a valid second of the day.
pub fn class_of(timestamp: u32, k: u32) -> u32 {
    assert!(k >= 1, "K must be positive");
    assert!(
        timestamp < SECONDS_PER_DAY,
        "timestamp {timestamp} out of range"
    );
    (u64::from(timestamp) * u64::from(k) / u64::from(SECONDS_PER_DAY)) as u32 + 1
}

/// Whole days elapsed since `start`.
pub fn sequence_of(date: NaiveDate, start: NaiveDate) -> Result<u32> {
    let days = (date - start).num_days();
    if days < 0 {
        return Err(Error::DateBeforeStart { date, start });
    }
    u32::try_from(days).map_err(|_| Error::config("start_date", "date span too large"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub frame_duration_seconds: u32,
    /// Number of time-of-day classes.
    #[serde(rename = "classes")]
    pub k: u32,
    pub min_records_per_frame: usize,
    /// Date mapped to `SEQUENCE = 0`; defaults to the first record's date.
    pub start_date: Option<NaiveDate>,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            frame_duration_seconds: 3600,
            k: 24,
            min_records_per_frame: 1,
            start_date: None,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frame_duration_seconds == 0
            || !SECONDS_PER_DAY.is_multiple_of(self.frame_duration_seconds)
        {
            return Err(Error::config(
                "frame_duration_seconds",
                "must be a positive divisor of 86400",
            ));
        }
        if self.k == 0 {
            return Err(Error::config("classes", "must be at least 1"));
        }
        Ok(())
    }
}

/// One time frame reduced to its compound features.
#[derive(Debug, Clone, PartialEq)]
pub struct Transaction {
    /// The sixteen modifier features in [`FEATURE_NAMES`] order.
    pub features: [f64; SENSED_FEATURES],
    pub sequence: u32,
    pub class: u32,
}

impl Transaction {
    pub fn feature(&self, name: &str) -> Option<f64> {
        let index = FEATURE_NAMES.iter().position(|n| *n == name)?;
        Some(self.to_row()[index])
    }

    pub fn to_row(&self) -> [f64; 18] {
        let mut row = [0.0; 18];
        row[..SENSED_FEATURES].copy_from_slice(&self.features);
        row[16] = f64::from(self.sequence);
        row[17] = f64::from(self.class);
        row
    }
}

/// MIN, MAX, AVG and DIF (last − first) of one indicator.
fn modifiers(values: impl Iterator<Item = f64> + Clone) -> [f64; 4] {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut first = f64::NAN;
    let mut last = f64::NAN;
    for v in values {
        if count == 0 {
            first = v;
        }
        last = v;
        min = min.min(v);
        max = max.max(v);
        sum += v;
        count += 1;
    }
    // Rounding in the sum can push the mean a hair outside [min, max].
    let avg = (sum / count as f64).clamp(min, max);
    [avg, max, min, last - first]
}

/// Reduces one frame to a [`Transaction`].
///
/// The class comes from the first record's time of day and the sequence from
/// the frame's date relative to `start_date`.
pub fn extract_features(
    frame: &[SensorRecord],
    start_date: NaiveDate,
    k: u32,
) -> Result<Transaction> {
    let first = frame.first().ok_or(Error::EmptyFrame)?;
    if let Some(other) = frame.iter().find(|r| r.date != first.date) {
        return Err(Error::MixedDates {
            first: first.date,
            other: other.date,
        });
    }
    if k == 0 {
        return Err(Error::config("classes", "must be at least 1"));
    }

    let indicators: [fn(&SensorRecord) -> f64; 4] = [
        |r| r.temperature,
        |r| r.humidity,
        |r| f64::from(r.moisture),
        |r| r.light,
    ];
    let mut features = [0.0; SENSED_FEATURES];
    for (slot, indicator) in features.chunks_exact_mut(4).zip(indicators) {
        slot.copy_from_slice(&modifiers(frame.iter().map(indicator)));
    }

    Ok(Transaction {
        features,
        sequence: sequence_of(first.date, start_date)?,
        class: class_of(first.time.seconds(), k),
    })
}

/// Partitions chronologically ordered records into frames and builds the
/// transaction database.
pub fn build_transactions(
    records: &[SensorRecord],
    config: &PreprocessConfig,
) -> Result<Vec<Transaction>> {
    config.validate()?;
    let Some(first) = records.first() else {
        return Err(Error::NoTransactions);
    };
    let start = config.start_date.unwrap_or(first.date);
    let frame_of = |r: &SensorRecord| (r.date, r.time.seconds() / config.frame_duration_seconds);

    let mut transactions = Vec::new();
    let mut begin = 0;
    for i in 1..=records.len() {
        if i < records.len() {
            let (prev, cur) = (&records[i - 1], &records[i]);
            if (cur.date, cur.time) < (prev.date, prev.time) {
                return Err(Error::NotChronological { index: i });
            }
            if frame_of(prev) == frame_of(cur) {
                continue;
            }
        }
        let frame = &records[begin..i];
        if frame.len() >= config.min_records_per_frame {
            transactions.push(extract_features(frame, start, config.k)?);
        }
        begin = i;
    }

    if transactions.is_empty() {
        return Err(Error::NoTransactions);
    }
    Ok(transactions)
}

pub fn build_database(
    records: &[SensorRecord],
    config: &PreprocessConfig,
) -> Result<TransactionDatabase> {
    let transactions = build_transactions(records, config)?;
    TransactionDatabase::from_transactions(&transactions, config.k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(temperature: f64, date: NaiveDate, seconds: u32) -> SensorRecord {
        SensorRecord {
            measuring_point: "n1".into(),
            light: 0.0,
            temperature,
            humidity: 58.0,
            moisture: 1990,
            date,
            time: TimeOfDay::from_seconds(seconds).unwrap(),
        }
    }

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2022, 9, d).unwrap()
    }

    #[test]
    fn timestamps() {
        assert_eq!(timestamp_of(0, 0, 0).unwrap(), 0);
        assert_eq!(timestamp_of(12, 30, 15).unwrap(), 45_015);
        assert_eq!(timestamp_of(23, 59, 59).unwrap(), 86_399);
        assert!(timestamp_of(24, 0, 0).is_err());
        assert!(timestamp_of(0, 60, 0).is_err());
        assert!(timestamp_of(0, 0, 60).is_err());
    }

    #[test]
    fn classes() {
        assert_eq!(class_of(4, 24), 1);
        assert_eq!(class_of(43_200, 24), 13);
        assert_eq!(class_of(86_399, 24), 24);
        assert_eq!(class_of(86_399, 1), 1);
        assert_eq!(class_of(86_399, 86_400), 86_400);
    }

    #[test]
    fn class_is_monotone_and_surjective() {
        for k in [1, 5, 24, 96] {
            let mut seen = vec![false; k as usize];
            let mut prev = 1;
            for t in 0..SECONDS_PER_DAY {
                let c = class_of(t, k);
                assert!(c >= prev && (1..=k).contains(&c));
                seen[(c - 1) as usize] = true;
                prev = c;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn sequences() {
        assert_eq!(sequence_of(day(15), day(15)).unwrap(), 0);
        assert_eq!(sequence_of(day(16), day(15)).unwrap(), 1);
        assert_eq!(sequence_of(day(28), day(15)).unwrap(), 13);
        assert!(matches!(
            sequence_of(day(14), day(15)),
            Err(Error::DateBeforeStart { .. })
        ));
    }

    #[test]
    fn time_parsing() {
        assert_eq!("00:00:04".parse::<TimeOfDay>().unwrap().seconds(), 4);
        assert_eq!(
            "23:59:59".parse::<TimeOfDay>().unwrap().to_string(),
            "23:59:59"
        );
        assert!("25:00:00".parse::<TimeOfDay>().is_err());
        assert!("12:00".parse::<TimeOfDay>().is_err());
        assert!("12:00:00:00".parse::<TimeOfDay>().is_err());
        assert!("aa:00:00".parse::<TimeOfDay>().is_err());
    }

    #[test]
    fn constant_signal_modifiers() {
        let frame: Vec<_> = (0..10).map(|i| record(24.6, day(15), i * 5)).collect();
        let t = extract_features(&frame, day(15), 24).unwrap();
        assert_eq!(t.feature("MIN_TEMPERATURE"), Some(24.6));
        assert_eq!(t.feature("MAX_TEMPERATURE"), Some(24.6));
        assert_eq!(t.feature("AVG_TEMPERATURE"), Some(24.6));
        assert_eq!(t.feature("DIF_TEMPERATURE"), Some(0.0));
    }

    #[test]
    fn four_step_modifiers() {
        let frame: Vec<_> = [24.7, 24.7, 24.6, 24.6]
            .iter()
            .enumerate()
            .map(|(i, &t)| record(t, day(15), i as u32 * 5))
            .collect();
        let t = extract_features(&frame, day(15), 24).unwrap();
        assert_eq!(t.feature("MIN_TEMPERATURE"), Some(24.6));
        assert_eq!(t.feature("MAX_TEMPERATURE"), Some(24.7));
        assert!((t.feature("AVG_TEMPERATURE").unwrap() - 24.65).abs() < 1e-12);
        assert!((t.feature("DIF_TEMPERATURE").unwrap() + 0.1).abs() < 1e-12);
        assert_eq!(t.sequence, 0);
        assert_eq!(t.class, 1);
    }

    #[test]
    fn extract_rejects_bad_frames() {
        assert!(matches!(
            extract_features(&[], day(15), 24),
            Err(Error::EmptyFrame)
        ));
        let mixed = [record(20.0, day(15), 10), record(20.0, day(16), 10)];
        assert!(matches!(
            extract_features(&mixed, day(15), 24),
            Err(Error::MixedDates { .. })
        ));
    }

    #[test]
    fn frames_align_to_midnight_and_drop_sparse_frames() {
        let mut records = Vec::new();
        for s in (0..7200).step_by(600) {
            records.push(record(20.0, day(15), s));
        }
        records.push(record(21.0, day(15), 7300));
        let config = PreprocessConfig {
            min_records_per_frame: 2,
            ..PreprocessConfig::default()
        };
        let transactions = build_transactions(&records, &config).unwrap();
        assert_eq!(transactions.len(), 2);
        assert_eq!(transactions[0].class, 1);
        assert_eq!(transactions[1].class, 2);

        let config = PreprocessConfig {
            min_records_per_frame: 100,
            ..PreprocessConfig::default()
        };
        assert!(matches!(
            build_transactions(&records, &config),
            Err(Error::NoTransactions)
        ));
    }

    #[test]
    fn unordered_records_are_rejected() {
        let records = [record(20.0, day(15), 100), record(20.0, day(15), 50)];
        assert!(matches!(
            build_transactions(&records, &PreprocessConfig::default()),
            Err(Error::NotChronological { index: 1 })
        ));
    }

    #[test]
    fn config_validation() {
        let bad_frame = PreprocessConfig {
            frame_duration_seconds: 7000,
            ..PreprocessConfig::default()
        };
        assert!(bad_frame.validate().is_err());
        let bad_k = PreprocessConfig {
            k: 0,
            ..PreprocessConfig::default()
        };
        assert!(bad_k
            .validate()
            .unwrap_err()
            .to_string()
            .contains("classes"));
    }
}
