//! Synthetic single-station sensor telemetry.
//!
//! The generator emulates a soil/air monitoring node that reports light,
//! air temperature, relative humidity and soil moisture at a fixed cadence.
//! Each signal follows a simple physical model plus uniform jitter sized to
//! the sensor's accuracy:
//!
//! * light: `max(0, A·sin(π·(t − sunrise)/daylength))`, zero outside daylight,
//!   with a per-day peak `A` (cloud cover),
//! * temperature: a 24 h sinusoid peaking mid-afternoon plus a per-day offset,
//! * humidity: anti-correlated with the noiseless temperature,
//! * moisture: exponential drying between periodic irrigation events.
//!
//! Output is a pure function of [`GenConfig`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::TimeOfDay;

pub const SECONDS_PER_DAY: u32 = 86_400;

pub const LIGHT_RANGE: (f64, f64) = (0.0, 100_000.0);
pub const TEMPERATURE_RANGE: (f64, f64) = (-40.0, 80.0);
pub const HUMIDITY_RANGE: (f64, f64) = (0.0, 100.0);
pub const MOISTURE_MAX: u32 = 2300;

/// Header written by [`write_csv`] and expected by the sensor CSV parser.
pub const SENSOR_CSV_HEADER: [&str; 7] = [
    "mp",
    "light",
    "temperature",
    "humidity",
    "moisture",
    "date",
    "time",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub days: u32,
    pub cadence_seconds: f64,
    pub start_date: NaiveDate,
    pub seed: u64,
    /// Probability that an individual record is omitted (transmission loss).
    pub drop_rate: f64,
    pub measuring_point: String,
    /// Seconds after midnight at which light starts rising.
    pub sunrise_seconds: u32,
    pub daylight_seconds: u32,
    /// Peak illuminance on a clear day, in lux.
    pub peak_lux: f64,
    pub irrigation_interval_hours: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            days: 14,
            cadence_seconds: 5.0,
            start_date: NaiveDate::from_ymd_opt(2022, 9, 15).expect("valid date"),
            seed: 0,
            drop_rate: 0.0,
            measuring_point: "n1".to_string(),
            sunrise_seconds: 6 * 3600,
            daylight_seconds: 12 * 3600,
            peak_lux: 30_000.0,
            irrigation_interval_hours: 72.0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.days < 1 {
            return Err(Error::config("days", "must be at least 1"));
        }
        if !(self.cadence_seconds.is_finite() && self.cadence_seconds > 0.0) {
            return Err(Error::config(
                "cadence_seconds",
                "must be a positive number",
            ));
        }
        if !(0.0..1.0).contains(&self.drop_rate) {
            return Err(Error::config("drop_rate", "must lie in [0, 1)"));
        }
        if self.measuring_point.is_empty() || self.measuring_point.contains([',', '"', '\n']) {
            return Err(Error::config(
                "measuring_point",
                "must be a non-empty identifier without commas or quotes",
            ));
        }
        if self.daylight_seconds == 0
            || self.sunrise_seconds + self.daylight_seconds > SECONDS_PER_DAY
        {
            return Err(Error::config(
                "daylight_seconds",
                "daylight must be non-empty and end before midnight",
            ));
        }
        if !(self.peak_lux > 0.0 && self.peak_lux <= LIGHT_RANGE.1) {
            return Err(Error::config("peak_lux", "must lie in (0, 100000]"));
        }
        if !(self.irrigation_interval_hours.is_finite() && self.irrigation_interval_hours > 0.0) {
            return Err(Error::config(
                "irrigation_interval_hours",
                "must be a positive number",
            ));
        }
        Ok(())
    }

    /// Number of sampling instants before any records are dropped.
    pub fn slot_count(&self) -> u64 {
        (f64::from(self.days) * f64::from(SECONDS_PER_DAY) / self.cadence_seconds).floor() as u64
    }

    pub fn is_night(&self, time: TimeOfDay) -> bool {
        let t = time.seconds();
        t < self.sunrise_seconds || t >= self.sunrise_seconds + self.daylight_seconds
    }
}

/// One raw telemetry tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorRecord {
    pub measuring_point: String,
    /// Illuminance in lux.
    pub light: f64,
    /// Air temperature in °C.
    pub temperature: f64,
    /// Relative humidity in %.
    pub humidity: f64,
    /// Raw soil moisture reading.
    pub moisture: u32,
    pub date: NaiveDate,
    pub time: TimeOfDay,
}

impl SensorRecord {
    /// Checks every field against the sensor's physical range.
    pub fn check_ranges(&self) -> std::result::Result<(), String> {
        let check = |name: &str, value: f64, (lo, hi): (f64, f64)| {
            if value.is_finite() && (lo..=hi).contains(&value) {
                Ok(())
            } else {
                Err(format!("{name} {value} outside [{lo}, {hi}]"))
            }
        };
        check("light", self.light, LIGHT_RANGE)?;
        check("temperature", self.temperature, TEMPERATURE_RANGE)?;
        check("humidity", self.humidity, HUMIDITY_RANGE)?;
        if self.moisture > MOISTURE_MAX {
            return Err(format!(
                "moisture {} outside [0, {MOISTURE_MAX}]",
                self.moisture
            ));
        }
        Ok(())
    }
}

fn quantize(value: f64, steps_per_unit: f64) -> f64 {
    (value * steps_per_unit).round() / steps_per_unit
}

struct DayState {
    peak_lux: f64,
    temperature_offset: f64,
}

/// Generates the full record sequence, sorted by date and time.
pub fn generate(config: &GenConfig) -> Result<Vec<SensorRecord>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let days: Vec<DayState> = (0..config.days)
        .map(|_| DayState {
            peak_lux: config.peak_lux * rng.random_range(0.45..=1.0),
            temperature_offset: rng.random_range(-1.5..=1.5),
        })
        .collect();

    let slots = config.slot_count();
    let mut records = Vec::with_capacity(slots as usize);
    let irrigation_interval = config.irrigation_interval_hours * 3600.0;
    let irrigation_phase = 7.0 * 3600.0;

    for slot in 0..slots {
        let elapsed = (slot as f64 * config.cadence_seconds).floor();
        let day_index = (elapsed / f64::from(SECONDS_PER_DAY)) as u32;
        let seconds = (elapsed as u64 % u64::from(SECONDS_PER_DAY)) as u32;
        let time = TimeOfDay::from_seconds(seconds)?;
        let day = &days[day_index as usize];

        // Jitter is drawn for every slot so dropping a record never shifts the
        // noise stream of the records that follow it.
        let light_jitter: f64 = rng.random_range(-0.02..=0.02);
        let temperature_jitter: f64 = rng.random_range(-0.5..=0.5);
        let humidity_jitter: f64 = rng.random_range(-2.0..=2.0);
        let moisture_jitter: f64 = rng.random_range(-5.0..=5.0);
        let dropped = config.drop_rate > 0.0 && rng.random_bool(config.drop_rate);
        if dropped {
            continue;
        }

        let light = if config.is_night(time) {
            0.0
        } else {
            let phase =
                f64::from(seconds - config.sunrise_seconds) / f64::from(config.daylight_seconds);
            let clean = day.peak_lux * (std::f64::consts::PI * phase).sin();
            quantize((clean * (1.0 + light_jitter)).max(0.0), 1.0).min(LIGHT_RANGE.1)
        };

        let hour = f64::from(seconds) / 3600.0;
        let clean_temperature = 22.0
            + day.temperature_offset
            + 3.5 * (2.0 * std::f64::consts::PI * (hour - 9.0) / 24.0).sin();
        let temperature = quantize(clean_temperature + temperature_jitter, 10.0)
            .clamp(TEMPERATURE_RANGE.0, TEMPERATURE_RANGE.1);

        let clean_humidity = 60.0 - 2.5 * (clean_temperature - 22.0);
        let humidity = quantize(clean_humidity + humidity_jitter, 10.0)
            .clamp(HUMIDITY_RANGE.0, HUMIDITY_RANGE.1);

        let since_irrigation = (elapsed - irrigation_phase).rem_euclid(irrigation_interval);
        let clean_moisture = 700.0 + 1300.0 * (-since_irrigation / (48.0 * 3600.0)).exp();
        let moisture = (clean_moisture + moisture_jitter)
            .round()
            .clamp(0.0, f64::from(MOISTURE_MAX)) as u32;

        let date = config
            .start_date
            .checked_add_days(Days::new(u64::from(day_index)))
            .ok_or_else(|| Error::config("start_date", "date range overflows the calendar"))?;

        records.push(SensorRecord {
            measuring_point: config.measuring_point.clone(),
            light,
            temperature,
            humidity,
            moisture,
            date,
            time,
        });
    }
    Ok(records)
}

/// Writes records as CSV with the [`SENSOR_CSV_HEADER`] columns.
pub fn write_csv(records: &[SensorRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_records(records, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Serializes records to any writer. Floats use the shortest representation
/// that parses back to the same value.
pub fn write_records<W: Write>(records: &[SensorRecord], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{}", SENSOR_CSV_HEADER.join(","))?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.measuring_point,
            r.light,
            r.temperature,
            r.humidity,
            r.moisture,
            r.date.format("%Y-%m-%d"),
            r.time
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(days: u32, seed: u64) -> GenConfig {
        GenConfig {
            days,
            seed,
            ..GenConfig::default()
        }
    }

    #[test]
    fn one_day_at_five_seconds_has_17280_records() {
        let records = generate(&config(1, 1)).unwrap();
        assert_eq!(records.len(), 17_280);
        assert_eq!(records[0].time.seconds(), 0);
        assert_eq!(records.last().unwrap().time.seconds(), 86_395);
    }

    #[test]
    fn fractional_cadence_counts_floor_of_slots() {
        let cfg = GenConfig {
            days: 1,
            cadence_seconds: 7.0,
            ..GenConfig::default()
        };
        assert_eq!(generate(&cfg).unwrap().len(), 86_400 / 7);
    }

    #[test]
    fn same_seed_is_deterministic() {
        let a = generate(&config(2, 42)).unwrap();
        let b = generate(&config(2, 42)).unwrap();
        assert_eq!(a, b);
        let c = generate(&config(2, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn drop_rate_removes_roughly_that_fraction() {
        // Collection statistics: 233,980 records over 14 days at ~5 s.
        let drop_rate = 1.0 - 233_980.0 / 241_920.0;
        let cfg = GenConfig {
            drop_rate,
            seed: 9,
            ..GenConfig::default()
        };
        let n = generate(&cfg).unwrap().len() as f64;
        assert!((n - 233_980.0).abs() / 233_980.0 < 0.005, "got {n}");
    }

    #[test]
    fn records_are_sorted_and_in_range() {
        let records = generate(&config(3, 5)).unwrap();
        for pair in records.windows(2) {
            assert!((pair[0].date, pair[0].time) < (pair[1].date, pair[1].time));
        }
        for r in &records {
            r.check_ranges().unwrap();
        }
    }

    #[test]
    fn night_is_dark_and_noon_is_bright() {
        let cfg = config(2, 11);
        let records = generate(&cfg).unwrap();
        for r in &records {
            if cfg.is_night(r.time) {
                assert_eq!(r.light, 0.0);
            }
        }
        let noon = records
            .iter()
            .find(|r| r.time.seconds() == 12 * 3600)
            .unwrap();
        assert!(noon.light > 1000.0);
    }

    #[test]
    fn moisture_is_rewetted() {
        let records = generate(&config(7, 3)).unwrap();
        let jumps = records
            .windows(2)
            .filter(|w| w[1].moisture > w[0].moisture + 200)
            .count();
        assert!(jumps >= 2, "expected irrigation jumps, found {jumps}");
    }

    #[test]
    fn invalid_configs_name_the_field() {
        let err = generate(&config(0, 0)).unwrap_err();
        assert!(err.to_string().contains("days"));
        let err = generate(&GenConfig {
            cadence_seconds: 0.0,
            ..GenConfig::default()
        })
        .unwrap_err();
        assert!(err.to_string().contains("cadence_seconds"));
        let err = generate(&GenConfig {
            drop_rate: 1.0,
            ..GenConfig::default()
        })
        .unwrap_err();
        assert!(err.to_string().contains("drop_rate"));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_records(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "mp,light,temperature,humidity,moisture,date,time\n"
        );

        let record = SensorRecord {
            measuring_point: "n1".into(),
            light: 0.0,
            temperature: 24.7,
            humidity: 57.9,
            moisture: 1995,
            date: NaiveDate::from_ymd_opt(2022, 9, 15).unwrap(),
            time: TimeOfDay::from_hms(0, 0, 4).unwrap(),
        };
        let mut buf = Vec::new();
        write_records(&[record], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "n1,0,24.7,57.9,1995,2022-09-15,00:00:04");
    }
}
