use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::database::{TransactionDatabase, CLASS_FEATURE, SEQUENCE_FEATURE};
use super::TimeOfDay;
use crate::datagen::{SensorRecord, SENSOR_CSV_HEADER};
use crate::error::{Error, Result};

/// Reads a sensor CSV written by [`crate::datagen::write_csv`].
pub fn parse_sensor_csv(path: impl AsRef<Path>) -> Result<Vec<SensorRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_sensor_reader(file, path)
}

/// Parses sensor CSV from any reader; `origin` labels error messages.
pub fn parse_sensor_reader<R: Read>(reader: R, origin: &Path) -> Result<Vec<SensorRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = csv
        .headers()
        .map_err(|e| Error::parse(origin, 1, e.to_string()))?;
    if header.iter().ne(SENSOR_CSV_HEADER.iter().copied()) {
        return Err(Error::parse(
            origin,
            1,
            format!(
                "expected header `{}`, found `{}`",
                SENSOR_CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut records = Vec::new();
    for row in csv.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(origin, line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let record = parse_row(&row).map_err(|msg| Error::parse(origin, line, msg))?;
        records.push(record);
    }
    Ok(records)
}

fn parse_row(row: &csv::StringRecord) -> std::result::Result<SensorRecord, String> {
    let number = |i: usize, name: &str| -> std::result::Result<f64, String> {
        row[i]
            .parse::<f64>()
            .map_err(|_| format!("{name} {:?} is not a number", &row[i]))
    };
    let measuring_point = row[0].to_string();
    if measuring_point.is_empty() {
        return Err("empty measuring point".into());
    }
    let record = SensorRecord {
        measuring_point,
        light: number(1, "light")?,
        temperature: number(2, "temperature")?,
        humidity: number(3, "humidity")?,
        moisture: row[4]
            .parse::<u32>()
            .map_err(|_| format!("moisture {:?} is not a non-negative integer", &row[4]))?,
        date: NaiveDate::parse_from_str(&row[5], "%Y-%m-%d")
            .map_err(|_| format!("date {:?} is not YYYY-MM-DD", &row[5]))?,
        time: row[6].parse::<TimeOfDay>()?,
    };
    record.check_ranges()?;
    Ok(record)
}

/// Metadata written next to a transaction CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatabaseMeta {
    pub feature_names: Vec<String>,
    pub domain_lo: Vec<f64>,
    pub domain_hi: Vec<f64>,
    #[serde(rename = "K")]
    pub k: u32,
    pub n_sequences: usize,
    pub n_transactions: usize,
}

impl DatabaseMeta {
    pub fn of(db: &TransactionDatabase) -> Self {
        Self {
            feature_names: db.feature_names().to_vec(),
            domain_lo: db.domain_lo().to_vec(),
            domain_hi: db.domain_hi().to_vec(),
            k: db.k(),
            n_sequences: db.n_sequences(),
            n_transactions: db.n_transactions(),
        }
    }
}

/// `transactions.csv` → `transactions.csv.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the transaction CSV and its JSON sidecar.
///
/// The database must expose `SEQUENCE` and `CLASS` feature columns so it
/// can be read back.
pub fn write_database(db: &TransactionDatabase, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    for name in [SEQUENCE_FEATURE, CLASS_FEATURE] {
        if db.feature_index(name).is_none() {
            return Err(Error::InvalidDatabase(format!(
                "cannot serialize a database without a {name} column"
            )));
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "{}", db.feature_names().join(","))?;
        for row in db.rows() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))?;

    let sidecar = sidecar_path(path);
    let json = serde_json::to_string_pretty(&DatabaseMeta::of(db))
        .expect("metadata is always serializable");
    std::fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))
}

/// Reads a transaction CSV and its sidecar.
pub fn read_database(path: impl AsRef<Path>) -> Result<TransactionDatabase> {
    let path = path.as_ref();
    let sidecar = sidecar_path(path);
    let meta_text = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
    let meta: DatabaseMeta = serde_json::from_str(&meta_text)
        .map_err(|e| Error::parse(&sidecar, e.line() as u64, e.to_string()))?;

    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let header: Vec<String> = csv
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != meta.feature_names {
        return Err(Error::parse(
            path,
            1,
            "header does not match the feature names in the sidecar",
        ));
    }
    let time_column = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(path, 1, format!("missing {name} column")))
    };
    let seq_col = time_column(SEQUENCE_FEATURE)?;
    let class_col = time_column(CLASS_FEATURE)?;

    let mut rows = Vec::new();
    let mut sequences = Vec::new();
    let mut classes = Vec::new();
    for row in csv.records() {
        let row = row
            .map_err(|e| Error::parse(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let values = row
            .iter()
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path, line, format!("{cell:?} is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let as_index = |v: f64, name: &str| {
            if v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                Ok(v as u32)
            } else {
                Err(Error::parse(
                    path,
                    line,
                    format!("{name} {v} is not a non-negative integer"),
                ))
            }
        };
        sequences.push(as_index(values[seq_col], SEQUENCE_FEATURE)?);
        classes.push(as_index(values[class_col], CLASS_FEATURE)?);
        rows.push(values);
    }
    if rows.len() != meta.n_transactions {
        return Err(Error::parse(
            path,
            0,
            format!(
                "sidecar lists {} transactions, file has {}",
                meta.n_transactions,
                rows.len()
            ),
        ));
    }
    TransactionDatabase::new(header, rows, sequences, classes, meta.k)
}
