//! Numerical association rule mining over time series.
//!
//! Sensor readings are cut into fixed-length frames, each frame becomes a
//! transaction of aggregate features tagged with its day (`SEQUENCE`) and
//! time-of-day class (`CLASS`), and a population-based optimizer searches
//! the space of rules `X ⇒ Y` restricted to a window of classes `[t1, t2]`.
//!
//! * [`datagen`]: a deterministic synthetic greenhouse sensor stream.
//! * [`preprocess`]: framing, feature extraction and the transaction
//!   database with its CSV and JSON sidecar format.
//! * [`measures`]: time-window support and confidence, inclusion and
//!   amplitude.
//! * [`encoding`]: the real-valued genotype and its decoding into rules.
//! * [`optimizers`]: DE, GA, PSO, LSHADE and jDE over the unit hypercube.
//! * [`miner`]: repeated runs with a rule archive and summary reports.
//! * [`cli`] and [`config`]: the `tsarm` command and its TOML configuration.
//!
//! The `examples/` directory has one runnable program per capability:
//!
//! ```text
//! cargo run --example generate_telemetry
//! cargo run --example build_transactions
//! cargo run --example time_window_measures
//! cargo run --example decode_genotype
//! cargo run --example sphere_benchmark
//! cargo run --release --example mine_rules
//! cargo run --release --example compare_algorithms
//! ```

pub mod cli;
pub mod config;
pub mod datagen;
pub mod encoding;
pub mod error;
pub mod measures;
pub mod miner;
pub mod optimizers;
pub mod preprocess;

pub use error::{Error, Result};
