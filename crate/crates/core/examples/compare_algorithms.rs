//! Run every algorithm with the same budget and compare the mean reports,
//! in the layout of a rule-mining results table.
//!
//! ```text
//! cargo run --release --example compare_algorithms -- [max_fes] [runs]
//! ```

use tsarm::datagen::{generate, GenConfig};
use tsarm::miner::{mine, report_table, MinerConfig, ReportRow};
use tsarm::optimizers::Algorithm;
use tsarm::preprocess::{build_database, PreprocessConfig};

fn main() -> tsarm::Result<()> {
    let mut args = std::env::args().skip(1);
    let max_fes = args.next().and_then(|a| a.parse().ok()).unwrap_or(10_000);
    let runs = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);

    let readings = generate(&GenConfig::default())?;
    let db = build_database(&readings, &PreprocessConfig::default())?;

    let mut rows = Vec::new();
    for algorithm in Algorithm::ALL {
        let mut config = MinerConfig {
            runs,
            ..MinerConfig::default()
        };
        config.optimizer.algorithm = algorithm;
        config.optimizer.max_fes = max_fes;
        let start = std::time::Instant::now();
        let outcome = mine(&db, &config)?;
        eprintln!("{algorithm}: {runs} runs in {:.1?}", start.elapsed());
        rows.extend(ReportRow::for_outcome(&outcome).pop());
    }
    print!("{}", report_table(&rows));
    Ok(())
}
