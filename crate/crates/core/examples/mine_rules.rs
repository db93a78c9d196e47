//! Mine the two-week database with DE and print the strongest rules.
//!
//! ```text
//! cargo run --release --example mine_rules -- [de|ga|pso|lshade|jde]
//! ```

use tsarm::datagen::{generate, GenConfig};
use tsarm::miner::{mine, report_table, MinerConfig, ReportRow};
use tsarm::optimizers::Algorithm;
use tsarm::preprocess::{build_database, PreprocessConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let algorithm: Algorithm = std::env::args().nth(1).as_deref().unwrap_or("de").parse()?;

    let readings = generate(&GenConfig::default())?;
    let db = build_database(&readings, &PreprocessConfig::default())?;

    let mut config = MinerConfig::default();
    config.optimizer.algorithm = algorithm;
    config.s_min = 0.2;
    config.c_min = 0.5;
    let outcome = mine(&db, &config)?;
    print!("{}", report_table(&ReportRow::for_outcome(&outcome)));

    let archive = outcome.merged_archive();
    let mut best: Vec<_> = archive.iter().collect();
    best.sort_by(|a, b| b.metrics.fitness.total_cmp(&a.metrics.fitness));
    println!("\n{} distinct rules across runs; top five:", archive.len());
    for entry in best.iter().take(5) {
        println!(
            "{}",
            tsarm::miner::format_rule(&entry.rule, &entry.metrics, db.feature_names())
        );
    }
    Ok(())
}
