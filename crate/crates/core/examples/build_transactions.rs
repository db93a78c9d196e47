//! Turn two weeks of readings into the hourly transaction database and
//! write it as CSV with its JSON sidecar.
//!
//! ```text
//! cargo run --example build_transactions -- [out.csv]
//! ```

use tsarm::datagen::{generate, GenConfig};
use tsarm::preprocess::{build_database, sidecar_path, write_database, PreprocessConfig};

fn main() -> tsarm::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tsarm-transactions.csv"));

    let readings = generate(&GenConfig::default())?;
    let db = build_database(&readings, &PreprocessConfig::default())?;
    println!(
        "{} readings -> {} transactions x {} features ({} days, K = {})",
        readings.len(),
        db.n_transactions(),
        db.n_features(),
        db.n_sequences(),
        db.k()
    );

    println!("{:<18} {:>10} {:>10}", "feature", "min", "max");
    for (j, name) in db.feature_names().iter().enumerate() {
        println!(
            "{name:<18} {:>10.2} {:>10.2}",
            db.domain_lo()[j],
            db.domain_hi()[j]
        );
    }

    write_database(&db, &out)?;
    println!(
        "wrote {} and {}",
        out.display(),
        sidecar_path(&out).display()
    );
    Ok(())
}
