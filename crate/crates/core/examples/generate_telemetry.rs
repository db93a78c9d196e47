//! Generate a day of synthetic greenhouse readings and print a few of them.
//!
//! ```text
//! cargo run --example generate_telemetry -- [days] [seed]
//! ```

use tsarm::datagen::{generate, write_records, GenConfig};

fn main() -> tsarm::Result<()> {
    let mut args = std::env::args().skip(1);
    let days = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);

    let config = GenConfig {
        days,
        seed,
        ..GenConfig::default()
    };
    let records = generate(&config)?;
    println!(
        "{} readings over {days} day(s), every {} s",
        records.len(),
        config.cadence_seconds
    );

    // Midnight, sunrise and noon of the first day.
    let picks: Vec<_> = [0, 6 * 720, 12 * 720]
        .iter()
        .filter_map(|&i| records.get(i).cloned())
        .collect();
    let mut out = std::io::stdout().lock();
    write_records(&picks, &mut out).expect("stdout");

    let (lo, hi) = records
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.temperature), hi.max(r.temperature))
        });
    println!("temperature range: {lo:.1} .. {hi:.1} °C");
    Ok(())
}
