//! Walk through decoding: random genotypes become rules, and a genotype
//! built by hand shows what each element controls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsarm::datagen::{generate, GenConfig};
use tsarm::encoding::{DecodeConfig, FitnessWeights, RuleObjective};
use tsarm::measures::Counting;
use tsarm::miner::format_rule;
use tsarm::preprocess::{build_database, PreprocessConfig};

fn main() -> tsarm::Result<()> {
    let readings = generate(&GenConfig::default())?;
    let db = build_database(&readings, &PreprocessConfig::default())?;
    let objective = RuleObjective::new(
        &db,
        &DecodeConfig::default(),
        FitnessWeights::default(),
        Counting::Days,
    )?;
    let names = db.feature_names();
    let d = objective.dimension();
    println!(
        "genotype length {d} for rules of up to {} conditions",
        objective.decoder().max_len()
    );

    // Four (selector, bound, bound, threshold) quadruples, then the window
    // pair and the cut point. Selectors pick among the 16 sensed features,
    // the bounds are fractions of the feature's range, and a threshold
    // below 0.5 switches the condition off.
    #[rustfmt::skip]
    let by_hand = [
        0.05, 0.20, 0.60, 0.9,
        0.60, 0.50, 1.00, 0.9,
        0.40, 0.10, 0.90, 0.2, // off
        0.80, 0.00, 0.30, 0.9,
        0.25, 0.25,            // window: classes 7..=7
        0.0,                   // one antecedent condition
    ];
    let e = objective.evaluate(&by_hand)?;
    match &e.rule {
        Some(rule) => println!("by hand: {}", format_rule(rule, &e.metrics, names)),
        None => println!("by hand: invalid"),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut invalid = 0;
    for _ in 0..200 {
        let g: Vec<f64> = (0..d).map(|_| rng.random()).collect();
        let e = objective.evaluate(&g)?;
        match e.rule {
            Some(rule) if e.metrics.support > 0.0 => {
                println!("random:  {}", format_rule(&rule, &e.metrics, names));
                break;
            }
            Some(_) => {}
            None => invalid += 1,
        }
    }
    println!("({invalid} invalid genotypes skipped on the way)");
    Ok(())
}
