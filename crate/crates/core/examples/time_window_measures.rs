//! Score one hand-written rule over several time windows: the same
//! relationship can be strong at night and absent at noon.

use tsarm::datagen::{generate, GenConfig};
use tsarm::encoding::FitnessWeights;
use tsarm::measures::{count, measure, AttributeCondition, Counting, Rule, TimeWindow};
use tsarm::preprocess::{build_database, PreprocessConfig};

fn main() -> tsarm::Result<()> {
    let readings = generate(&GenConfig::default())?;
    let db = build_database(&readings, &PreprocessConfig::default())?;
    let feature = |name: &str| db.feature_index(name).expect("known feature");

    // Dark hours tend to be cool and humid.
    let rule = |window| Rule {
        antecedent: vec![AttributeCondition::new(feature("MAX_LIGHT"), 0.0, 50.0)],
        consequent: vec![AttributeCondition::new(
            feature("AVG_HUMIDITY"),
            60.0,
            100.0,
        )],
        window,
    };
    let weights = FitnessWeights::default();

    println!(
        "{:<8} {:>5} {:>5} {:>6} {:>6} {:>6} {:>6}",
        "window", "X∪Y", "X", "supp", "conf", "ampl", "fit"
    );
    for window in [
        TimeWindow::new(1, 5),
        TimeWindow::new(6, 11),
        TimeWindow::new(12, 14),
        TimeWindow::new(19, 24),
        TimeWindow::full(24),
    ] {
        let r = rule(window);
        let days = count(&r, &db, Counting::Days);
        let m = measure(&r, &db, Counting::Days);
        let fit = weights.combine(m.support, m.confidence, m.inclusion, m.amplitude);
        println!(
            "{:<8} {:>5} {:>5} {:>6.3} {:>6.3} {:>6.3} {:>6.3}",
            window.to_string(),
            days.both,
            days.antecedent,
            m.support,
            m.confidence,
            m.amplitude,
            fit
        );
    }

    let t = count(&rule(TimeWindow::new(19, 24)), &db, Counting::Transactions);
    println!(
        "per-transaction counting in [19,24]: {}/{} matched, support {:.3}",
        t.both,
        t.total,
        t.support()
    );
    Ok(())
}
