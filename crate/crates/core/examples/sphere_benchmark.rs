//! All five optimizers on the shifted sphere in ten dimensions.

use tsarm::optimizers::{optimize, Algorithm, OptimizerConfig};

fn main() -> tsarm::Result<()> {
    println!(
        "{:<7} {:>12} {:>12} {:>7}",
        "algo", "median", "worst", "< 1e-3"
    );
    for algorithm in Algorithm::ALL {
        let mut errors = Vec::new();
        for seed in 0..10 {
            let config = OptimizerConfig {
                algorithm,
                dimension: 10,
                seed,
                ..OptimizerConfig::default()
            };
            let trace = optimize(&config, |x| {
                -x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>()
            })?;
            errors.push(-trace.best_fitness);
        }
        errors.sort_by(f64::total_cmp);
        let hits = errors.iter().filter(|&&e| e < 1e-3).count();
        println!(
            "{:<7} {:>12.3e} {:>12.3e} {:>5}/10",
            algorithm, errors[5], errors[9], hits
        );
    }
    Ok(())
}
