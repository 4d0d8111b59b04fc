//! Closed-loop check A -> B -> C -> A: per-feature attributions around a
//! loop should cancel, so the leftover measures path-induced error.

use guided_ig::attribution::{GuidedIgConfig, Method};
use guided_ig::diffmodel::{FeatureVector, Target};
use guided_ig::evaluation::{closed_path_experiment, ClosedPathConfig};
use guided_ig::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 0;
    let model = fixtures::bump_family(seed);
    let inputs: Vec<FeatureVector> = (0..5).map(|i| fixtures::uniform_point(64, seed, i, 0.0, 1.0)).collect();
    let config = ClosedPathConfig {
        trials: 10,
        seed,
        path: GuidedIgConfig::default().with_target(Target::logit(0)).with_steps(300),
        ..ClosedPathConfig::default()
    };

    for method in [Method::IntegratedGradients, Method::GuidedIg] {
        let report = closed_path_experiment(&model, method, &inputs, &config)?;
        let worst = report.per_trial_mse.iter().copied().fold(0.0, f64::max);
        println!("{:<8} loops={}  mse={:.3e}  worst loop={:.3e}", report.method, report.trials, report.mse, worst);
    }
    Ok(())
}
