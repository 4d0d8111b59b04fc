//! Closed-path consistency check.
//!
//! Any path method that is exact along each segment must give zero total
//! attribution around a closed loop `A -> B -> C -> A`. The mean squared
//! loop total measures how far a method is from that ideal.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::attribution::{guided_ig_anchored, integrated_gradients, AttributionError, GuidedIgConfig, Method};
use crate::diffmodel::{DifferentiableModel, FeatureVector};
use crate::rng::{substream, Domain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedPathConfig {
    /// Random loops per input.
    pub trials: usize,
    pub seed: u64,
    /// Bounds for the random corners `B` and `C`.
    pub min: f64,
    pub max: f64,
    /// Steps, fraction, anchors and target for each segment.
    pub path: GuidedIgConfig,
}

impl Default for ClosedPathConfig {
    fn default() -> Self {
        ClosedPathConfig { trials: 50, seed: 0, min: 0.0, max: 1.0, path: GuidedIgConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedPathReport {
    pub method: String,
    /// Total loops, over all inputs.
    pub trials: usize,
    pub seed: u64,
    /// Mean over every (loop, feature) pair of the squared loop total.
    pub mse: f64,
    pub per_trial_mse: Vec<f64>,
    /// Squared loop total per feature, one vector per loop.
    #[serde(skip)]
    pub squared_errors: Vec<Vec<f64>>,
}

/// Runs the closed-loop check for IG or Guided IG.
pub fn closed_path_experiment(
    model: &dyn DifferentiableModel,
    method: Method,
    inputs: &[FeatureVector],
    config: &ClosedPathConfig,
) -> Result<ClosedPathReport, EvalError> {
    let path = &config.path;
    path.validate()?;
    let segment = |from: &FeatureVector, to: &FeatureVector| -> Result<Vec<f64>, AttributionError> {
        let map = match method {
            Method::IntegratedGradients => integrated_gradients(model, to, from, path.steps, path.target, false)?,
            Method::GuidedIg => guided_ig_anchored(model, to, from, path)?,
            other => {
                return Err(AttributionError::Config(format!("{} is not a path method", other.tag(path.anchors))));
            }
        };
        Ok(map.attributions)
    };
    let mut report = closed_path_with(inputs, config, segment)?;
    report.method = method.tag(path.anchors);
    Ok(report)
}

/// Closed-loop check with a caller-supplied segment attributor
/// `(from, to) -> attributions`.
///
/// Loop `j` of input `i` draws its corners from the random stream with
/// index `i * trials + j`, so results do not depend on thread scheduling.
pub fn closed_path_with<F>(
    inputs: &[FeatureVector],
    config: &ClosedPathConfig,
    segment: F,
) -> Result<ClosedPathReport, EvalError>
where
    F: Fn(&FeatureVector, &FeatureVector) -> Result<Vec<f64>, AttributionError> + Sync,
{
    if config.trials == 0 || inputs.is_empty() {
        return Err(EvalError::Config("closed-path check needs at least one input and one trial".into()));
    }
    if !(config.min.is_finite() && config.max.is_finite() && config.min < config.max) {
        return Err(EvalError::Config(format!("bounds [{}, {}] are not a proper interval", config.min, config.max)));
    }
    let jobs: Vec<(usize, usize)> = (0..inputs.len()).flat_map(|i| (0..config.trials).map(move |j| (i, j))).collect();
    let squared_errors: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let a = &inputs[i];
            let mut rng = substream(config.seed, Domain::ClosedPath, (i * config.trials + j) as u64);
            let mut corner = || -> Result<FeatureVector, EvalError> {
                let values = (0..a.len()).map(|_| rng.random_range(config.min..config.max)).collect();
                Ok(a.with_values(values)?)
            };
            let b = corner()?;
            let c = corner()?;
            let mut total = segment(a, &b)?;
            for leg in [segment(&b, &c)?, segment(&c, a)?] {
                for (t, v) in total.iter_mut().zip(leg) {
                    *t += v;
                }
            }
            Ok(total.into_iter().map(|t| t * t).collect())
        })
        .collect::<Result<_, EvalError>>()?;

    let per_trial_mse: Vec<f64> =
        squared_errors.iter().map(|e| e.iter().sum::<f64>() / e.len().max(1) as f64).collect();
    let count: usize = squared_errors.iter().map(Vec::len).sum();
    let mse = squared_errors.iter().flatten().sum::<f64>() / count.max(1) as f64;
    Ok(ClosedPathReport {
        method: "custom".into(),
        trials: squared_errors.len(),
        seed: config.seed,
        mse,
        per_trial_mse,
        squared_errors,
    })
}
