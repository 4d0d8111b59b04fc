use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{attribute, AttributionError, AttributionMap, GuidedIgConfig, Method};
use crate::diffmodel::{DifferentiableModel, FeatureVector};
use crate::rng::{substream, Domain};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothGradConfig {
    pub samples: usize,
    pub sigma: f64,
    pub seed: u64,
}

/// `input + N(0, sigma^2)` for SmoothGrad sample `index`.
pub fn noisy_sample(
    input: &FeatureVector,
    sigma: f64,
    seed: u64,
    index: usize,
) -> Result<FeatureVector, AttributionError> {
    let normal = Normal::new(0.0, sigma).map_err(|e| AttributionError::Config(format!("sigma {sigma}: {e}")))?;
    let mut rng = substream(seed, Domain::SmoothGrad, index as u64);
    let values = input.values().iter().map(|v| v + normal.sample(&mut rng)).collect();
    Ok(input.with_values(values)?)
}

/// Mean of `method` attributions over `samples` noisy copies of the input.
///
/// Samples run concurrently and are reduced in sample order, so the result
/// depends only on the seed. With `sigma = 0` every sample equals the input
/// and the base attribution is returned unchanged.
pub fn smoothgrad(
    model: &dyn DifferentiableModel,
    input: &FeatureVector,
    method: Method,
    config: &GuidedIgConfig,
    smooth: &SmoothGradConfig,
) -> Result<AttributionMap, AttributionError> {
    if smooth.samples == 0 {
        return Err(AttributionError::Config("smoothgrad needs at least one sample".into()));
    }
    if !(smooth.sigma >= 0.0 && smooth.sigma.is_finite()) {
        return Err(AttributionError::Config(format!("sigma must be non-negative, got {}", smooth.sigma)));
    }
    let tag = format!("smoothgrad+{}", method.tag(config.anchors));
    let finish = |mut map: AttributionMap| {
        map.method = tag.clone();
        map.config.samples = Some(smooth.samples);
        map.config.sigma = Some(smooth.sigma);
        map.config.seed = Some(smooth.seed);
        map
    };
    if smooth.sigma == 0.0 {
        return attribute(model, input, method, config).map(finish);
    }

    let maps: Vec<AttributionMap> = (0..smooth.samples)
        .into_par_iter()
        .map(|k| {
            let noisy = noisy_sample(input, smooth.sigma, smooth.seed, k)?;
            attribute(model, &noisy, method, config)
        })
        .collect::<Result<_, _>>()?;

    let count = smooth.samples as f64;
    let mut sum = vec![0.0; maps[0].attributions.len()];
    let (mut f_in, mut f_base) = (0.0, 0.0);
    for m in &maps {
        for (s, a) in sum.iter_mut().zip(&m.attributions) {
            *s += a;
        }
        f_in += m.f_input.unwrap_or(f64::NAN);
        f_base += m.f_baseline.unwrap_or(f64::NAN);
    }
    let mut first = maps.into_iter().next().expect("at least one sample");
    first.attributions = sum.into_iter().map(|s| s / count).collect();
    first.shape = input.shape();
    first.trace = None;
    let (f_in, f_base) = (f_in / count, f_base / count);
    first.f_input = f_in.is_finite().then_some(f_in);
    first.f_baseline = f_base.is_finite().then_some(f_base);
    first.completeness_residual = match (first.f_input, first.f_baseline) {
        (Some(fi), Some(fb)) => Some((first.attributions.iter().sum::<f64>() - (fi - fb)).abs()),
        _ => None,
    };
    Ok(finish(first))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::integrated_gradients;
    use crate::diffmodel::{BilinearProduct, Linear, Target};

    fn config() -> GuidedIgConfig {
        GuidedIgConfig::default().with_target(Target::logit(0)).with_steps(64)
    }

    #[test]
    fn zero_sigma_returns_the_base_method() {
        let m = BilinearProduct::new(2, vec![(0, 1)]).unwrap();
        let x = FeatureVector::flat(vec![0.4, 0.9]).unwrap();
        for method in [Method::IntegratedGradients, Method::GuidedIg, Method::VanillaGradients] {
            let base = attribute(&m, &x, method, &config()).unwrap();
            let sg =
                smoothgrad(&m, &x, method, &config(), &SmoothGradConfig { samples: 5, sigma: 0.0, seed: 3 }).unwrap();
            assert_eq!(sg.attributions, base.attributions);
        }
    }

    #[test]
    fn linear_gradient_is_unaffected_by_noise() {
        let m = Linear::new(vec![2.0, 3.0], 0.0);
        let x = FeatureVector::flat(vec![1.0, 1.0]).unwrap();
        let sg = smoothgrad(
            &m,
            &x,
            Method::VanillaGradients,
            &config(),
            &SmoothGradConfig { samples: 6, sigma: 0.4, seed: 11 },
        )
        .unwrap();
        assert!((sg.attributions[0] - 2.0).abs() < 1e-12);
        assert!((sg.attributions[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equals_manual_average_of_noisy_runs() {
        let m = BilinearProduct::new(2, vec![(0, 1)]).unwrap();
        let x = FeatureVector::flat(vec![1.0, 1.0]).unwrap();
        let zero = FeatureVector::flat(vec![0.0, 0.0]).unwrap();
        let smooth = SmoothGradConfig { samples: 8, sigma: 0.1, seed: 7 };
        let sg = smoothgrad(&m, &x, Method::IntegratedGradients, &config(), &smooth).unwrap();
        let mut manual = [0.0; 2];
        for k in 0..8 {
            let noisy = noisy_sample(&x, 0.1, 7, k).unwrap();
            let run = integrated_gradients(&m, &noisy, &zero, 64, Target::logit(0), false).unwrap();
            manual[0] += run.attributions[0];
            manual[1] += run.attributions[1];
        }
        assert_eq!(sg.attributions, vec![manual[0] / 8.0, manual[1] / 8.0]);
        assert_eq!(sg.method, "smoothgrad+ig");
        let again = smoothgrad(&m, &x, Method::IntegratedGradients, &config(), &smooth).unwrap();
        assert_eq!(sg, again);
    }

    #[test]
    fn rejects_bad_parameters() {
        let m = Linear::new(vec![1.0], 0.0);
        let x = FeatureVector::flat(vec![1.0]).unwrap();
        let bad = [
            SmoothGradConfig { samples: 0, sigma: 0.1, seed: 0 },
            SmoothGradConfig { samples: 2, sigma: -1.0, seed: 0 },
        ];
        for s in bad {
            assert!(smoothgrad(&m, &x, Method::IntegratedGradients, &config(), &s).is_err());
        }
    }
}
