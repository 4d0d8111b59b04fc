use super::trace::{PathTrace, TraceStep};
use super::{check_pair, l1_distance, AttributionError, AttributionMap, ConfigSnapshot};
use crate::diffmodel::{evaluate, gradient_raw, DifferentiableModel, FeatureVector, Target};

/// Integrated Gradients along the straight line from `baseline` to `input`.
///
/// Midpoint Riemann sum with `steps` intervals:
/// `a_i = (x_i - b_i) / T * sum_t dF/dx_i(b + (t - 0.5) / T * (x - b))`.
pub fn integrated_gradients(
    model: &dyn DifferentiableModel,
    input: &FeatureVector,
    baseline: &FeatureVector,
    steps: usize,
    target: Target,
    trace: bool,
) -> Result<AttributionMap, AttributionError> {
    check_pair(input, baseline)?;
    if steps == 0 {
        return Err(AttributionError::Config("steps must be at least 1".into()));
    }
    let f_input = evaluate(model, input, target)?;
    let f_baseline = evaluate(model, baseline, target)?;
    let x = input.values();
    let b = baseline.values();
    let n = x.len();
    let diff: Vec<f64> = x.iter().zip(b).map(|(xi, bi)| xi - bi).collect();
    let mut path = trace.then(|| PathTrace::new(b, x));
    let snapshot = ConfigSnapshot { steps: Some(steps), target: Some(target), ..ConfigSnapshot::default() };

    if diff.iter().all(|&d| d == 0.0) {
        let mut map = AttributionMap::for_path(vec![0.0; n], input.shape(), "ig".into(), snapshot, f_input, f_baseline);
        map.trace = path;
        return Ok(map);
    }

    let total = steps as f64;
    let lerp = |alpha: f64| -> Vec<f64> { b.iter().zip(&diff).map(|(bi, di)| bi + alpha * di).collect() };
    let mut grad_sum = vec![0.0; n];
    let mut step_start = b.to_vec();
    for t in 1..=steps {
        let alpha = (t as f64 - 0.5) / total;
        let grad = gradient_raw(model, &lerp(alpha), target)?.gradient;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(AttributionError::NonFinite { what: "gradient", step: t });
        }
        for (s, g) in grad_sum.iter_mut().zip(&grad) {
            *s += g;
        }
        if let Some(path) = path.as_mut() {
            let step_end = if t == steps { x.to_vec() } else { lerp(t as f64 / total) };
            let delta: Vec<f64> = step_end.iter().zip(&step_start).map(|(e, s)| e - s).collect();
            let increment: Vec<f64> = grad.iter().zip(&diff).map(|(g, d)| g * d / total).collect();
            let remaining = l1_distance(&step_end, x);
            path.steps.push(TraceStep {
                t,
                point: std::mem::replace(&mut step_start, step_end),
                gradient: grad,
                delta,
                increment,
                selected_count: n,
                selected: Vec::new(),
                step_scale: None,
                clamped: false,
                zeroed_sentinels: Vec::new(),
                alpha_equivalent: t as f64 / total,
                x_l1_remaining: remaining,
            });
        }
    }
    let attributions: Vec<f64> = grad_sum.iter().zip(&diff).map(|(s, d)| s * d / total).collect();
    let mut map = AttributionMap::for_path(attributions, input.shape(), "ig".into(), snapshot, f_input, f_baseline);
    map.trace = path;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmodel::{BilinearProduct, Linear};

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::flat(v.to_vec()).unwrap()
    }

    #[test]
    fn linear_is_exact_for_any_step_count() {
        let m = Linear::new(vec![2.0, 3.0], 0.0);
        for steps in [1, 7, 200] {
            let map =
                integrated_gradients(&m, &fv(&[1.0, 1.0]), &fv(&[0.0, 0.0]), steps, Target::logit(0), false).unwrap();
            assert!((map.attributions[0] - 2.0).abs() < 1e-12);
            assert!((map.attributions[1] - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bilinear_diagonal_splits_evenly() {
        let m = BilinearProduct::new(2, vec![(0, 1)]).unwrap();
        let map = integrated_gradients(&m, &fv(&[1.0, 1.0]), &fv(&[0.0, 0.0]), 1000, Target::logit(0), false).unwrap();
        assert!((map.attributions[0] - 0.5).abs() < 1e-3);
        assert!((map.attributions[1] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn zero_length_path() {
        let m = BilinearProduct::new(2, vec![(0, 1)]).unwrap();
        let x = fv(&[0.3, 0.8]);
        let map = integrated_gradients(&m, &x, &x, 50, Target::logit(0), true).unwrap();
        assert_eq!(map.attributions, vec![0.0, 0.0]);
        assert_eq!(map.completeness_residual, Some(0.0));
    }

    #[test]
    fn trace_matches_attributions() {
        let m = BilinearProduct::new(2, vec![(0, 1)]).unwrap();
        let map = integrated_gradients(&m, &fv(&[1.0, 2.0]), &fv(&[0.0, 0.5]), 16, Target::logit(0), true).unwrap();
        let trace = map.trace.as_ref().unwrap();
        assert_eq!(trace.steps.len(), 16);
        let from_trace = trace.attributions();
        for (t, a) in from_trace.iter().zip(&map.attributions) {
            assert!((t - a).abs() < 1e-12);
        }
        assert!((trace.l1_length() - 2.5).abs() < 1e-12);
        assert!(trace.is_monotone());
        assert_eq!(trace.steps.last().unwrap().x_l1_remaining, 0.0);
    }

    #[test]
    fn rejects_mismatched_baseline() {
        let m = Linear::new(vec![2.0, 3.0], 0.0);
        let err = integrated_gradients(&m, &fv(&[1.0, 1.0]), &fv(&[0.0]), 10, Target::logit(0), false);
        assert!(matches!(err, Err(AttributionError::ShapeMismatch { input: 2, baseline: 1 })));
    }
}
