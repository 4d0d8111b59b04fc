//! Guided Integrated Gradients.
//!
//! The guided path starts at the baseline and, at every Riemann step, moves
//! only the features whose partial derivatives have the smallest magnitude
//! among those not yet at the input. Each outer step shrinks the L1 distance
//! to the input by `d_total / T`; inside a step the selected features move
//! along a convex combination toward the input, or snap to it when the
//! remaining budget exceeds their distance, after which a new subset is
//! chosen with the same gradient.

use super::trace::{PathTrace, TraceStep};
use super::{check_pair, l1_distance, AttributionError, AttributionMap, ConfigSnapshot, GuidedIgConfig, Method};
use crate::diffmodel::{evaluate, gradient_raw, DifferentiableModel, FeatureVector, Target};

/// Lower `p`-quantile: the `floor(p * (n - 1))`-th smallest value.
///
/// Returns `None` for an empty slice.
pub fn lower_quantile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    let k = ((p * (v.len() - 1) as f64).floor() as usize).min(v.len() - 1);
    let (_, kth, _) = v.select_nth_unstable_by(k, f64::total_cmp);
    Some(*kth)
}

struct Segment<'a> {
    start: &'a [f64],
    end: &'a [f64],
    steps: usize,
    fraction: f64,
    target: Target,
}

// Progress metrics in a trace are reported against the full path even when
// the segment is one piece of an anchored run.
struct TraceSink<'a> {
    trace: &'a mut PathTrace,
    path_end: &'a [f64],
    path_total: f64,
}

/// Accumulates one guided segment into `attr`.
fn guided_segment(
    model: &dyn DifferentiableModel,
    seg: &Segment<'_>,
    attr: &mut [f64],
    mut sink: Option<TraceSink<'_>>,
) -> Result<(), AttributionError> {
    let end = seg.end;
    let n = end.len();
    let d_total = l1_distance(seg.start, end);
    if d_total == 0.0 {
        return Ok(());
    }
    let mut x = seg.start.to_vec();
    let total_steps = seg.steps as f64;
    let mut unfinished_abs = Vec::with_capacity(n);
    for t in 1..=seg.steps {
        let grad = gradient_raw(model, &x, seg.target)?.gradient;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(AttributionError::NonFinite { what: "gradient", step: t });
        }
        let mut y = grad.clone();
        let d_target = d_total * (1.0 - t as f64 / total_steps);
        loop {
            for i in 0..n {
                if x[i] == end[i] {
                    y[i] = f64::INFINITY;
                }
            }
            let d_current = l1_distance(&x, end);
            if d_current <= d_target {
                break;
            }
            unfinished_abs.clear();
            unfinished_abs.extend(y.iter().filter(|v| v.is_finite()).map(|v| v.abs()));
            let threshold = lower_quantile(&unfinished_abs, seg.fraction)
                .ok_or(AttributionError::Stalled { step: t, distance: d_current })?;
            let selected: Vec<usize> = (0..n).filter(|&i| y[i].is_finite() && y[i].abs() <= threshold).collect();
            let d_selected: f64 = selected.iter().map(|&i| (x[i] - end[i]).abs()).sum();
            if d_selected.is_nan() || d_selected <= 0.0 {
                return Err(AttributionError::Stalled { step: t, distance: d_current });
            }
            let delta = (d_current - d_target) / d_selected;
            let before: Vec<f64> = selected.iter().map(|&i| x[i]).collect();
            let clamped = delta > 1.0;
            for &i in &selected {
                x[i] = if clamped { end[i] } else { (1.0 - delta) * x[i] + delta * end[i] };
            }
            let mut zeroed = Vec::new();
            for (i, v) in y.iter_mut().enumerate() {
                if v.is_infinite() {
                    *v = 0.0;
                    zeroed.push(i);
                }
            }
            for (&i, &old) in selected.iter().zip(&before) {
                attr[i] += (x[i] - old) * y[i];
            }
            if let Some(sink) = sink.as_mut() {
                let mut point = x.clone();
                let mut step_delta = vec![0.0; n];
                let mut increment = vec![0.0; n];
                for (&i, &old) in selected.iter().zip(&before) {
                    point[i] = old;
                    step_delta[i] = x[i] - old;
                    increment[i] = step_delta[i] * y[i];
                }
                let remaining = l1_distance(&x, sink.path_end);
                sink.trace.steps.push(TraceStep {
                    t,
                    point,
                    gradient: grad.clone(),
                    delta: step_delta,
                    increment,
                    selected_count: selected.len(),
                    selected: selected.clone(),
                    step_scale: Some(delta),
                    clamped,
                    zeroed_sentinels: zeroed,
                    alpha_equivalent: 1.0 - remaining / sink.path_total,
                    x_l1_remaining: remaining,
                });
            }
            if !clamped {
                break;
            }
            // A snap finishes every selected feature, so at most n snaps can
            // happen per step. The L1 distance is not a usable progress test
            // here: finishing a feature that was 1e-16 away can leave it
            // unchanged after rounding.
        }
    }
    Ok(())
}

/// Unbounded Guided IG from `baseline` to `input` with `config.steps` steps
/// and selection fraction `config.fraction`. `config.anchors` is ignored.
pub fn guided_ig_unbounded(
    model: &dyn DifferentiableModel,
    input: &FeatureVector,
    baseline: &FeatureVector,
    config: &GuidedIgConfig,
) -> Result<AttributionMap, AttributionError> {
    let config = GuidedIgConfig { anchors: 0, ..config.clone() };
    guided_ig_anchored(model, input, baseline, &config)
}

/// Anchored Guided IG, `GIG(K)` with `K = config.anchors`.
///
/// The straight line is cut into `K + 1` equal segments; segment `k` runs
/// from `b + (x - b)(k - 1)/(K + 1)` to `b + (x - b) k/(K + 1)` with
/// `ceil(T / (K + 1))` steps, and the per-segment attributions are summed.
pub fn guided_ig_anchored(
    model: &dyn DifferentiableModel,
    input: &FeatureVector,
    baseline: &FeatureVector,
    config: &GuidedIgConfig,
) -> Result<AttributionMap, AttributionError> {
    check_pair(input, baseline)?;
    config.validate()?;
    let f_input = evaluate(model, input, config.target)?;
    let f_baseline = evaluate(model, baseline, config.target)?;
    let x = input.values();
    let b = baseline.values();
    let segments = config.anchors + 1;
    let steps_per_segment = config.steps.div_ceil(segments);
    let path_total = l1_distance(b, x);

    let anchor = |k: usize| -> Vec<f64> {
        if k == 0 {
            return b.to_vec();
        }
        if k == segments {
            return x.to_vec();
        }
        let s = k as f64 / segments as f64;
        b.iter().zip(x).map(|(&bi, &xi)| (bi + (xi - bi) * s).clamp(bi.min(xi), bi.max(xi))).collect()
    };

    let mut attr = vec![0.0; x.len()];
    let mut trace = config.trace.then(|| PathTrace::new(b, x));
    let mut seg_start = anchor(0);
    for k in 1..=segments {
        let seg_end = anchor(k);
        let seg = Segment {
            start: &seg_start,
            end: &seg_end,
            steps: steps_per_segment,
            fraction: config.fraction,
            target: config.target,
        };
        let sink = trace.as_mut().map(|trace| TraceSink { trace, path_end: x, path_total });
        guided_segment(model, &seg, &mut attr, sink)?;
        seg_start = seg_end;
    }

    let snapshot = ConfigSnapshot {
        steps: Some(config.steps),
        fraction: Some(config.fraction),
        anchors: Some(config.anchors),
        target: Some(config.target),
        ..ConfigSnapshot::default()
    };
    let mut map = AttributionMap::for_path(
        attr,
        input.shape(),
        Method::GuidedIg.tag(config.anchors),
        snapshot,
        f_input,
        f_baseline,
    );
    map.trace = trace;
    Ok(map)
}
