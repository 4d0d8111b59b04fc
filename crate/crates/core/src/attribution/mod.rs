//! Attribution methods.
//!
//! Path methods integrate the model gradient along a curve from a baseline
//! to the input: [`integrated_gradients`] follows the straight line,
//! [`guided_ig_unbounded`] lets the model gradient choose which features
//! move at each step, and [`guided_ig_anchored`] runs the guided path
//! separately between anchor points on the straight line. Non-path
//! references ([`vanilla_gradients`], [`edge_detector`]) and SmoothGrad
//! averaging ([`smoothgrad`]) live here too.

mod baseline;
mod guided;
mod ig;
mod io;
mod reference;
mod smooth;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffmodel::{evaluate, DifferentiableModel, FeatureVector, ModelError, Shape, Target};

pub use baseline::{BaselineKind, BaselineSpec};
pub use guided::{guided_ig_anchored, guided_ig_unbounded, lower_quantile};
pub use ig::integrated_gradients;
pub use io::{read_attribution_csv, read_trace_jsonl, write_attribution_csv, write_trace_jsonl, Sidecar, TraceRecord};
pub use reference::{edge_detector, vanilla_gradients};
pub use smooth::{noisy_sample, smoothgrad, SmoothGradConfig};
pub use trace::{PathTrace, TraceStep};

#[derive(Debug, Error)]
pub enum AttributionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("input has {input} features but baseline has {baseline}")]
    ShapeMismatch { input: usize, baseline: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite {what} at step {step}")]
    NonFinite { what: &'static str, step: usize },
    #[error("guided path stalled at step {step} with L1 distance {distance} remaining")]
    Stalled { step: usize, distance: f64 },
    #[error("edge detector needs an image shape, got {0:?}")]
    NotAnImage(Shape),
}

/// Attribution methods selectable at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    IntegratedGradients,
    /// Guided IG; the anchor count comes from [`GuidedIgConfig::anchors`].
    GuidedIg,
    VanillaGradients,
    EdgeDetector,
}

impl Method {
    pub fn is_path_method(self) -> bool {
        matches!(self, Method::IntegratedGradients | Method::GuidedIg)
    }

    pub fn tag(self, anchors: usize) -> String {
        match self {
            Method::IntegratedGradients => "ig".into(),
            Method::GuidedIg => format!("gig({anchors})"),
            Method::VanillaGradients => "gradients".into(),
            Method::EdgeDetector => "edge".into(),
        }
    }
}

/// Settings shared by the path methods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuidedIgConfig {
    /// Riemann steps `T`.
    pub steps: usize,
    /// Fraction `p` of unfinished features moved per inner step.
    pub fraction: f64,
    /// Anchor count `K`; zero is the unbounded path.
    pub anchors: usize,
    pub baseline: BaselineSpec,
    pub target: Target,
    pub trace: bool,
}

impl Default for GuidedIgConfig {
    fn default() -> Self {
        GuidedIgConfig {
            steps: 200,
            fraction: 0.1,
            anchors: 0,
            baseline: BaselineSpec::default(),
            target: Target::default(),
            trace: false,
        }
    }
}

impl GuidedIgConfig {
    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_fraction(mut self, fraction: f64) -> Self {
        self.fraction = fraction;
        self
    }

    pub fn with_anchors(mut self, anchors: usize) -> Self {
        self.anchors = anchors;
        self
    }

    pub fn with_baseline(mut self, baseline: BaselineSpec) -> Self {
        self.baseline = baseline;
        self
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn validate(&self) -> Result<(), AttributionError> {
        if self.steps == 0 {
            return Err(AttributionError::Config("steps must be at least 1".into()));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(AttributionError::Config(format!("fraction must lie in (0, 1], got {}", self.fraction)));
        }
        self.baseline.validate()
    }
}

/// Settings recorded alongside an attribution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchors: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Per-feature attributions with completeness bookkeeping.
///
/// `completeness_residual` is `|sum(a) - (F(input) - F(baseline))|` for
/// path methods and `None` for methods without a baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributionMap {
    pub attributions: Vec<f64>,
    pub shape: Shape,
    pub method: String,
    pub config: ConfigSnapshot,
    pub f_input: Option<f64>,
    pub f_baseline: Option<f64>,
    pub completeness_residual: Option<f64>,
    pub trace: Option<PathTrace>,
}

impl AttributionMap {
    pub fn sum(&self) -> f64 {
        self.attributions.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.attributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributions.is_empty()
    }

    /// One value per pixel: channel attributions are summed for image
    /// shapes; flat maps are returned unchanged.
    pub fn pixel_saliency(&self) -> Vec<f64> {
        match self.shape {
            Shape::Image { channels, .. } if channels > 1 => {
                self.attributions.chunks(channels).map(|px| px.iter().sum()).collect()
            }
            _ => self.attributions.clone(),
        }
    }

    /// Builds a path-method map and fills in the completeness fields.
    fn for_path(
        attributions: Vec<f64>,
        shape: Shape,
        method: String,
        config: ConfigSnapshot,
        f_input: f64,
        f_baseline: f64,
    ) -> Self {
        let total: f64 = attributions.iter().sum();
        AttributionMap {
            attributions,
            shape,
            method,
            config,
            f_input: Some(f_input),
            f_baseline: Some(f_baseline),
            completeness_residual: Some((total - (f_input - f_baseline)).abs()),
            trace: None,
        }
    }
}

fn check_pair(input: &FeatureVector, baseline: &FeatureVector) -> Result<(), AttributionError> {
    if input.len() != baseline.len() {
        return Err(AttributionError::ShapeMismatch { input: input.len(), baseline: baseline.len() });
    }
    Ok(())
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn path_snapshot(config: &GuidedIgConfig, method: Method) -> ConfigSnapshot {
    ConfigSnapshot {
        steps: Some(config.steps),
        fraction: (method == Method::GuidedIg).then_some(config.fraction),
        anchors: (method == Method::GuidedIg).then_some(config.anchors),
        baseline: Some(config.baseline.describe()),
        target: Some(config.target),
        ..ConfigSnapshot::default()
    }
}

/// Runs `method` on `input`, resolving the configured baselines.
///
/// Multi-baseline specs (black+white, several random baselines) average the
/// per-baseline attributions in baseline order; the completeness residual is
/// then measured against the mean of `F(input) - F(baseline)`. A trace, when
/// requested, is kept for the first baseline only.
pub fn attribute(
    model: &dyn DifferentiableModel,
    input: &FeatureVector,
    method: Method,
    config: &GuidedIgConfig,
) -> Result<AttributionMap, AttributionError> {
    config.validate()?;
    match method {
        Method::VanillaGradients => return vanilla_gradients(model, input, config.target),
        Method::EdgeDetector => return edge_detector(input),
        Method::IntegratedGradients | Method::GuidedIg => {}
    }
    let baselines = config.baseline.resolve(input)?;
    let run = |b: &FeatureVector| match method {
        Method::IntegratedGradients => integrated_gradients(model, input, b, config.steps, config.target, config.trace),
        _ => guided_ig_anchored(model, input, b, config),
    };
    use rayon::prelude::*;
    let maps: Vec<AttributionMap> = baselines.par_iter().map(run).collect::<Result<_, _>>()?;
    let mut maps = maps.into_iter();
    let first = maps.next().expect("at least one baseline");
    let count = baselines.len() as f64;
    if baselines.len() == 1 {
        let mut map = first;
        map.config = path_snapshot(config, method);
        return Ok(map);
    }
    let mut sum = first.attributions.clone();
    let mut f_base_sum = first.f_baseline.unwrap_or(0.0);
    for m in maps {
        for (s, a) in sum.iter_mut().zip(&m.attributions) {
            *s += a;
        }
        f_base_sum += m.f_baseline.unwrap_or(0.0);
    }
    let mean: Vec<f64> = sum.into_iter().map(|s| s / count).collect();
    let f_input = evaluate(model, input, config.target)?;
    let mut map = AttributionMap::for_path(
        mean,
        input.shape(),
        method.tag(config.anchors),
        path_snapshot(config, method),
        f_input,
        f_base_sum / count,
    );
    map.trace = first.trace;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmodel::{BilinearProduct, Linear};

    #[test]
    fn defaults_follow_the_method() {
        let c = GuidedIgConfig::default();
        assert_eq!((c.steps, c.fraction, c.anchors), (200, 0.1, 0));
        assert!(c.validate().is_ok());
        assert!(c.clone().with_steps(0).validate().is_err());
        assert!(c.clone().with_fraction(0.0).validate().is_err());
        assert!(c.clone().with_fraction(1.5).validate().is_err());
        assert!(c.with_fraction(1.0).validate().is_ok());
    }

    #[test]
    fn black_white_average() {
        let m = BilinearProduct::new(2, vec![(0, 1)]).unwrap();
        let input = FeatureVector::flat(vec![0.5, 0.25]).unwrap();
        let config = GuidedIgConfig::default()
            .with_target(Target::logit(0))
            .with_baseline(BaselineSpec::new(BaselineKind::BlackWhite));
        let map = attribute(&m, &input, Method::IntegratedGradients, &config).unwrap();
        let black =
            integrated_gradients(&m, &input, &FeatureVector::flat(vec![0.0, 0.0]).unwrap(), 200, config.target, false)
                .unwrap();
        let white =
            integrated_gradients(&m, &input, &FeatureVector::flat(vec![1.0, 1.0]).unwrap(), 200, config.target, false)
                .unwrap();
        for i in 0..2 {
            assert!((map.attributions[i] - 0.5 * (black.attributions[i] + white.attributions[i])).abs() < 1e-15);
        }
        assert_eq!(map.f_baseline, Some(0.5));
        assert!(map.completeness_residual.unwrap() < 1e-4);
        assert_eq!(map.config.baseline.as_deref(), Some("black+white"));
    }

    #[test]
    fn baseline_equal_to_input_gives_zero_for_every_method() {
        let m = Linear::new(vec![2.0, -3.0, 0.5], 1.0);
        let input = FeatureVector::flat(vec![0.3, 0.9, 0.1]).unwrap();
        let config = GuidedIgConfig::default()
            .with_target(Target::logit(0))
            .with_baseline(BaselineSpec::new(BaselineKind::EqualInput));
        for method in [Method::IntegratedGradients, Method::GuidedIg] {
            for k in [0, 3] {
                let map = attribute(&m, &input, method, &config.clone().with_anchors(k)).unwrap();
                assert!(map.attributions.iter().all(|&a| a == 0.0));
                assert_eq!(map.completeness_residual, Some(0.0));
            }
        }
    }
}
