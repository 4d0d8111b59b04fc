//! Differentiable scalar-output models over flat feature vectors.
//!
//! Every attribution method talks to a model through
//! [`DifferentiableModel`], which exposes raw output scores and a
//! vector-Jacobian product. The scalar being attributed is picked by a
//! [`Target`]: one output class, read either as a logit or as a softmax
//! probability.

mod analytic;
mod features;
mod loader;
mod mlp;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use analytic::{BilinearProduct, Bump, BumpMixture, Linear, SymmetricSum, Univariate};
pub use features::{FeatureVector, Shape};
pub use loader::{load_model, parse_model, AnalyticSpec, ModelFile};
pub use mlp::{Activation, LayerSpec, Mlp, ModelSpec};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shape mismatch: expected {expected} features, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite value at feature {index}")]
    NonFinite { index: usize },
    #[error("class {class} out of range for a model with {outputs} outputs")]
    ClassOutOfRange { class: usize, outputs: usize },
    #[error("model parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch in layer {layer}: {detail}")]
    DimensionMismatch { layer: usize, detail: String },
    #[error("unknown activation `{0}`")]
    UnknownActivation(String),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How the selected output is turned into the attributed scalar.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputMode {
    Logit,
    #[default]
    Softmax,
}

impl fmt::Display for OutputMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputMode::Logit => "logit",
            OutputMode::Softmax => "softmax",
        })
    }
}

/// The scalar function `F` an attribution explains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub class: usize,
    pub mode: OutputMode,
}

impl Target {
    pub fn new(class: usize, mode: OutputMode) -> Self {
        Target { class, mode }
    }

    pub fn logit(class: usize) -> Self {
        Target::new(class, OutputMode::Logit)
    }

    pub fn softmax(class: usize) -> Self {
        Target::new(class, OutputMode::Softmax)
    }
}

/// A function `R^N -> R^C` with a reverse-mode derivative.
///
/// Implementations must be pure: identical inputs give bit-identical
/// outputs, and no interior mutability is allowed, so a model can be shared
/// across threads.
pub trait DifferentiableModel: Send + Sync + fmt::Debug {
    fn input_shape(&self) -> Shape;

    fn num_outputs(&self) -> usize;

    /// Raw output scores (logits) at `x`.
    fn forward(&self, x: &[f64]) -> Vec<f64>;

    /// Evaluates the logits at `x`, asks `seed` for the output cotangent
    /// given those logits, and returns `(logits, J(x)^T cotangent)`.
    fn forward_backward(&self, x: &[f64], seed: &dyn Fn(&[f64]) -> Vec<f64>) -> (Vec<f64>, Vec<f64>);

    fn input_len(&self) -> usize {
        self.input_shape().len()
    }
}

/// Logits together with the target that reads a scalar from them.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelOutput {
    pub logits: Vec<f64>,
    pub selected_class: usize,
    pub mode: OutputMode,
}

impl ModelOutput {
    /// Output scores in the configured mode.
    pub fn scores(&self) -> Vec<f64> {
        match self.mode {
            OutputMode::Logit => self.logits.clone(),
            OutputMode::Softmax => softmax(&self.logits),
        }
    }

    pub fn score(&self) -> f64 {
        scalar_from_logits(&self.logits, self.selected_class, self.mode)
    }
}

/// Value and input gradient of the target scalar at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientRecord {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Max-shifted softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn scalar_from_logits(logits: &[f64], class: usize, mode: OutputMode) -> f64 {
    match mode {
        OutputMode::Logit => logits[class],
        OutputMode::Softmax => softmax(logits)[class],
    }
}

// Cotangent of the target scalar with respect to the logits.
fn output_seed(logits: &[f64], class: usize, mode: OutputMode) -> Vec<f64> {
    match mode {
        OutputMode::Logit => {
            let mut seed = vec![0.0; logits.len()];
            seed[class] = 1.0;
            seed
        }
        OutputMode::Softmax => {
            // d s_c / d z_k = s_c (1[k = c] - s_k)
            let s = softmax(logits);
            let sc = s[class];
            s.iter().enumerate().map(|(k, &sk)| if k == class { sc * (1.0 - sk) } else { -sc * sk }).collect()
        }
    }
}

fn check_point(model: &dyn DifferentiableModel, x: &[f64], target: Target) -> Result<(), ModelError> {
    let expected = model.input_len();
    if x.len() != expected {
        return Err(ModelError::ShapeMismatch { expected, found: x.len() });
    }
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite { index });
    }
    let outputs = model.num_outputs();
    if target.class >= outputs {
        return Err(ModelError::ClassOutOfRange { class: target.class, outputs });
    }
    Ok(())
}

/// Logits at `x` packaged with the target.
pub fn output(model: &dyn DifferentiableModel, x: &FeatureVector, target: Target) -> Result<ModelOutput, ModelError> {
    check_point(model, x.values(), target)?;
    Ok(ModelOutput { logits: model.forward(x.values()), selected_class: target.class, mode: target.mode })
}

/// `F(x)` for the selected class and mode.
pub fn evaluate(model: &dyn DifferentiableModel, x: &FeatureVector, target: Target) -> Result<f64, ModelError> {
    evaluate_raw(model, x.values(), target)
}

/// Like [`evaluate`] over a bare slice (path points built during integration).
pub fn evaluate_raw(model: &dyn DifferentiableModel, x: &[f64], target: Target) -> Result<f64, ModelError> {
    check_point(model, x, target)?;
    Ok(scalar_from_logits(&model.forward(x), target.class, target.mode))
}

/// Analytic gradient of `F` with respect to every input feature.
pub fn gradient(
    model: &dyn DifferentiableModel,
    x: &FeatureVector,
    target: Target,
) -> Result<GradientRecord, ModelError> {
    gradient_raw(model, x.values(), target)
}

pub fn gradient_raw(model: &dyn DifferentiableModel, x: &[f64], target: Target) -> Result<GradientRecord, ModelError> {
    check_point(model, x, target)?;
    let (logits, gradient) = model.forward_backward(x, &|logits| output_seed(logits, target.class, target.mode));
    Ok(GradientRecord { value: scalar_from_logits(&logits, target.class, target.mode), gradient })
}

/// Relative error between the analytic gradient and a central difference
/// with step `h`: `||analytic - numeric||_2 / max(||analytic||_2, ||numeric||_2)`,
/// or the plain difference norm when both gradients are below `1e-12`.
///
/// The norm form is used because a central difference carries an absolute
/// rounding error near `eps |F| / h`, which swamps tiny individual partials.
pub fn check_gradient(
    model: &dyn DifferentiableModel,
    x: &FeatureVector,
    target: Target,
    h: f64,
) -> Result<f64, ModelError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(ModelError::Invalid(format!("finite-difference step must be positive, got {h}")));
    }
    let analytic = gradient(model, x, target)?.gradient;
    let mut probe = x.values().to_vec();
    let (mut diff, mut norm_a, mut norm_n) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..probe.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let plus = evaluate_raw(model, &probe, target)?;
        probe[i] = orig - h;
        let minus = evaluate_raw(model, &probe, target)?;
        probe[i] = orig;
        let numeric = (plus - minus) / (2.0 * h);
        diff += (analytic[i] - numeric).powi(2);
        norm_a += analytic[i] * analytic[i];
        norm_n += numeric * numeric;
    }
    Ok(diff.sqrt() / norm_a.sqrt().max(norm_n.sqrt()).max(1e-12))
}
