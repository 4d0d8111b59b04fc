//! Path diagnostics: accumulated noise, deviation from the straight line,
//! gradient alignment and the straight-line directional profile.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::attribution::{AttributionError, PathTrace};
use crate::diffmodel::{gradient_raw, DifferentiableModel, FeatureVector, Target};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathDiagnostics {
    /// `sum_t sum_i |g_i dx_i|`.
    pub noise_loss: f64,
    /// `sum_t ||x_t - line(alpha_t)||_2 * d(alpha_t)`, where `alpha_t` is the
    /// fraction of the L1 distance covered before step `t`.
    pub distance_loss: f64,
    /// `alpha_t` for every step.
    pub alphas: Vec<f64>,
    /// Cosine similarity between the gradients of every pair of steps.
    pub cosine_profile: Vec<Vec<f64>>,
    /// `g . dx` per step.
    pub directional_delta_curve: Vec<f64>,
    /// `||g||_2` per step.
    pub gradient_norm_curve: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cosine similarity, taken as 0 when either vector is zero.
pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

pub fn path_diagnostics(trace: &PathTrace) -> Result<PathDiagnostics, EvalError> {
    if trace.steps.is_empty() {
        return Err(EvalError::EmptyTrace);
    }
    let n = trace.start.len();
    if let Some(i) = trace.steps.iter().position(|s| s.gradient.len() != n) {
        return Err(EvalError::MissingGradient(i));
    }
    let total: f64 = trace.start.iter().zip(&trace.end).map(|(s, e)| (s - e).abs()).sum();
    let covered = |p: &[f64]| -> f64 {
        if total == 0.0 {
            return 1.0;
        }
        let remaining: f64 = p.iter().zip(&trace.end).map(|(x, e)| (x - e).abs()).sum();
        1.0 - remaining / total
    };

    let mut noise_loss = 0.0;
    let mut distance_loss = 0.0;
    let mut alphas = Vec::with_capacity(trace.steps.len());
    let mut directional = Vec::with_capacity(trace.steps.len());
    let mut norms = Vec::with_capacity(trace.steps.len());
    for s in &trace.steps {
        let alpha = covered(&s.point);
        let after: Vec<f64> = s.point.iter().zip(&s.delta).map(|(p, d)| p + d).collect();
        let d_alpha = covered(&after) - alpha;
        let off_line: f64 = (0..n)
            .map(|i| {
                let on_line = trace.start[i] + alpha * (trace.end[i] - trace.start[i]);
                (s.point[i] - on_line).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        distance_loss += off_line * d_alpha;
        noise_loss += s.gradient.iter().zip(&s.delta).map(|(g, d)| (g * d).abs()).sum::<f64>();
        alphas.push(alpha);
        directional.push(dot(&s.gradient, &s.delta));
        norms.push(norm(&s.gradient));
    }
    let cosine_profile =
        trace.steps.iter().map(|a| trace.steps.iter().map(|b| cosine(&a.gradient, &b.gradient)).collect()).collect();
    Ok(PathDiagnostics {
        noise_loss,
        distance_loss,
        alphas,
        cosine_profile,
        directional_delta_curve: directional,
        gradient_norm_curve: norms,
    })
}

/// Gradient behaviour along the straight line from `baseline` to `input`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalProfile {
    /// Midpoints `(t - 0.5) / T`.
    pub alphas: Vec<f64>,
    /// `grad F . (x - b) / T`: the per-step change in `F` along the line.
    pub delta: Vec<f64>,
    /// `||grad F||_2`.
    pub grad_norm: Vec<f64>,
}

pub fn directional_profile(
    model: &dyn DifferentiableModel,
    input: &FeatureVector,
    baseline: &FeatureVector,
    steps: usize,
    target: Target,
) -> Result<DirectionalProfile, EvalError> {
    if input.len() != baseline.len() {
        return Err(AttributionError::ShapeMismatch { input: input.len(), baseline: baseline.len() }.into());
    }
    if steps == 0 {
        return Err(EvalError::Config("steps must be at least 1".into()));
    }
    let (x, b) = (input.values(), baseline.values());
    let diff: Vec<f64> = x.iter().zip(b).map(|(x, b)| x - b).collect();
    let mut profile = DirectionalProfile { alphas: Vec::new(), delta: Vec::new(), grad_norm: Vec::new() };
    for t in 1..=steps {
        let alpha = (t as f64 - 0.5) / steps as f64;
        let point: Vec<f64> = b.iter().zip(&diff).map(|(b, d)| b + alpha * d).collect();
        let g = gradient_raw(model, &point, target)?.gradient;
        profile.alphas.push(alpha);
        profile.delta.push(dot(&g, &diff) / steps as f64);
        profile.grad_norm.push(norm(&g));
    }
    Ok(profile)
}
