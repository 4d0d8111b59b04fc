//! Closed-form toy models used as fixtures.

use serde::{Deserialize, Serialize};

use super::{DifferentiableModel, ModelError, Shape};

/// `F(x) = w . x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Linear {
    weights: Vec<f64>,
    bias: f64,
    shape: Shape,
}

impl Linear {
    pub fn new(weights: Vec<f64>, bias: f64) -> Self {
        let shape = Shape::Flat(weights.len());
        Linear { weights, bias, shape }
    }

    pub fn with_shape(weights: Vec<f64>, bias: f64, shape: Shape) -> Result<Self, ModelError> {
        if shape.len() != weights.len() {
            return Err(ModelError::ShapeMismatch { expected: shape.len(), found: weights.len() });
        }
        Ok(Linear { weights, bias, shape })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }
}

impl DifferentiableModel for Linear {
    fn input_shape(&self) -> Shape {
        self.shape
    }

    fn num_outputs(&self) -> usize {
        1
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        vec![self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias]
    }

    fn forward_backward(&self, x: &[f64], seed: &dyn Fn(&[f64]) -> Vec<f64>) -> (Vec<f64>, Vec<f64>) {
        let logits = self.forward(x);
        let s = seed(&logits)[0];
        (logits, self.weights.iter().map(|w| w * s).collect())
    }
}

/// Product of pairwise products, `F(x) = prod_{(i, j)} x_i x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearProduct {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl BilinearProduct {
    pub fn new(n: usize, pairs: Vec<(usize, usize)>) -> Result<Self, ModelError> {
        if pairs.is_empty() {
            return Err(ModelError::Invalid("bilinear model needs at least one pair".into()));
        }
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(ModelError::Invalid(format!("pair ({i}, {j}) out of range for {n} features")));
        }
        Ok(BilinearProduct { n, pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn factors(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().flat_map(|&(i, j)| [i, j])
    }
}

impl DifferentiableModel for BilinearProduct {
    fn input_shape(&self) -> Shape {
        Shape::Flat(self.n)
    }

    fn num_outputs(&self) -> usize {
        1
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        vec![self.factors().map(|k| x[k]).product()]
    }

    fn forward_backward(&self, x: &[f64], seed: &dyn Fn(&[f64]) -> Vec<f64>) -> (Vec<f64>, Vec<f64>) {
        let idx: Vec<usize> = self.factors().collect();
        let vals: Vec<f64> = idx.iter().map(|&k| x[k]).collect();
        // Prefix/suffix products keep the derivative exact when some factor is zero.
        let mut prefix = vec![1.0; vals.len() + 1];
        for (l, v) in vals.iter().enumerate() {
            prefix[l + 1] = prefix[l] * v;
        }
        let mut suffix = vec![1.0; vals.len() + 1];
        for l in (0..vals.len()).rev() {
            suffix[l] = suffix[l + 1] * vals[l];
        }
        let logits = vec![prefix[vals.len()]];
        let s = seed(&logits)[0];
        let mut grad = vec![0.0; self.n];
        for (l, &k) in idx.iter().enumerate() {
            grad[k] += prefix[l] * suffix[l + 1];
        }
        (logits, grad.into_iter().map(|g| g * s).collect())
    }
}

/// Shared one-dimensional function for [`SymmetricSum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Univariate {
    /// `softplus(scale * x + shift)`
    Softplus { scale: f64, shift: f64 },
    /// `amplitude * sin(frequency * x + phase)`
    Sine { amplitude: f64, frequency: f64, phase: f64 },
    /// `sum_k c_k x^k`
    Polynomial { coefficients: Vec<f64> },
}

impl Univariate {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Univariate::Softplus { scale, shift } => softplus(scale * x + shift),
            Univariate::Sine { amplitude, frequency, phase } => amplitude * (frequency * x + phase).sin(),
            Univariate::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Univariate::Softplus { scale, shift } => scale * sigmoid(scale * x + shift),
            Univariate::Sine { amplitude, frequency, phase } => amplitude * frequency * (frequency * x + phase).cos(),
            Univariate::Polynomial { coefficients } => {
                coefficients.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, c)| acc * x + k as f64 * c)
            }
        }
    }
}

pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `F(x) = sum_i g(x_i)`: every pair of features is symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSum {
    n: usize,
    g: Univariate,
}

impl SymmetricSum {
    pub fn new(n: usize, g: Univariate) -> Self {
        SymmetricSum { n, g }
    }

    pub fn function(&self) -> &Univariate {
        &self.g
    }
}

impl DifferentiableModel for SymmetricSum {
    fn input_shape(&self) -> Shape {
        Shape::Flat(self.n)
    }

    fn num_outputs(&self) -> usize {
        1
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        vec![x.iter().map(|&v| self.g.value(v)).sum()]
    }

    fn forward_backward(&self, x: &[f64], seed: &dyn Fn(&[f64]) -> Vec<f64>) -> (Vec<f64>, Vec<f64>) {
        let logits = self.forward(x);
        let s = seed(&logits)[0];
        (logits, x.iter().map(|&v| self.g.derivative(v) * s).collect())
    }
}

/// One Gaussian bump `amplitude * exp(-sharpness * |x[dims] - center|^2)`.
///
/// With `dims` empty the bump spans every feature and `center` has one
/// entry per feature; otherwise `center[k]` is the center along feature
/// `dims[k]` and the remaining features do not affect the bump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub amplitude: f64,
    pub sharpness: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dims: Vec<usize>,
}

/// Sum of Gaussian bumps plus an optional linear trend.
///
/// Narrow bumps placed near (but off) the straight line between two points
/// create the high-gradient regions that make straight-line integration
/// noisy.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpMixture {
    shape: Shape,
    bumps: Vec<Bump>,
    slope: Vec<f64>,
}

impl BumpMixture {
    pub fn new(shape: Shape, bumps: Vec<Bump>, slope: Vec<f64>) -> Result<Self, ModelError> {
        let n = shape.len();
        for b in &bumps {
            if b.dims.is_empty() && b.center.len() != n {
                return Err(ModelError::ShapeMismatch { expected: n, found: b.center.len() });
            }
            if !b.dims.is_empty() && (b.dims.len() != b.center.len() || b.dims.iter().any(|&d| d >= n)) {
                return Err(ModelError::Invalid(format!(
                    "bump dims {:?} must index {n} features and match the {}-entry center",
                    b.dims,
                    b.center.len()
                )));
            }
        }
        if !slope.is_empty() && slope.len() != n {
            return Err(ModelError::ShapeMismatch { expected: n, found: slope.len() });
        }
        if bumps.iter().any(|b| b.sharpness.is_nan() || b.sharpness < 0.0 || !b.amplitude.is_finite()) {
            return Err(ModelError::Invalid("bump sharpness must be non-negative and amplitude finite".into()));
        }
        Ok(BumpMixture { shape, bumps, slope })
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn slope(&self) -> &[f64] {
        &self.slope
    }
}

impl Bump {
    /// `(feature, center)` pairs the bump depends on.
    fn coords(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let all = self.dims.is_empty();
        self.center.iter().enumerate().map(move |(k, &c)| (if all { k } else { self.dims[k] }, c))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let d2: f64 = self.coords().map(|(i, c)| (x[i] - c) * (x[i] - c)).sum();
        self.amplitude * (-self.sharpness * d2).exp()
    }
}

impl DifferentiableModel for BumpMixture {
    fn input_shape(&self) -> Shape {
        self.shape
    }

    fn num_outputs(&self) -> usize {
        1
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let trend: f64 = self.slope.iter().zip(x).map(|(w, v)| w * v).sum();
        vec![trend + self.bumps.iter().map(|b| b.value(x)).sum::<f64>()]
    }

    fn forward_backward(&self, x: &[f64], seed: &dyn Fn(&[f64]) -> Vec<f64>) -> (Vec<f64>, Vec<f64>) {
        let mut grad = if self.slope.is_empty() { vec![0.0; x.len()] } else { self.slope.clone() };
        let mut value: f64 = self.slope.iter().zip(x).map(|(w, v)| w * v).sum();
        for b in &self.bumps {
            let e = b.value(x);
            value += e;
            let k = -2.0 * b.sharpness * e;
            for (i, c) in b.coords() {
                grad[i] += k * (x[i] - c);
            }
        }
        let logits = vec![value];
        let s = seed(&logits)[0];
        (logits, grad.into_iter().map(|g| g * s).collect())
    }
}
