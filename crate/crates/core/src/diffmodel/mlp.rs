//! Dense feed-forward networks loaded from JSON layer lists.

use serde::{Deserialize, Serialize};

use super::analytic::{sigmoid, softplus};
use super::{DifferentiableModel, ModelError, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Softplus,
}

impl Activation {
    pub fn parse(name: &str) -> Result<Self, ModelError> {
        match name {
            "identity" => Ok(Activation::Identity),
            "relu" => Ok(Activation::Relu),
            "softplus" => Ok(Activation::Softplus),
            other => Err(ModelError::UnknownActivation(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::Relu => "relu",
            Activation::Softplus => "softplus",
        }
    }

    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
            Activation::Softplus => softplus(z),
        }
    }

    // ReLU'(0) = 0.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Softplus => sigmoid(z),
        }
    }
}

/// One dense layer as stored on disk. `weights` has one row per output unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub activation: String,
}

/// The on-disk network description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub input_shape: Vec<usize>,
    pub layers: Vec<LayerSpec>,
    pub outputs: usize,
}

#[derive(Clone, Debug, PartialEq)]
struct Dense {
    rows: usize,
    cols: usize,
    // row-major, rows x cols
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    shape: Shape,
    layers: Vec<Dense>,
}

impl Mlp {
    pub fn from_spec(spec: &ModelSpec) -> Result<Self, ModelError> {
        let shape = Shape::from_dims(&spec.input_shape)?;
        if spec.layers.is_empty() {
            return Err(ModelError::Invalid("model has no layers".into()));
        }
        let mut width = shape.len();
        let mut layers = Vec::with_capacity(spec.layers.len());
        for (li, layer) in spec.layers.iter().enumerate() {
            let activation = Activation::parse(&layer.activation)?;
            let rows = layer.weights.len();
            if rows == 0 {
                return Err(ModelError::DimensionMismatch { layer: li, detail: "layer has no output units".into() });
            }
            if let Some((r, row)) = layer.weights.iter().enumerate().find(|(_, row)| row.len() != width) {
                return Err(ModelError::DimensionMismatch {
                    layer: li,
                    detail: format!("row {r} has {} columns, previous layer produces {width}", row.len()),
                });
            }
            if layer.bias.len() != rows {
                return Err(ModelError::DimensionMismatch {
                    layer: li,
                    detail: format!("bias has {} entries for {rows} output units", layer.bias.len()),
                });
            }
            let weights: Vec<f64> = layer.weights.iter().flatten().copied().collect();
            if weights.iter().chain(&layer.bias).any(|v| !v.is_finite()) {
                return Err(ModelError::Invalid(format!("layer {li} has non-finite parameters")));
            }
            layers.push(Dense { rows, cols: width, weights, bias: layer.bias.clone(), activation });
            width = rows;
        }
        if width != spec.outputs {
            return Err(ModelError::DimensionMismatch {
                layer: spec.layers.len() - 1,
                detail: format!("final layer produces {width} outputs, spec declares {}", spec.outputs),
            });
        }
        Ok(Mlp { shape, layers })
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            input_shape: self.shape.dims(),
            layers: self
                .layers
                .iter()
                .map(|d| LayerSpec {
                    weights: d.weights.chunks(d.cols).map(<[f64]>::to_vec).collect(),
                    bias: d.bias.clone(),
                    activation: d.activation.name().to_string(),
                })
                .collect(),
            outputs: self.num_outputs(),
        }
    }

    /// Pre-activations of every layer.
    pub fn pre_activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.run(x).0
    }

    fn run(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        post.push(x.to_vec());
        for d in &self.layers {
            let input = post.last().unwrap();
            let z: Vec<f64> = d
                .weights
                .chunks(d.cols)
                .zip(&d.bias)
                .map(|(row, b)| row.iter().zip(input).map(|(w, v)| w * v).sum::<f64>() + b)
                .collect();
            post.push(z.iter().map(|&v| d.activation.apply(v)).collect());
            pre.push(z);
        }
        (pre, post)
    }
}

impl DifferentiableModel for Mlp {
    fn input_shape(&self) -> Shape {
        self.shape
    }

    fn num_outputs(&self) -> usize {
        self.layers.last().map_or(0, |d| d.rows)
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let (_, mut post) = self.run(x);
        post.pop().unwrap()
    }

    fn forward_backward(&self, x: &[f64], seed: &dyn Fn(&[f64]) -> Vec<f64>) -> (Vec<f64>, Vec<f64>) {
        let (pre, mut post) = self.run(x);
        let logits = post.pop().unwrap();
        let mut upstream = seed(&logits);
        for (d, z) in self.layers.iter().zip(&pre).rev() {
            let delta: Vec<f64> = upstream.iter().zip(z).map(|(u, &zi)| u * d.activation.derivative(zi)).collect();
            let mut down = vec![0.0; d.cols];
            for (row, dr) in d.weights.chunks(d.cols).zip(&delta) {
                for (g, w) in down.iter_mut().zip(row) {
                    *g += w * dr;
                }
            }
            upstream = down;
        }
        (logits, upstream)
    }
}
