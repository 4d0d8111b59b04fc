//! Model files.
//!
//! A model file is JSON. Files with a `"kind"` key describe one of the
//! closed-form fixtures; anything else is read as a layered network
//! (`input_shape`, `layers`, `outputs`).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    BilinearProduct, Bump, BumpMixture, DifferentiableModel, Linear, Mlp, ModelError, ModelSpec, Shape, SymmetricSum,
    Univariate,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticSpec {
    Linear {
        input_shape: Vec<usize>,
        weights: Vec<f64>,
        #[serde(default)]
        bias: f64,
    },
    Bilinear {
        input_shape: Vec<usize>,
        pairs: Vec<[usize; 2]>,
    },
    SymmetricSum {
        input_shape: Vec<usize>,
        g: Univariate,
    },
    BumpMixture {
        input_shape: Vec<usize>,
        bumps: Vec<Bump>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        slope: Vec<f64>,
    },
}

impl AnalyticSpec {
    pub fn build(&self) -> Result<Box<dyn DifferentiableModel>, ModelError> {
        Ok(match self {
            AnalyticSpec::Linear { input_shape, weights, bias } => {
                Box::new(Linear::with_shape(weights.clone(), *bias, Shape::from_dims(input_shape)?)?)
            }
            AnalyticSpec::Bilinear { input_shape, pairs } => {
                let shape = Shape::from_dims(input_shape)?;
                Box::new(BilinearProduct::new(shape.len(), pairs.iter().map(|p| (p[0], p[1])).collect())?)
            }
            AnalyticSpec::SymmetricSum { input_shape, g } => {
                Box::new(SymmetricSum::new(Shape::from_dims(input_shape)?.len(), g.clone()))
            }
            AnalyticSpec::BumpMixture { input_shape, bumps, slope } => {
                Box::new(BumpMixture::new(Shape::from_dims(input_shape)?, bumps.clone(), slope.clone())?)
            }
        })
    }
}

/// Either kind of model file.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelFile {
    Network(ModelSpec),
    Analytic(AnalyticSpec),
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        let is_analytic = value.get("kind").is_some();
        if is_analytic {
            serde_json::from_value(value).map(ModelFile::Analytic)
        } else {
            serde_json::from_value(value).map(ModelFile::Network)
        }
        .map_err(|e| ModelError::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<Box<dyn DifferentiableModel>, ModelError> {
        match self {
            ModelFile::Network(spec) => Ok(Box::new(Mlp::from_spec(spec)?)),
            ModelFile::Analytic(spec) => spec.build(),
        }
    }

    pub fn to_json(&self) -> String {
        let text = match self {
            ModelFile::Network(spec) => serde_json::to_string_pretty(spec),
            ModelFile::Analytic(spec) => serde_json::to_string_pretty(spec),
        };
        text.expect("model files serialize") + "\n"
    }
}

pub fn parse_model(text: &str) -> Result<Box<dyn DifferentiableModel>, ModelError> {
    ModelFile::parse(text)?.build()
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Box<dyn DifferentiableModel>, ModelError> {
    parse_model(&fs::read_to_string(path)?)
}
