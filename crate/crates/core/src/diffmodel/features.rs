use serde::{Deserialize, Serialize};

use super::ModelError;

/// Layout metadata for a flat feature vector.
///
/// Image features are stored row-major with the channel index varying
/// fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shape {
    Image { height: usize, width: usize, channels: usize },
    Flat(usize),
}

impl Shape {
    pub fn image(height: usize, width: usize, channels: usize) -> Self {
        Shape::Image { height, width, channels }
    }

    pub fn len(&self) -> usize {
        match *self {
            Shape::Flat(n) => n,
            Shape::Image { height, width, channels } => height * width * channels,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `[n]` or `[h, w, c]`, the form used in model files.
    pub fn dims(&self) -> Vec<usize> {
        match *self {
            Shape::Flat(n) => vec![n],
            Shape::Image { height, width, channels } => vec![height, width, channels],
        }
    }

    pub fn from_dims(dims: &[usize]) -> Result<Self, ModelError> {
        match *dims {
            [n] => Ok(Shape::Flat(n)),
            [height, width, channels] => Ok(Shape::Image { height, width, channels }),
            _ => Err(ModelError::Invalid(format!("input_shape must be [n] or [h, w, c], got {dims:?}"))),
        }
    }
}

/// Finite real-valued features with shape metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
    shape: Shape,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, shape: Shape) -> Result<Self, ModelError> {
        if values.len() != shape.len() {
            return Err(ModelError::ShapeMismatch { expected: shape.len(), found: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite { index });
        }
        Ok(FeatureVector { values, shape })
    }

    pub fn flat(values: Vec<f64>) -> Result<Self, ModelError> {
        let shape = Shape::Flat(values.len());
        FeatureVector::new(values, shape)
    }

    pub fn filled(shape: Shape, value: f64) -> Result<Self, ModelError> {
        FeatureVector::new(vec![value; shape.len()], shape)
    }

    /// A vector with the same shape and new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, ModelError> {
        FeatureVector::new(values, self.shape)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_vectors() {
        assert!(matches!(
            FeatureVector::new(vec![0.0; 5], Shape::image(2, 2, 1)),
            Err(ModelError::ShapeMismatch { expected: 4, found: 5 })
        ));
        assert!(matches!(FeatureVector::flat(vec![0.0, f64::INFINITY]), Err(ModelError::NonFinite { index: 1 })));
    }

    #[test]
    fn dims_round_trip() {
        for s in [Shape::Flat(7), Shape::image(3, 4, 3)] {
            assert_eq!(Shape::from_dims(&s.dims()).unwrap(), s);
        }
        assert!(Shape::from_dims(&[1, 2]).is_err());
    }
}
