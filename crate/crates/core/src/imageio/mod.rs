//! Netpbm images, ground-truth masks and attribution heatmaps.
//!
//! Grayscale images are PGM (`P2` ASCII or `P5` binary) and RGB images PPM
//! (`P3`/`P6`), always with maxval 255. Images are written in the binary
//! variants. Feature vectors are row-major with channels innermost and
//! samples scaled to `[0, 1]`.

mod heatmap;
mod netpbm;

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::diffmodel::{FeatureVector, ModelError, Shape};

pub use heatmap::{render_heatmap, Normalization};
pub use netpbm::{decode, encode};

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("malformed image header: {0}")]
    MalformedHeader(String),
    #[error("truncated image data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("unsupported maxval {0}, only 255 is supported")]
    UnsupportedMaxval(u32),
    #[error("invalid image: {0}")]
    Invalid(String),
    #[error("attribution length {len} does not fit {pixels} pixels")]
    ShapeMismatch { len: usize, pixels: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// 8-bit image, row-major with channels innermost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub samples: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self, ImageError> {
        if channels != 1 && channels != 3 {
            return Err(ImageError::Invalid(format!("{channels} channels, expected 1 or 3")));
        }
        if width == 0 || height == 0 {
            return Err(ImageError::Invalid(format!("empty {width}x{height} image")));
        }
        if samples.len() != width * height * channels {
            return Err(ImageError::Invalid(format!(
                "{} samples for a {width}x{height}x{channels} image",
                samples.len()
            )));
        }
        Ok(ImageBuffer { width, height, channels, samples })
    }

    pub fn shape(&self) -> Shape {
        Shape::image(self.height, self.width, self.channels)
    }

    /// Samples divided by 255.
    pub fn to_features(&self) -> FeatureVector {
        let values = self.samples.iter().map(|&s| f64::from(s) / 255.0).collect();
        FeatureVector::new(values, self.shape()).expect("sample count matches shape")
    }

    /// Inverse of [`to_features`](Self::to_features): `round(255 v)` clamped
    /// to the byte range.
    pub fn from_features(features: &FeatureVector) -> Result<Self, ImageError> {
        let Shape::Image { height, width, channels } = features.shape() else {
            return Err(ImageError::Invalid("feature vector has no image shape".into()));
        };
        let samples = features.values().iter().map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8).collect();
        ImageBuffer::new(width, height, channels, samples)
    }
}

/// Per-pixel binary labels; `true` marks the object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskBuffer {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<bool>,
}

impl MaskBuffer {
    /// Thresholds a grayscale image at 128.
    pub fn from_image(image: &ImageBuffer) -> Result<Self, ImageError> {
        if image.channels != 1 {
            return Err(ImageError::Invalid("masks must be grayscale".into()));
        }
        Ok(MaskBuffer {
            width: image.width,
            height: image.height,
            labels: image.samples.iter().map(|&s| s >= 128).collect(),
        })
    }

    /// 0 for background, 255 for object.
    pub fn to_image(&self) -> ImageBuffer {
        let samples = self.labels.iter().map(|&l| if l { 255 } else { 0 }).collect();
        ImageBuffer::new(self.width, self.height, 1, samples).expect("mask dimensions are valid")
    }
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer, ImageError> {
    decode(&fs::read(path)?)
}

pub fn write_image(image: &ImageBuffer, path: impl AsRef<Path>) -> Result<(), ImageError> {
    Ok(fs::write(path, encode(image))?)
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<MaskBuffer, ImageError> {
    MaskBuffer::from_image(&read_image(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn features_scale_by_255_and_round_back() {
        let img = ImageBuffer::new(2, 1, 3, vec![0, 1, 2, 127, 128, 255]).unwrap();
        let f = img.to_features();
        assert_eq!(f.shape(), Shape::image(1, 2, 3));
        assert_eq!(f.values()[3], 127.0 / 255.0);
        assert_eq!(ImageBuffer::from_features(&f).unwrap(), img);
    }

    #[test]
    fn mask_threshold_is_128() {
        let img = ImageBuffer::new(4, 1, 1, vec![0, 127, 128, 255]).unwrap();
        let m = MaskBuffer::from_image(&img).unwrap();
        assert_eq!(m.labels, vec![false, false, true, true]);
        assert_eq!(m.to_image().samples, vec![0, 0, 255, 255]);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(ImageBuffer::new(2, 2, 2, vec![0; 8]).is_err());
        assert!(ImageBuffer::new(2, 2, 1, vec![0; 3]).is_err());
        assert!(ImageBuffer::new(0, 2, 1, vec![]).is_err());
    }
}
