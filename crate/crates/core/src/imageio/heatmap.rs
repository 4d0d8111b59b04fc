use std::fmt;
use std::str::FromStr;

use super::{ImageBuffer, ImageError};
use crate::diffmodel::Shape;

/// How attribution magnitudes are mapped to `0..=255`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Normalization {
    /// `|a| / max |a|`.
    AbsMax,
    /// `min(|a|, c) / c` with `c` the `q`-th percentile of `|a|`, using
    /// linear interpolation between order statistics.
    Percentile(f64),
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization::Percentile(99.0)
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalization::AbsMax => f.write_str("absmax"),
            Normalization::Percentile(q) => write!(f, "percentile:{q}"),
        }
    }
}

impl FromStr for Normalization {
    type Err = String;

    /// `absmax`, `percentile` (q = 99) or `percentile:Q`.
    fn from_str(s: &str) -> Result<Self, String> {
        let q = match s {
            "absmax" => return Ok(Normalization::AbsMax),
            "percentile" => 99.0,
            _ => s
                .strip_prefix("percentile:")
                .and_then(|q| q.parse::<f64>().ok())
                .ok_or_else(|| format!("unknown normalization {s:?}, expected absmax or percentile[:Q]"))?,
        };
        if !(0.0..=100.0).contains(&q) {
            return Err(format!("percentile {q} outside [0, 100]"));
        }
        Ok(Normalization::Percentile(q))
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Grayscale heatmap of per-pixel attribution magnitude.
///
/// `shape` gives the pixel grid (a flat shape renders as a single row);
/// when the attribution has several values per pixel they are summed
/// before taking the magnitude.
pub fn render_heatmap(
    attributions: &[f64],
    shape: Shape,
    normalization: Normalization,
) -> Result<ImageBuffer, ImageError> {
    let (height, width) = match shape {
        Shape::Image { height, width, .. } => (height, width),
        Shape::Flat(n) => (1, n),
    };
    let pixels = height * width;
    if pixels == 0 || !attributions.len().is_multiple_of(pixels) || attributions.is_empty() {
        return Err(ImageError::ShapeMismatch { len: attributions.len(), pixels });
    }
    let per_pixel = attributions.len() / pixels;
    let magnitude: Vec<f64> = attributions.chunks(per_pixel).map(|c| c.iter().sum::<f64>().abs()).collect();
    if magnitude.iter().any(|m| !m.is_finite()) {
        return Err(ImageError::Invalid("non-finite attribution".into()));
    }
    let scale = match normalization {
        Normalization::AbsMax => magnitude.iter().copied().fold(0.0, f64::max),
        Normalization::Percentile(q) => {
            let mut sorted = magnitude.clone();
            sorted.sort_by(f64::total_cmp);
            percentile(&sorted, q)
        }
    };
    let samples =
        magnitude.iter().map(|&m| if scale > 0.0 { (m.min(scale) / scale * 255.0).round() as u8 } else { 0 }).collect();
    ImageBuffer::new(width, height, 1, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_map_is_black_and_single_peak_is_white() {
        let shape = Shape::image(2, 2, 1);
        assert_eq!(render_heatmap(&[0.0; 4], shape, Normalization::AbsMax).unwrap().samples, vec![0; 4]);
        let img = render_heatmap(&[0.0, -3.0, 0.0, 0.0], shape, Normalization::AbsMax).unwrap();
        assert_eq!(img.samples, vec![0, 255, 0, 0]);
    }

    #[test]
    fn channels_are_summed_before_magnitude() {
        let img =
            render_heatmap(&[1.0, -1.0, 0.0, 2.0, 0.0, 0.0], Shape::image(1, 2, 3), Normalization::AbsMax).unwrap();
        assert_eq!(img.samples, vec![0, 255]);
        assert!(render_heatmap(&[1.0; 5], Shape::image(1, 2, 1), Normalization::AbsMax).is_err());
    }

    #[test]
    fn percentile_interpolates_between_order_statistics() {
        assert_eq!(percentile(&[0.0, 1.0, 2.0, 3.0, 4.0], 50.0), 2.0);
        assert_eq!(percentile(&[0.0, 10.0], 25.0), 2.5);
        assert_eq!(percentile(&[7.0], 99.0), 7.0);
    }

    #[test]
    fn parses_normalizations() {
        assert_eq!("absmax".parse::<Normalization>().unwrap(), Normalization::AbsMax);
        assert_eq!("percentile".parse::<Normalization>().unwrap(), Normalization::Percentile(99.0));
        assert_eq!("percentile:95.5".parse::<Normalization>().unwrap(), Normalization::Percentile(95.5));
        assert!("percentile:101".parse::<Normalization>().is_err());
        assert!("gamma".parse::<Normalization>().is_err());
    }
}
