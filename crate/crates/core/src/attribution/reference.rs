use super::{AttributionError, AttributionMap, ConfigSnapshot};
use crate::diffmodel::{gradient, DifferentiableModel, FeatureVector, Shape, Target};

/// The raw gradient at the input.
pub fn vanilla_gradients(
    model: &dyn DifferentiableModel,
    input: &FeatureVector,
    target: Target,
) -> Result<AttributionMap, AttributionError> {
    let record = gradient(model, input, target)?;
    Ok(AttributionMap {
        attributions: record.gradient,
        shape: input.shape(),
        method: "gradients".into(),
        config: ConfigSnapshot { target: Some(target), ..ConfigSnapshot::default() },
        f_input: Some(record.value),
        f_baseline: None,
        completeness_residual: None,
        trace: None,
    })
}

/// Model-free edge saliency: the mean absolute intensity difference between
/// each pixel and its in-bounds 8-neighbours, after averaging channels.
///
/// The result has one value per pixel (shape `h x w x 1`); a 1x1 image gets 0.
pub fn edge_detector(input: &FeatureVector) -> Result<AttributionMap, AttributionError> {
    let (height, width, channels) = match input.shape() {
        Shape::Image { height, width, channels } if height > 0 && width > 0 && channels > 0 => {
            (height, width, channels)
        }
        other => return Err(AttributionError::NotAnImage(other)),
    };
    let intensity: Vec<f64> =
        input.values().chunks(channels).map(|px| px.iter().sum::<f64>() / channels as f64).collect();
    let mut saliency = vec![0.0; height * width];
    for r in 0..height {
        for c in 0..width {
            let center = intensity[r * width + c];
            let mut total = 0.0;
            let mut count = 0usize;
            for dr in -1isize..=1 {
                for dc in -1isize..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if nr < 0 || nc < 0 || nr >= height as isize || nc >= width as isize {
                        continue;
                    }
                    total += (center - intensity[nr as usize * width + nc as usize]).abs();
                    count += 1;
                }
            }
            saliency[r * width + c] = if count == 0 { 0.0 } else { total / count as f64 };
        }
    }
    Ok(AttributionMap {
        attributions: saliency,
        shape: Shape::image(height, width, 1),
        method: "edge".into(),
        config: ConfigSnapshot::default(),
        f_input: None,
        f_baseline: None,
        completeness_residual: None,
        trace: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmodel::{BilinearProduct, Linear};

    #[test]
    fn gradients_are_the_attribution() {
        let m = Linear::new(vec![2.0, 3.0], 0.0);
        let map = vanilla_gradients(&m, &FeatureVector::flat(vec![9.0, -1.0]).unwrap(), Target::logit(0)).unwrap();
        assert_eq!(map.attributions, vec![2.0, 3.0]);
        assert_eq!(map.completeness_residual, None);
        let b = BilinearProduct::new(2, vec![(0, 1)]).unwrap();
        let map = vanilla_gradients(&b, &FeatureVector::flat(vec![1.0, 2.0]).unwrap(), Target::logit(0)).unwrap();
        assert_eq!(map.attributions, vec![2.0, 1.0]);
    }

    #[test]
    fn edge_detector_neighbour_counts() {
        let mut v = vec![0.0; 9];
        v[4] = 1.0;
        let map = edge_detector(&FeatureVector::new(v, Shape::image(3, 3, 1)).unwrap()).unwrap();
        let a = &map.attributions;
        assert_eq!(a[4], 1.0);
        for i in [1, 3, 5, 7] {
            assert_eq!(a[i], 1.0 / 5.0);
        }
        for i in [0, 2, 6, 8] {
            assert_eq!(a[i], 1.0 / 3.0);
        }
    }

    #[test]
    fn edge_detector_degenerate_inputs() {
        let flat = edge_detector(&FeatureVector::filled(Shape::image(4, 5, 3), 0.7).unwrap()).unwrap();
        assert!(flat.attributions.iter().all(|&a| a == 0.0));
        assert_eq!(flat.shape, Shape::image(4, 5, 1));
        let one = edge_detector(&FeatureVector::new(vec![0.3], Shape::image(1, 1, 1)).unwrap()).unwrap();
        assert_eq!(one.attributions, vec![0.0]);
        assert!(matches!(
            edge_detector(&FeatureVector::flat(vec![0.0; 4]).unwrap()),
            Err(AttributionError::NotAnImage(_))
        ));
    }

    #[test]
    fn edge_detector_averages_channels() {
        // pixel 0 = (0, 0, 0.9) -> 0.3, pixel 1 = (0.3, 0.3, 0.3) -> 0.3
        let x = FeatureVector::new(vec![0.0, 0.0, 0.9, 0.3, 0.3, 0.3], Shape::image(1, 2, 3)).unwrap();
        let map = edge_detector(&x).unwrap();
        assert!(map.attributions.iter().all(|a| a.abs() < 1e-15));
    }
}
