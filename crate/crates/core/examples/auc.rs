//! Localization AUC: score an attribution map against a binary mask with
//! the rank statistic and print the ROC curve.

use guided_ig::attribution::{attribute, GuidedIgConfig, Method};
use guided_ig::diffmodel::{Linear, Shape, Target};
use guided_ig::evaluation::{auc_roc_map, roc_curve};
use guided_ig::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Weights grow left to right, so the right half carries the evidence.
    let weights: Vec<f64> = (0..16).map(|i| (i % 4) as f64 - 1.0).collect();
    let model = Linear::with_shape(weights, 0.0, Shape::image(4, 4, 1))?;
    let image = fixtures::ramp_image();
    let gray: Vec<u8> = image.samples.chunks(3).map(|px| px[0]).collect();
    let input = guided_ig::imageio::ImageBuffer::new(4, 4, 1, gray)?.to_features();
    let mask = fixtures::half_mask();

    let config = GuidedIgConfig::default().with_target(Target::logit(0));
    for method in [Method::IntegratedGradients, Method::GuidedIg, Method::VanillaGradients, Method::EdgeDetector] {
        let map = attribute(&model, &input, method, &config)?;
        let auc = auc_roc_map(&map, &mask.labels)?;
        println!("{:<10} AUC {:.4}  ({} positives, {} negatives)", map.method, auc.auc, auc.n_pos, auc.n_neg);
    }

    let map = attribute(&model, &input, Method::GuidedIg, &config)?;
    println!("ROC for gig(0):");
    for p in roc_curve(&map.attributions, &mask.labels)? {
        println!("  threshold {:>8.4}  tpr {:.3}  fpr {:.3}", p.threshold, p.tpr, p.fpr);
    }
    Ok(())
}
