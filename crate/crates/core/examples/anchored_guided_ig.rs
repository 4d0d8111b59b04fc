//! Anchored Guided IG: more anchors keep the path closer to the straight
//! line, trading adaptivity for distance.

use guided_ig::attribution::{guided_ig_anchored, GuidedIgConfig};
use guided_ig::diffmodel::{FeatureVector, Target};
use guided_ig::evaluation::path_diagnostics;
use guided_ig::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fixtures::bump_family(0);
    let input = fixtures::uniform_point(64, 0, 0, 0.0, 1.0);
    let baseline = FeatureVector::flat(vec![0.0; 64])?;

    println!("   K   noise_loss  distance_loss  residual");
    for anchors in [0, 1, 5, 20, 100] {
        let config = GuidedIgConfig::default().with_target(Target::logit(0)).with_anchors(anchors).with_trace(true);
        let map = guided_ig_anchored(&model, &input, &baseline, &config)?;
        let diag = path_diagnostics(map.trace.as_ref().unwrap())?;
        println!(
            "{anchors:>4}   {:>9.5}   {:>11.5}   {:.2e}",
            diag.noise_loss,
            diag.distance_loss,
            map.completeness_residual.unwrap()
        );
    }
    Ok(())
}
