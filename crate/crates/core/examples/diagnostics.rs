//! Path diagnostics: directional derivative against gradient magnitude on a
//! straight line passing near a sharp bump, and the noise loss of IG versus
//! Guided IG on the same line.

use guided_ig::attribution::{guided_ig_unbounded, integrated_gradients, GuidedIgConfig};
use guided_ig::diffmodel::{FeatureVector, Target};
use guided_ig::evaluation::{directional_profile, path_diagnostics};
use guided_ig::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fixtures::off_path_bump();
    let input = FeatureVector::flat(vec![1.0, 0.0])?;
    let baseline = FeatureVector::flat(vec![0.0, 0.0])?;
    let target = Target::logit(0);

    let profile = directional_profile(&model, &input, &baseline, 20, target)?;
    println!(" alpha     delta     |grad|");
    for ((a, d), g) in profile.alphas.iter().zip(&profile.delta).zip(&profile.grad_norm) {
        println!(" {a:.3}  {d:+.5}  {g:.5}");
    }

    let ig = integrated_gradients(&model, &input, &baseline, 200, target, true)?;
    let gig = guided_ig_unbounded(
        &model,
        &input,
        &baseline,
        &GuidedIgConfig::default().with_target(target).with_trace(true),
    )?;
    for map in [&ig, &gig] {
        let diag = path_diagnostics(map.trace.as_ref().unwrap())?;
        let cos = &diag.cosine_profile;
        let last = cos.len() - 1;
        println!(
            "{:<7} noise_loss {:.5}  distance_loss {:.5}  cos(first, last gradient) {:+.3}",
            map.method, diag.noise_loss, diag.distance_loss, cos[0][last]
        );
    }
    Ok(())
}
