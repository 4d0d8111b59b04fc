//! SmoothGrad over IG and Guided IG, seeded so reruns match bit for bit.

use guided_ig::attribution::{smoothgrad, BaselineSpec, GuidedIgConfig, Method, SmoothGradConfig};
use guided_ig::diffmodel::Target;
use guided_ig::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fixtures::bumpy_mlp(0);
    let input = fixtures::uniform_point(8, 0, 3, 0.0, 1.0);
    let config =
        GuidedIgConfig::default().with_target(Target::softmax(1)).with_baseline(BaselineSpec::parse("black+white", 0)?);
    let smooth = SmoothGradConfig { samples: 16, sigma: 0.15, seed: 42 };

    for method in [Method::IntegratedGradients, Method::GuidedIg] {
        let map = smoothgrad(&model, &input, method, &config, &smooth)?;
        let again = smoothgrad(&model, &input, method, &config, &smooth)?;
        let shown: Vec<String> = map.attributions.iter().map(|a| format!("{a:+.4}")).collect();
        println!("{:<16} [{}]  repeatable: {}", map.method, shown.join(" "), map == again);
    }
    Ok(())
}
