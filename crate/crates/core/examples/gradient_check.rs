//! Compare analytic gradients with central differences on every fixture.

use guided_ig::diffmodel::{check_gradient, DifferentiableModel, FeatureVector, Target};
use guided_ig::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let models: Vec<(&str, Box<dyn DifferentiableModel>)> = vec![
        ("bilinear", Box::new(fixtures::bilinear())),
        ("symmetric", Box::new(fixtures::symmetric_sum())),
        ("bump", Box::new(fixtures::smooth_bumps())),
        ("bump64", Box::new(fixtures::bump_family(0))),
        ("bumpy", Box::new(fixtures::bumpy_mlp(0))),
        ("tied", Box::new(fixtures::tied_mlp(0).0)),
    ];
    for (name, model) in &models {
        let mut worst = 0.0f64;
        for i in 0..20 {
            let x: FeatureVector = fixtures::uniform_point(model.input_len(), 1, i, 0.0, 1.0);
            worst = worst.max(check_gradient(model.as_ref(), &x, Target::logit(0), 1e-4)?);
        }
        println!("{name:<10} worst relative error over 20 points: {worst:.2e}");
    }
    Ok(())
}
