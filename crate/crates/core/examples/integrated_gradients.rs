//! Integrated Gradients on a small softplus network, with the completeness
//! residual shrinking as the step count grows.

use guided_ig::attribution::integrated_gradients;
use guided_ig::diffmodel::{FeatureVector, Target};
use guided_ig::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fixtures::bumpy_mlp(0);
    let input = fixtures::uniform_point(8, 0, 0, 0.0, 1.0);
    let baseline = FeatureVector::flat(vec![0.0; 8])?;

    for steps in [50, 200, 800] {
        let map = integrated_gradients(&model, &input, &baseline, steps, Target::logit(0), false)?;
        println!(
            "T={steps:>3}  sum={:+.6}  F(x)-F(b)={:+.6}  residual={:.2e}",
            map.sum(),
            map.f_input.unwrap() - map.f_baseline.unwrap(),
            map.completeness_residual.unwrap()
        );
    }

    let map = integrated_gradients(&model, &input, &baseline, 200, Target::softmax(0), false)?;
    println!("softmax class 0 attributions:");
    for (i, a) in map.attributions.iter().enumerate() {
        println!("  x{i} = {:.3}  ->  {a:+.5}", input.values()[i]);
    }
    Ok(())
}
