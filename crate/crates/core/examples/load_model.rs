//! Load model files: a network in layer form and a closed-form fixture,
//! both from the bundled fixture directory.

use guided_ig::diffmodel::{evaluate, load_model, output, FeatureVector, Target};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for name in ["relu.json", "bumpy.json", "bilinear.json", "offpath.json"] {
        let model = load_model(dir.join(name))?;
        let x = FeatureVector::new(vec![0.5; model.input_len()], model.input_shape())?;
        let out = output(model.as_ref(), &x, Target::softmax(0))?;
        println!(
            "{name:<14} shape {:?}, {} outputs, logits at 0.5: {:?}, softmax[0] = {:.4}",
            model.input_shape().dims(),
            model.num_outputs(),
            out.logits,
            evaluate(model.as_ref(), &x, Target::softmax(0))?
        );
    }
    Ok(())
}
