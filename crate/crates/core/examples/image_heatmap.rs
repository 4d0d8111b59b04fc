//! Image round trip: read a PPM, attribute every channel, and write a
//! grayscale heatmap next to a copy of the input.

use guided_ig::attribution::{attribute, GuidedIgConfig, Method};
use guided_ig::diffmodel::{Linear, Target};
use guided_ig::imageio::{read_image, render_heatmap, write_image, Normalization};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let image = read_image(fixtures.join("ramp.ppm"))?;
    let input = image.to_features();
    println!("read {}x{}x{} image", image.width, image.height, image.channels);

    // Red counts for, blue counts against.
    let weights = (0..input.len()).map(|i| [1.0, 0.0, -1.0][i % 3]).collect();
    let model = Linear::with_shape(weights, 0.0, input.shape())?;
    let map = attribute(&model, &input, Method::GuidedIg, &GuidedIgConfig::default().with_target(Target::logit(0)))?;

    let out = std::env::temp_dir().join("guided-ig-example");
    std::fs::create_dir_all(&out)?;
    for norm in [Normalization::AbsMax, Normalization::Percentile(90.0)] {
        let heat = render_heatmap(&map.attributions, map.shape, norm)?;
        let name = format!("heatmap_{}.pgm", norm.to_string().replace(':', "_"));
        write_image(&heat, out.join(&name))?;
        println!("{name}: {:?}", heat.samples);
    }
    write_image(&image, out.join("input.ppm"))?;
    println!("wrote files to {}", out.display());
    Ok(())
}
