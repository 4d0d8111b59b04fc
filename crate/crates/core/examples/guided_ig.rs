//! Unbounded Guided IG with a recorded trace: how many features each move
//! touched and how the path length compares with the straight line.

use guided_ig::attribution::{guided_ig_unbounded, integrated_gradients, GuidedIgConfig};
use guided_ig::diffmodel::{FeatureVector, Target};
use guided_ig::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fixtures::smooth_bumps();
    let input = fixtures::uniform_point(8, 0, 0, 0.0, 1.0);
    let baseline = FeatureVector::flat(vec![0.0; 8])?;

    let config = GuidedIgConfig::default().with_target(Target::logit(0)).with_trace(true);
    let gig = guided_ig_unbounded(&model, &input, &baseline, &config)?;
    let ig = integrated_gradients(&model, &input, &baseline, config.steps, config.target, false)?;

    println!("feature   input      IG         GIG");
    for i in 0..8 {
        println!("  x{i}     {:.3}   {:+.5}   {:+.5}", input.values()[i], ig.attributions[i], gig.attributions[i]);
    }
    println!(
        "completeness residual: IG {:.2e}, GIG {:.2e}",
        ig.completeness_residual.unwrap(),
        gig.completeness_residual.unwrap()
    );

    let trace = gig.trace.as_ref().unwrap();
    let straight_l2 = input.values().iter().map(|x| x * x).sum::<f64>().sqrt();
    let clamped = trace.steps.iter().filter(|s| s.clamped).count();
    let mean_moved = trace.steps.iter().map(|s| s.selected_count).sum::<usize>() as f64 / trace.steps.len() as f64;
    println!(
        "{} moves over {} steps, {clamped} snapped to the input, {mean_moved:.2} features per move",
        trace.steps.len(),
        config.steps
    );
    println!("path L1 {:.6} (straight line {:.6})", trace.l1_length(), input.values().iter().sum::<f64>());
    println!(
        "path L2 {:.6} (straight line {straight_l2:.6}, bound {:.6})",
        trace.l2_length(),
        8f64.sqrt() * straight_l2
    );
    Ok(())
}
