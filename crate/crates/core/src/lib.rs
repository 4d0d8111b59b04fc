//! Path-integral feature attribution for differentiable models.
//!
//! The crate is organised around a small differentiable-model abstraction
//! ([`diffmodel`]) consumed by the attribution methods in [`attribution`]:
//! Integrated Gradients, unbounded and anchored Guided IG, vanilla
//! gradients, an edge-detector reference and SmoothGrad averaging. The
//! [`evaluation`] module contains the closed-path experiment, rank-statistic
//! AUC and path diagnostics; [`imageio`] reads and writes Netpbm images and
//! renders heatmaps. [`cli`] backs the `gig` binary.
//!
//! ```
//! use guided_ig::attribution::{guided_ig_unbounded, GuidedIgConfig};
//! use guided_ig::diffmodel::{FeatureVector, Linear, Target};
//!
//! let model = Linear::new(vec![2.0, 3.0], 0.0);
//! let input = FeatureVector::flat(vec![1.0, 1.0]).unwrap();
//! let baseline = FeatureVector::flat(vec![0.0, 0.0]).unwrap();
//! let config = GuidedIgConfig::default().with_target(Target::logit(0));
//! let map = guided_ig_unbounded(&model, &input, &baseline, &config).unwrap();
//! assert!((map.attributions[0] - 2.0).abs() < 1e-9);
//! assert!((map.attributions[1] - 3.0).abs() < 1e-9);
//! ```

pub mod attribution;
pub mod cli;
pub mod diffmodel;
pub mod evaluation;
pub mod fixtures;
pub mod imageio;
pub mod rng;

pub use attribution::{AttributionError, AttributionMap, GuidedIgConfig, PathTrace};
pub use diffmodel::{DifferentiableModel, FeatureVector, ModelError, OutputMode, Shape, Target};
