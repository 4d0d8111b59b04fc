//! Evaluation protocols and path diagnostics.

mod auc;
mod closed_path;
mod diagnostics;

use thiserror::Error;

use crate::attribution::AttributionError;
use crate::diffmodel::ModelError;

pub use auc::{auc_roc, auc_roc_map, roc_curve, AucResult, RocPoint};
pub use closed_path::{closed_path_experiment, closed_path_with, ClosedPathConfig, ClosedPathReport};
pub use diagnostics::{directional_profile, path_diagnostics, DirectionalProfile, PathDiagnostics};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Attribution(#[from] AttributionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{scores} scores but {mask} mask labels")]
    LengthMismatch { scores: usize, mask: usize },
    #[error("mask needs both classes, found {positives} positives and {negatives} negatives")]
    DegenerateMask { positives: usize, negatives: usize },
    #[error("non-finite score at index {0}")]
    NonFiniteScore(usize),
    #[error("trace is empty")]
    EmptyTrace,
    #[error("trace step {0} has no gradient")]
    MissingGradient(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}
