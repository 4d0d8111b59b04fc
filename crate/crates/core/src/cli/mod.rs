//! The `gig` command-line front end.
//!
//! [`run`] parses an argument vector, executes one subcommand and returns
//! the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | configuration error (bad or missing flag, invalid value) |
//! | 3 | I/O error (unreadable or malformed file, write failure) |
//! | 4 | numerical failure (non-finite values, stalled path, gradient check over tolerance) |
//!
//! Output files are written to a temporary sibling and renamed into place.

mod commands;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::attribution::{AttributionError, Method};
use crate::diffmodel::{ModelError, OutputMode};
use crate::evaluation::EvalError;
use crate::imageio::ImageError;

#[derive(Debug, Parser)]
#[command(name = "gig", version, about = "Path-integral feature attribution and its evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Attribute a model output to the input features.
    Attribute(AttributeArgs),
    /// Closed-loop consistency error of IG or Guided IG.
    EvalClosedPath(ClosedPathArgs),
    /// AUC of an attribution CSV against a ground-truth mask.
    EvalAuc(AucArgs),
    /// Noise/distance losses and gradient profiles from a path trace.
    Diagnostics(DiagnosticsArgs),
    /// Write the bundled fixture models and images.
    GenFixtures(GenFixturesArgs),
    /// Compare analytic gradients with central finite differences.
    CheckGradients(CheckGradientsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ig,
    Gig,
    Gradients,
    Edge,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ig => Method::IntegratedGradients,
            MethodArg::Gig => Method::GuidedIg,
            MethodArg::Gradients => Method::VanillaGradients,
            MethodArg::Edge => Method::EdgeDetector,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Logit,
    Softmax,
}

impl From<ModeArg> for OutputMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Logit => OutputMode::Logit,
            ModeArg::Softmax => OutputMode::Softmax,
        }
    }
}

/// Model, target and path settings shared by several subcommands.
#[derive(Debug, Args)]
pub struct PathArgs {
    /// Model file, or `builtin:NAME[:SEED]` for a bundled fixture.
    #[arg(long)]
    pub model: String,
    /// Riemann steps T.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Fraction p of unfinished features moved per Guided IG step.
    #[arg(long, default_value_t = 0.1)]
    pub fraction: f64,
    /// Anchor count K for Guided IG.
    #[arg(long, default_value_t = 0)]
    pub anchors: usize,
    /// Output class to attribute.
    #[arg(long, default_value_t = 0)]
    pub class: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Softmax)]
    pub mode: ModeArg,
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Feature bounds `MIN,MAX` for baselines and random points.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub bounds: String,
}

#[derive(Debug, Args)]
pub struct AttributeArgs {
    #[command(flatten)]
    pub path: PathArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Gig)]
    pub method: MethodArg,
    /// Input features: PGM/PPM image or CSV of numbers.
    #[arg(long)]
    pub input: PathBuf,
    /// black, white, black+white or random:N.
    #[arg(long, default_value = "black")]
    pub baseline: String,
    /// Use the input itself as the baseline (all attributions zero).
    #[arg(long)]
    pub baseline_equal_input: bool,
    /// SmoothGrad sample count; 0 disables SmoothGrad.
    #[arg(long, default_value_t = 0)]
    pub smooth_samples: usize,
    /// SmoothGrad noise standard deviation.
    #[arg(long, default_value_t = 0.15)]
    pub sigma: f64,
    /// Attribution CSV; the JSON sidecar goes next to it with a .json extension.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional grayscale heatmap (PGM).
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
    /// Heatmap normalization: absmax or percentile[:Q].
    #[arg(long, default_value = "percentile:99")]
    pub normalization: String,
    /// Optional JSON-lines path trace (path methods only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClosedPathArgs {
    #[command(flatten)]
    pub path: PathArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Gig)]
    pub method: MethodArg,
    /// Random loops per input.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Number of seeded synthetic inputs, uniform in the bounds.
    #[arg(long, default_value_t = 20)]
    pub inputs: usize,
    /// Report JSON; printed to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AucArgs {
    /// Attribution CSV (`index,attribution`).
    #[arg(long)]
    pub attribution: PathBuf,
    /// Ground-truth mask PGM (thresholded at 128).
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnosticsArgs {
    /// JSON-lines trace written by `attribute --trace`.
    #[arg(long)]
    pub trace: PathBuf,
    /// Diagnostics JSON; printed to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the straight-line directional profile CSV; needs --model and --input.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "black")]
    pub baseline: String,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub class: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Softmax)]
    pub mode: ModeArg,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub bounds: String,
}

#[derive(Debug, Args)]
pub struct GenFixturesArgs {
    /// Directory to write into (created if missing).
    #[arg(long, default_value = "fixtures")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckGradientsArgs {
    /// Model file, or `builtin:NAME[:SEED]`.
    #[arg(long)]
    pub model: String,
    /// Number of seeded random points.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-4)]
    pub h: f64,
    /// Largest acceptable relative error.
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub class: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Softmax)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub bounds: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let text = e.to_string();
        match e {
            ModelError::NonFinite { .. } => CliError::Numerical(text),
            ModelError::ShapeMismatch { .. } | ModelError::ClassOutOfRange { .. } => CliError::Config(text),
            ModelError::Parse(_)
            | ModelError::DimensionMismatch { .. }
            | ModelError::UnknownActivation(_)
            | ModelError::Invalid(_)
            | ModelError::Io(_) => CliError::Io(text),
        }
    }
}

impl From<AttributionError> for CliError {
    fn from(e: AttributionError) -> Self {
        let text = e.to_string();
        match e {
            AttributionError::Model(m) => m.into(),
            AttributionError::NonFinite { .. } | AttributionError::Stalled { .. } => CliError::Numerical(text),
            AttributionError::ShapeMismatch { .. } | AttributionError::Config(_) | AttributionError::NotAnImage(_) => {
                CliError::Config(text)
            }
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        let text = e.to_string();
        match e {
            EvalError::Attribution(a) => a.into(),
            EvalError::Model(m) => m.into(),
            EvalError::NonFiniteScore(_) => CliError::Numerical(text),
            EvalError::LengthMismatch { .. }
            | EvalError::DegenerateMask { .. }
            | EvalError::EmptyTrace
            | EvalError::MissingGradient(_)
            | EvalError::Config(_) => CliError::Config(text),
        }
    }
}

impl From<ImageError> for CliError {
    fn from(e: ImageError) -> Self {
        let text = e.to_string();
        match e {
            ImageError::ShapeMismatch { .. } => CliError::Config(text),
            ImageError::Model(m) => m.into(),
            _ => CliError::Io(text),
        }
    }
}

/// Runs `gig` with a full argument vector (program name first) and returns
/// the exit code. Errors are reported on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests print to stdout and exit 0
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gig: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Attribute(a) => commands::attribute(a),
        Command::EvalClosedPath(a) => commands::eval_closed_path(a),
        Command::EvalAuc(a) => commands::eval_auc(a),
        Command::Diagnostics(a) => commands::diagnostics(a),
        Command::GenFixtures(a) => commands::gen_fixtures(a),
        Command::CheckGradients(a) => commands::check_gradients(a),
    }
}
