use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::Serialize;

use super::{
    AttributeArgs, AucArgs, CheckGradientsArgs, CliError, ClosedPathArgs, DiagnosticsArgs, GenFixturesArgs, PathArgs,
};
use crate::attribution::{
    attribute as run_attribution, read_attribution_csv, read_trace_jsonl, smoothgrad, write_attribution_csv,
    write_trace_jsonl, BaselineKind, BaselineSpec, GuidedIgConfig, Method, Sidecar, SmoothGradConfig,
};
use crate::diffmodel::{check_gradient, load_model, DifferentiableModel, FeatureVector, Target};
use crate::evaluation::{auc_roc, closed_path_experiment, directional_profile, path_diagnostics, ClosedPathConfig};
use crate::fixtures;
use crate::imageio::{encode, read_image, read_mask, render_heatmap, Normalization};
use crate::rng::{substream, Domain};

/// Writes `bytes` to a temporary sibling of `path`, then renames it over
/// `path`, so readers never see a partial file.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().ok_or_else(|| CliError::Config(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    if let Err(e) = result.and_then(|()| fs::rename(&tmp, path)) {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::Io(format!("{}: {e}", path.display())));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_vec_pretty(value).expect("reports serialize");
    text.push(b'\n');
    text
}

/// Writes a report to `out`, or to standard output.
fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => Ok(io::stdout().write_all(bytes)?),
    }
}

fn parse_bounds(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("--bounds expects MIN,MAX with MIN < MAX, got `{text}`"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Loads a model file or a `builtin:NAME[:SEED]` fixture.
pub(crate) fn load_model_arg(spec: &str) -> Result<Box<dyn DifferentiableModel>, CliError> {
    let Some(rest) = spec.strip_prefix("builtin:") else {
        return Ok(load_model(spec)?);
    };
    let (name, seed) = match rest.split_once(':') {
        Some((name, seed)) => {
            (name, seed.parse::<u64>().map_err(|_| CliError::Config(format!("bad seed in model `{spec}`")))?)
        }
        None => (rest, 0),
    };
    Ok(match name {
        "linear" => Box::new(fixtures::linear_image()),
        "linear2" => Box::new(fixtures::linear_pair()),
        "bilinear" => Box::new(fixtures::bilinear()),
        "symmetric" => Box::new(fixtures::symmetric_sum()),
        "bump" => Box::new(fixtures::smooth_bumps()),
        "offpath" => Box::new(fixtures::off_path_bump()),
        "bump64" => Box::new(fixtures::bump_family(seed)),
        "bumpy" => Box::new(fixtures::bumpy_mlp(seed)),
        "relu" => Box::new(fixtures::relu_mlp()),
        "tied" => Box::new(fixtures::tied_mlp(seed).0),
        other => return Err(CliError::Config(format!("unknown builtin model `{other}`"))),
    })
}

fn parse_numbers(text: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        let parsed: Result<Vec<f64>, _> = tokens.iter().map(|t| t.parse::<f64>()).collect();
        match parsed {
            Ok(v) => values.extend(v),
            // a leading non-numeric line is a header
            Err(_) if lineno == 0 => {}
            Err(_) => return Err(CliError::Io(format!("line {}: expected numbers", lineno + 1))),
        }
    }
    Ok(values)
}

/// Reads a PGM/PPM image or a CSV of numbers as the model input.
pub(crate) fn load_input(path: &Path, model: &dyn DifferentiableModel) -> Result<FeatureVector, CliError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let features = if matches!(ext.as_str(), "pgm" | "ppm" | "pnm") {
        read_image(path)?.to_features()
    } else {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let values = parse_numbers(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if values.len() == model.input_len() {
            FeatureVector::new(values, model.input_shape())?
        } else {
            FeatureVector::flat(values)?
        }
    };
    if features.len() != model.input_len() {
        return Err(CliError::Config(format!(
            "input has {} features but the model expects {}",
            features.len(),
            model.input_len()
        )));
    }
    Ok(features)
}

fn path_config(p: &PathArgs, baseline: BaselineSpec, trace: bool) -> Result<GuidedIgConfig, CliError> {
    let config = GuidedIgConfig {
        steps: p.steps,
        fraction: p.fraction,
        anchors: p.anchors,
        baseline,
        target: Target::new(p.class, p.mode.into()),
        trace,
    };
    config.validate()?;
    Ok(config)
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

pub fn attribute(a: &AttributeArgs) -> Result<(), CliError> {
    let (min, max) = parse_bounds(&a.path.bounds)?;
    let normalization: Normalization = a.normalization.parse().map_err(CliError::Config)?;
    let method: Method = a.method.into();
    if a.trace.is_some() && (!method.is_path_method() || a.smooth_samples > 0) {
        return Err(CliError::Config("--trace needs --method ig or gig without SmoothGrad".into()));
    }
    let baseline = if a.baseline_equal_input {
        BaselineSpec::new(BaselineKind::EqualInput)
    } else {
        BaselineSpec::parse(&a.baseline, a.path.seed)?
    }
    .with_bounds(min, max);
    let config = path_config(&a.path, baseline, a.trace.is_some())?;
    let model = load_model_arg(&a.path.model)?;
    let input = load_input(&a.input, model.as_ref())?;

    let map = if a.smooth_samples > 0 {
        let smooth = SmoothGradConfig { samples: a.smooth_samples, sigma: a.sigma, seed: a.path.seed };
        smoothgrad(model.as_ref(), &input, method, &config, &smooth)?
    } else {
        run_attribution(model.as_ref(), &input, method, &config)?
    };
    if let Some(i) = map.attributions.iter().position(|v| !v.is_finite()) {
        return Err(CliError::Numerical(format!("attribution {i} is not finite")));
    }

    let mut csv = Vec::new();
    write_attribution_csv(&map, &mut csv)?;
    write_atomic(&a.out, &csv)?;
    write_atomic(&sidecar_path(&a.out), &to_json(&Sidecar::from(&map)))?;
    if let Some(path) = &a.heatmap {
        write_atomic(path, &encode(&render_heatmap(&map.attributions, map.shape, normalization)?))?;
    }
    if let (Some(path), Some(trace)) = (&a.trace, &map.trace) {
        let mut lines = Vec::new();
        write_trace_jsonl(trace, &mut lines)?;
        write_atomic(path, &lines)?;
    }
    Ok(())
}

pub fn eval_closed_path(a: &ClosedPathArgs) -> Result<(), CliError> {
    let (min, max) = parse_bounds(&a.path.bounds)?;
    let method: Method = a.method.into();
    if !method.is_path_method() {
        return Err(CliError::Config("--method must be ig or gig for the closed-path check".into()));
    }
    let path = path_config(&a.path, BaselineSpec::default(), false)?;
    let model = load_model_arg(&a.path.model)?;
    let n = model.input_len();
    let inputs = (0..a.inputs as u64)
        .map(|i| {
            let values = fixtures::uniform_point(n, a.path.seed, i, min, max).into_values();
            FeatureVector::new(values, model.input_shape())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let config = ClosedPathConfig { trials: a.trials, seed: a.path.seed, min, max, path };
    let report = closed_path_experiment(model.as_ref(), method, &inputs, &config)?;
    emit(a.out.as_ref(), &to_json(&report))
}

pub fn eval_auc(a: &AucArgs) -> Result<(), CliError> {
    let file = fs::File::open(&a.attribution).map_err(|e| CliError::Io(format!("{}: {e}", a.attribution.display())))?;
    let values = read_attribution_csv(file).map_err(|e| CliError::Io(format!("{}: {e}", a.attribution.display())))?;
    let mask = read_mask(&a.mask)?;
    let pixels = mask.labels.len();
    if values.is_empty() || values.len() % pixels != 0 {
        return Err(CliError::Config(format!("{} attributions do not cover {pixels} mask pixels", values.len())));
    }
    let scores: Vec<f64> = values.chunks(values.len() / pixels).map(|c| c.iter().sum()).collect();
    let result = auc_roc(&scores, &mask.labels)?;
    emit(a.out.as_ref(), &to_json(&result))
}

#[derive(Serialize)]
struct ProfileRow {
    alpha: f64,
    delta: f64,
    grad_norm: f64,
}

pub fn diagnostics(a: &DiagnosticsArgs) -> Result<(), CliError> {
    let file = fs::File::open(&a.trace).map_err(|e| CliError::Io(format!("{}: {e}", a.trace.display())))?;
    let trace =
        read_trace_jsonl(BufReader::new(file)).map_err(|e| CliError::Io(format!("{}: {e}", a.trace.display())))?;
    let report = path_diagnostics(&trace)?;
    if let Some(profile_path) = &a.profile {
        let (Some(model), Some(input)) = (&a.model, &a.input) else {
            return Err(CliError::Config("--profile needs --model and --input".into()));
        };
        let (min, max) = parse_bounds(&a.bounds)?;
        let model = load_model_arg(model)?;
        let input = load_input(input, model.as_ref())?;
        let baseline = BaselineSpec::parse(&a.baseline, 0)?.with_bounds(min, max).resolve(&input)?;
        let target = Target::new(a.class, a.mode.into());
        let profile = directional_profile(model.as_ref(), &input, &baseline[0], a.steps, target)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        for i in 0..profile.alphas.len() {
            w.serialize(ProfileRow {
                alpha: profile.alphas[i],
                delta: profile.delta[i],
                grad_norm: profile.grad_norm[i],
            })
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        write_atomic(profile_path, &bytes)?;
    }
    emit(a.out.as_ref(), &to_json(&report))
}

pub fn gen_fixtures(a: &GenFixturesArgs) -> Result<(), CliError> {
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", a.out_dir.display())))?;
    for (name, bytes) in fixtures::bundle() {
        write_atomic(&a.out_dir.join(name), &bytes)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GradientReport {
    points: usize,
    h: f64,
    tolerance: f64,
    max_relative_error: f64,
    worst_point: usize,
    passed: bool,
}

pub fn check_gradients(a: &CheckGradientsArgs) -> Result<(), CliError> {
    let (min, max) = parse_bounds(&a.bounds)?;
    if a.h.is_nan() || a.h <= 0.0 {
        return Err(CliError::Config(format!("--h must be positive, got {}", a.h)));
    }
    let model = load_model_arg(&a.model)?;
    let target = Target::new(a.class, a.mode.into());
    let mut worst = (0.0f64, 0usize);
    for i in 0..a.points {
        let mut rng = substream(a.seed, Domain::GradientCheck, i as u64);
        let values = (0..model.input_len()).map(|_| rng.random_range(min..max)).collect();
        let x = FeatureVector::new(values, model.input_shape())?;
        let err = check_gradient(model.as_ref(), &x, target, a.h)?;
        if err > worst.0 || err.is_nan() {
            worst = (err, i);
        }
    }
    let report = GradientReport {
        points: a.points,
        h: a.h,
        tolerance: a.tolerance,
        max_relative_error: worst.0,
        worst_point: worst.1,
        passed: worst.0 < a.tolerance,
    };
    emit(a.out.as_ref(), &to_json(&report))?;
    if !report.passed {
        return Err(CliError::Numerical(format!(
            "relative gradient error {:.3e} at point {} exceeds {:.1e}",
            worst.0, worst.1, a.tolerance
        )));
    }
    Ok(())
}
