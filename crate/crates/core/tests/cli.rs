use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use guided_ig::attribution::read_attribution_csv;
use guided_ig::fixtures;
use serde_json::Value;

fn gig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gig")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn csv(file: &str) -> Vec<f64> {
    read_attribution_csv(std::fs::File::open(file).unwrap()).unwrap()
}

fn json(file: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap()
}

fn attribute_linear(out: &str, baseline: &str, extra: &[&str]) -> Output {
    let (model, input) = (fixture("linear.json"), fixture("ones.pgm"));
    let mut args = vec![
        "attribute",
        "--method",
        "gig",
        "--model",
        &model,
        "--input",
        &input,
        "--baseline",
        baseline,
        "--steps",
        "200",
        "--fraction",
        "0.1",
        "--anchors",
        "0",
        "--class",
        "0",
        "--mode",
        "logit",
        "--out",
        out,
    ];
    args.extend_from_slice(extra);
    gig(&args)
}

#[test]
fn linear_image_attributions_are_the_weights() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "a.csv");
    ok(&attribute_linear(&out, "black", &[]));
    let got = csv(&out);
    let weights = fixtures::linear_image().weights().to_vec();
    assert_eq!(got.len(), 16);
    for (g, w) in got.iter().zip(&weights) {
        assert!((g - w).abs() < 1e-9, "{g} vs {w}");
    }
    let sidecar = json(&path(dir.path(), "a.json"));
    assert_eq!(sidecar["method"], "gig(0)");
    assert!(sidecar["completeness_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn equal_input_baseline_gives_zero_attributions() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "a.csv");
    ok(&attribute_linear(&out, "black", &["--baseline-equal-input"]));
    assert!(csv(&out).iter().all(|&a| a == 0.0));
}

#[test]
fn random_baselines_replay_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = path(dir.path(), &format!("r{k}.csv"));
        let heat = path(dir.path(), &format!("r{k}.pgm"));
        ok(&attribute_linear(&out, "random:2", &["--seed", "7", "--heatmap", &heat]));
        runs.push([out.clone(), out.replace(".csv", ".json"), heat].map(|f| std::fs::read(f).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn closed_path_on_linear_is_zero_up_to_rounding() {
    let out =
        gig(&["eval-closed-path", "--model", "builtin:linear2", "--trials", "5", "--inputs", "3", "--mode", "logit"]);
    ok(&out);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["trials"], 15);
    assert!(report["mse"].as_f64().unwrap() < 1e-24);
}

#[test]
fn guided_beats_ig_on_bump_family_closed_paths() {
    let mut mse = Vec::new();
    for method in ["ig", "gig"] {
        let out = gig(&[
            "eval-closed-path",
            "--model",
            "builtin:bump64:0",
            "--method",
            method,
            "--trials",
            "5",
            "--inputs",
            "4",
            "--steps",
            "200",
            "--mode",
            "logit",
            "--seed",
            "0",
        ]);
        ok(&out);
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        mse.push(report["mse"].as_f64().unwrap());
    }
    assert!(mse[1] < mse[0], "gig {} vs ig {}", mse[1], mse[0]);
}

#[test]
fn perfectly_ranked_attribution_has_unit_auc() {
    let dir = tempfile::tempdir().unwrap();
    let attr = path(dir.path(), "attr.csv");
    // The bundled mask marks the right half of a 4x4 image.
    let mut text = String::from("index,attribution\n");
    for i in 0..16 {
        let score = if i % 4 >= 2 { 1.0 + i as f64 } else { -(i as f64) };
        text += &format!("{i},{score}\n");
    }
    std::fs::write(&attr, text).unwrap();
    let report = path(dir.path(), "auc.json");
    ok(&gig(&["eval-auc", "--attribution", &attr, "--mask", &fixture("mask.pgm"), "--out", &report]));
    let auc = json(&report);
    assert_eq!(auc["auc"], 1.0);
    assert_eq!(auc["n_pos"], 8);
    assert_eq!(auc["n_neg"], 8);
}

#[test]
fn trace_feeds_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let (out, trace) = (path(dir.path(), "a.csv"), path(dir.path(), "t.jsonl"));
    let input = dir.path().join("x.csv");
    std::fs::write(&input, "0.9,0.1,0.5,0.3,0.7,0.2,0.8,0.4\n").unwrap();
    let input = input.display().to_string();
    ok(&gig(&[
        "attribute",
        "--model",
        "builtin:bump",
        "--input",
        &input,
        "--mode",
        "logit",
        "--out",
        &out,
        "--trace",
        &trace,
    ]));
    let (diag, profile) = (path(dir.path(), "d.json"), path(dir.path(), "p.csv"));
    ok(&gig(&[
        "diagnostics",
        "--trace",
        &trace,
        "--out",
        &diag,
        "--profile",
        &profile,
        "--model",
        "builtin:bump",
        "--input",
        &input,
        "--steps",
        "50",
        "--mode",
        "logit",
    ]));
    let d = json(&diag);
    assert!(d["noise_loss"].as_f64().unwrap() >= 0.0);
    assert!(d["distance_loss"].as_f64().unwrap() >= 0.0);
    let rows = std::fs::read_to_string(&profile).unwrap();
    assert_eq!(rows.lines().next().unwrap(), "alpha,delta,grad_norm");
    assert_eq!(rows.lines().count(), 51);
}

#[test]
fn gen_fixtures_matches_committed_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = path(dir.path(), "fx");
    ok(&gig(&["gen-fixtures", "--out-dir", &out_dir]));
    for (name, _) in fixtures::bundle() {
        assert_eq!(
            std::fs::read(Path::new(&out_dir).join(name)).unwrap(),
            std::fs::read(fixture(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn check_gradients_passes_on_bundled_models() {
    for model in ["builtin:bumpy", "builtin:bump", "builtin:symmetric", "builtin:bilinear"] {
        ok(&gig(&["check-gradients", "--model", model, "--points", "10"]));
    }
}

#[test]
fn exit_codes_follow_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "a.csv");
    let usage = gig(&["attribute", "--bogus"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("--bogus"));
    let missing = gig(&["attribute", "--model", "builtin:linear"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--input"));
    let bad_value = attribute_linear(&out, "black", &["--fraction", "1.5"]);
    assert_eq!(bad_value.status.code(), Some(2));
    let io =
        gig(&["attribute", "--model", &path(dir.path(), "nope.json"), "--input", &fixture("ones.pgm"), "--out", &out]);
    assert_eq!(io.status.code(), Some(3));
    let numerical = gig(&["check-gradients", "--model", "builtin:bumpy", "--points", "2", "--h", "1e-300"]);
    assert_eq!(numerical.status.code(), Some(4));
}
