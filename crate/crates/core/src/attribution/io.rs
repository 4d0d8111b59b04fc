//! Attribution CSV, JSON sidecar and JSON-lines trace formats.

use std::io::{self, BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use super::trace::{PathTrace, TraceStep};
use super::{AttributionMap, ConfigSnapshot};
use crate::diffmodel::Shape;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    index: usize,
    attribution: f64,
}

/// Writes `index,attribution` rows.
pub fn write_attribution_csv(map: &AttributionMap, out: impl Write) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (index, &attribution) in map.attributions.iter().enumerate() {
        w.serialize(Row { index, attribution })?;
    }
    w.flush()
}

/// Reads an `index,attribution` CSV; indices must run `0, 1, 2, ...`.
pub fn read_attribution_csv(input: impl Read) -> io::Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let mut values = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row?;
        if row.index != values.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("expected index {} in attribution CSV, found {}", values.len(), row.index),
            ));
        }
        values.push(row.attribution);
    }
    Ok(values)
}

/// Metadata written next to an attribution CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub method: String,
    pub config: ConfigSnapshot,
    pub completeness_residual: Option<f64>,
    #[serde(rename = "F_input")]
    pub f_input: Option<f64>,
    #[serde(rename = "F_baseline")]
    pub f_baseline: Option<f64>,
    pub shape: Shape,
}

impl From<&AttributionMap> for Sidecar {
    fn from(map: &AttributionMap) -> Self {
        Sidecar {
            method: map.method.clone(),
            config: map.config.clone(),
            completeness_residual: map.completeness_residual,
            f_input: map.f_input,
            f_baseline: map.f_baseline,
            shape: map.shape,
        }
    }
}

/// One line of a trace file: progress summary followed by the step vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: usize,
    pub alpha_equivalent: f64,
    pub x_l1_remaining: f64,
    pub selected_count: usize,
    pub step_attr_sum: f64,
    pub point: Vec<f64>,
    pub gradient: Vec<f64>,
    pub delta: Vec<f64>,
    pub increment: Vec<f64>,
}

impl From<&TraceStep> for TraceRecord {
    fn from(s: &TraceStep) -> Self {
        TraceRecord {
            t: s.t,
            alpha_equivalent: s.alpha_equivalent,
            x_l1_remaining: s.x_l1_remaining,
            selected_count: s.selected_count,
            step_attr_sum: s.attribution_sum(),
            point: s.point.clone(),
            gradient: s.gradient.clone(),
            delta: s.delta.clone(),
            increment: s.increment.clone(),
        }
    }
}

pub fn write_trace_jsonl(trace: &PathTrace, mut out: impl Write) -> io::Result<()> {
    for step in &trace.steps {
        serde_json::to_writer(&mut out, &TraceRecord::from(step))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Rebuilds a trace from JSON lines. The path end is the last point plus
/// its displacement.
pub fn read_trace_jsonl(input: impl BufRead) -> io::Result<PathTrace> {
    let mut steps = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: TraceRecord = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("trace line {}: {e}", lineno + 1)))?;
        steps.push(TraceStep {
            t: r.t,
            point: r.point,
            gradient: r.gradient,
            delta: r.delta,
            increment: r.increment,
            selected_count: r.selected_count,
            selected: Vec::new(),
            step_scale: None,
            clamped: false,
            zeroed_sentinels: Vec::new(),
            alpha_equivalent: r.alpha_equivalent,
            x_l1_remaining: r.x_l1_remaining,
        });
    }
    let (start, end) = match (steps.first(), steps.last()) {
        (Some(first), Some(last)) => {
            (first.point.clone(), last.point.iter().zip(&last.delta).map(|(p, d)| p + d).collect())
        }
        _ => (Vec::new(), Vec::new()),
    };
    Ok(PathTrace { start, end, steps })
}
