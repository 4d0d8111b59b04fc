use serde::{Deserialize, Serialize};

/// One move along an integration path.
///
/// For Guided IG every inner-loop move is one step, so several steps can
/// share the same outer index `t` and the same gradient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Outer Riemann step, starting at 1.
    pub t: usize,
    /// Position before the move.
    pub point: Vec<f64>,
    /// Gradient used for this move.
    pub gradient: Vec<f64>,
    /// Displacement of the move.
    pub delta: Vec<f64>,
    /// Attribution added to each feature by this move.
    pub increment: Vec<f64>,
    pub selected_count: usize,
    /// Features moved by a Guided IG step (empty for straight-line paths).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub selected: Vec<usize>,
    /// Guided IG convex step size before clamping.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_scale: Option<f64>,
    #[serde(default)]
    pub clamped: bool,
    /// Features whose infinite sentinel was reset to zero before the update.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zeroed_sentinels: Vec<usize>,
    /// Fraction of the total L1 distance covered after the move.
    pub alpha_equivalent: f64,
    /// L1 distance to the path end after the move.
    pub x_l1_remaining: f64,
}

impl TraceStep {
    pub fn attribution_sum(&self) -> f64 {
        self.increment.iter().sum()
    }
}

/// Ordered record of a path from `start` to `end`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathTrace {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub steps: Vec<TraceStep>,
}

impl PathTrace {
    pub fn new(start: &[f64], end: &[f64]) -> Self {
        PathTrace { start: start.to_vec(), end: end.to_vec(), steps: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Visited points: every step's starting point followed by the end.
    pub fn points(&self) -> Vec<&[f64]> {
        self.steps.iter().map(|s| s.point.as_slice()).chain(std::iter::once(self.end.as_slice())).collect()
    }

    pub fn l1_length(&self) -> f64 {
        self.steps.iter().map(|s| s.delta.iter().map(|d| d.abs()).sum::<f64>()).sum()
    }

    pub fn l2_length(&self) -> f64 {
        self.steps.iter().map(|s| s.delta.iter().map(|d| d * d).sum::<f64>().sqrt()).sum()
    }

    /// Summed attribution increments per feature.
    pub fn attributions(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.start.len()];
        for s in &self.steps {
            for (a, v) in total.iter_mut().zip(&s.increment) {
                *a += v;
            }
        }
        total
    }

    /// True when every coordinate moves monotonically from `start` toward
    /// `end` without overshooting.
    pub fn is_monotone(&self) -> bool {
        let n = self.start.len();
        let mut points = self.points().into_iter();
        let mut prev = match points.next() {
            Some(p) => p,
            None => return true,
        };
        for p in points {
            for i in 0..n {
                let (lo, hi) = if self.start[i] <= self.end[i] {
                    (self.start[i], self.end[i])
                } else {
                    (self.end[i], self.start[i])
                };
                let forward = if self.start[i] <= self.end[i] { p[i] >= prev[i] } else { p[i] <= prev[i] };
                if !forward || p[i] < lo || p[i] > hi {
                    return false;
                }
            }
            prev = p;
        }
        true
    }
}
