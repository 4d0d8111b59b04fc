use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AttributionError;
use crate::diffmodel::FeatureVector;
use crate::rng::{substream, Domain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    /// Every feature at the lower bound.
    Black,
    /// Every feature at the upper bound.
    White,
    /// Average over the black and the white baseline.
    BlackWhite,
    /// Average over `count` baselines drawn uniformly inside the bounds.
    Random { count: usize, seed: u64 },
    /// The input itself; every path method then returns zeros.
    EqualInput,
}

/// Which baselines to use and the feature-space box they live in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub kind: BaselineKind,
    pub min: f64,
    pub max: f64,
}

impl Default for BaselineSpec {
    fn default() -> Self {
        BaselineSpec::new(BaselineKind::Black)
    }
}

impl BaselineSpec {
    /// Baselines in the default `[0, 1]` feature box.
    pub fn new(kind: BaselineKind) -> Self {
        BaselineSpec { kind, min: 0.0, max: 1.0 }
    }

    pub fn with_bounds(mut self, min: f64, max: f64) -> Self {
        self.min = min;
        self.max = max;
        self
    }

    /// Parses `black`, `white`, `black+white`, `input` or `random:N`.
    pub fn parse(text: &str, seed: u64) -> Result<Self, AttributionError> {
        let kind = match text {
            "black" => BaselineKind::Black,
            "white" => BaselineKind::White,
            "black+white" => BaselineKind::BlackWhite,
            "input" => BaselineKind::EqualInput,
            other => match other.strip_prefix("random:").map(str::parse::<usize>) {
                Some(Ok(count)) => BaselineKind::Random { count, seed },
                _ => return Err(AttributionError::Config(format!("unknown baseline `{other}`"))),
            },
        };
        let spec = BaselineSpec::new(kind);
        spec.validate()?;
        Ok(spec)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            BaselineKind::Black => "black".into(),
            BaselineKind::White => "white".into(),
            BaselineKind::BlackWhite => "black+white".into(),
            BaselineKind::Random { count, seed } => format!("random:{count}:seed={seed}"),
            BaselineKind::EqualInput => "input".into(),
        }
    }

    pub fn validate(&self) -> Result<(), AttributionError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(AttributionError::Config(format!("invalid feature bounds [{}, {}]", self.min, self.max)));
        }
        if let BaselineKind::Random { count: 0, .. } = self.kind {
            return Err(AttributionError::Config("random baseline count must be at least 1".into()));
        }
        Ok(())
    }

    /// The concrete baselines for `input`, in averaging order.
    pub fn resolve(&self, input: &FeatureVector) -> Result<Vec<FeatureVector>, AttributionError> {
        self.validate()?;
        let shape = input.shape();
        let filled = |v: f64| FeatureVector::filled(shape, v);
        Ok(match &self.kind {
            BaselineKind::Black => vec![filled(self.min)?],
            BaselineKind::White => vec![filled(self.max)?],
            BaselineKind::BlackWhite => vec![filled(self.min)?, filled(self.max)?],
            BaselineKind::EqualInput => vec![input.clone()],
            BaselineKind::Random { count, seed } => (0..*count)
                .map(|k| {
                    let mut rng = substream(*seed, Domain::RandomBaseline, k as u64);
                    let values =
                        (0..shape.len()).map(|_| self.min + (self.max - self.min) * rng.random::<f64>()).collect();
                    input.with_values(values)
                })
                .collect::<Result<_, _>>()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_resolve() {
        let x = FeatureVector::flat(vec![0.2, 0.4, 0.6]).unwrap();
        let b = BaselineSpec::parse("black", 0).unwrap().resolve(&x).unwrap();
        assert_eq!(b[0].values(), &[0.0, 0.0, 0.0]);
        let bw = BaselineSpec::parse("black+white", 0).unwrap().with_bounds(-1.0, 2.0).resolve(&x).unwrap();
        assert_eq!(bw.len(), 2);
        assert_eq!(bw[1].values(), &[2.0, 2.0, 2.0]);
        let r1 = BaselineSpec::parse("random:2", 7).unwrap().resolve(&x).unwrap();
        let r2 = BaselineSpec::parse("random:2", 7).unwrap().resolve(&x).unwrap();
        assert_eq!(r1, r2);
        assert_ne!(r1[0], r1[1]);
        assert!(r1.iter().flat_map(|b| b.values()).all(|v| (0.0..1.0).contains(v)));
        assert!(BaselineSpec::parse("grey", 0).is_err());
        assert!(BaselineSpec::parse("random:0", 0).is_err());
        assert!(BaselineSpec::parse("random:x", 0).is_err());
    }
}
