//! The task interchange format: one JSON document per learning curve.
//!
//! ```json
//! {
//!   "name": "imagenet-10shot",
//!   "domain": "vision",
//!   "metric": "error rate",
//!   "higher_is_better": false,
//!   "loss_random_guess": 0.999,
//!   "points": [[1e6, 0.81], [2e6, 0.74], [4e6, 0.69]]
//! }
//! ```
//!
//! `bayes_risk` is optional. When `higher_is_better` is set the stored values
//! are accuracies and become losses `1 - value` on ingestion;
//! `loss_random_guess` is always in loss units.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::LearningCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub name: String,
    pub domain: String,
    pub metric: String,
    pub higher_is_better: bool,
    pub loss_random_guess: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bayes_risk: Option<f64>,
    pub points: Vec<(f64, f64)>,
}

impl TaskFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&bytes).map_err(|e| match e {
            Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Pretty-printed JSON. Floats use the shortest representation that
    /// parses back to the same value, so nothing is lost.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("task files always serialise")
    }

    /// Validated loss curve, sorted by `x`.
    pub fn to_curve(&self) -> Result<LearningCurve> {
        let mut points: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|&(x, v)| (x, if self.higher_is_better { 1.0 - v } else { v }))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        LearningCurve::new(points, self.loss_random_guess, self.name.clone(), self.metric.clone())
    }

    /// Loss-valued task file holding the points of `curve`.
    pub fn from_curve(curve: &LearningCurve, domain: impl Into<String>, bayes_risk: Option<f64>) -> Self {
        TaskFile {
            name: curve.name().to_string(),
            domain: domain.into(),
            metric: curve.metric().to_string(),
            higher_is_better: false,
            loss_random_guess: curve.eps0(),
            bayes_risk,
            points: curve.points().iter().map(|p| (p.x, p.eps)).collect(),
        }
    }
}

pub fn load_task(path: impl AsRef<Path>) -> Result<LearningCurve> {
    TaskFile::read(path)?.to_curve()
}

pub fn load_task_bytes(bytes: &[u8]) -> Result<LearningCurve> {
    TaskFile::parse(bytes)?.to_curve()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "t", "domain": "d", "metric": "error", "higher_is_better": false,
        "loss_random_guess": 1.0, "points": [[1, 0.5], [2, 0.4], [4, 0.3]]
    }"#;

    #[test]
    fn minimal_document() {
        let c = load_task_bytes(MINIMAL.as_bytes()).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.name(), "t");
        assert_eq!(c.eps0(), 1.0);
    }

    #[test]
    fn accuracy_becomes_error() {
        let doc = MINIMAL
            .replace(r#""higher_is_better": false"#, r#""higher_is_better": true"#)
            .replace("[4, 0.3]", "[4, 0.9]");
        let c = load_task_bytes(doc.as_bytes()).unwrap();
        let last = c.points()[2];
        assert!((last.eps - 0.1).abs() < 1e-15);
        assert_eq!(c.eps0(), 1.0);
    }

    #[test]
    fn unsorted_points_are_sorted() {
        let doc = MINIMAL.replace("[[1, 0.5], [2, 0.4], [4, 0.3]]", "[[4, 0.3], [1, 0.5], [2, 0.4]]");
        let c = load_task_bytes(doc.as_bytes()).unwrap();
        assert_eq!(c.xs().collect::<Vec<_>>(), vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn distinct_diagnostics() {
        let at_guess = MINIMAL.replace("[4, 0.3]", "[4, 1.0]");
        assert!(matches!(load_task_bytes(at_guess.as_bytes()), Err(Error::LossOutOfRange { .. })));

        let zero_x = MINIMAL.replace("[1, 0.5]", "[0, 0.5]");
        assert!(matches!(load_task_bytes(zero_x.as_bytes()), Err(Error::NonPositiveX { .. })));

        let dup = MINIMAL.replace("[2, 0.4]", "[1, 0.4]");
        assert!(matches!(load_task_bytes(dup.as_bytes()), Err(Error::DuplicateX { .. })));

        let missing = MINIMAL.replace(r#""metric": "error","#, "");
        assert!(matches!(load_task_bytes(missing.as_bytes()), Err(Error::Schema(_))));

        let extra = MINIMAL.replace(r#""domain": "d","#, r#""domain": "d", "colour": 1,"#);
        assert!(matches!(load_task_bytes(extra.as_bytes()), Err(Error::Schema(_))));

        assert!(matches!(load_task("/nonexistent/task.json"), Err(Error::Io { .. })));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = TaskFile {
            name: "x".into(),
            domain: "d".into(),
            metric: "m".into(),
            higher_is_better: true,
            loss_random_guess: 0.75,
            bayes_risk: Some(0.1 + 0.2),
            points: vec![(1.0 / 3.0, 0.123456789012345678), (1e9, 2.0f64.sqrt() / 3.0)],
        };
        assert_eq!(TaskFile::parse(t.to_json().as_bytes()).unwrap(), t);
    }

    #[test]
    fn curve_round_trip() {
        let t = TaskFile::parse(MINIMAL.as_bytes()).unwrap();
        let back = TaskFile::from_curve(&t.to_curve().unwrap(), "d", None);
        assert_eq!(back, t);
    }
}
