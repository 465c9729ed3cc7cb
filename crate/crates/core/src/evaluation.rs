//! Extrapolation error, per-task comparison and ranking across tasks.
//!
//! A scaling law is judged by how well it predicts the held-out large-`x`
//! side of a curve, measured as RMSE between log predicted and log actual
//! loss. Several estimators can tie on a task; all of them count as best.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::curve::{CurveSplit, LearningCurve};
use crate::error::{Error, Result};
use crate::fitting::{fit, fit_m2_fixed_exponent, FitConfig};
use crate::models::{ModelKind, ModelParams};

/// Two RMSEs tie when `|a - b| <= max(abs, rel * min(a, b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TieTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for TieTolerance {
    fn default() -> Self {
        TieTolerance { abs: 1e-4, rel: 0.05 }
    }
}

impl TieTolerance {
    pub fn ties(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        (a - b).abs() <= self.abs.max(self.rel * a.min(b))
    }
}

/// `sqrt(mean((log predicted - log actual)^2))`.
pub fn extrapolation_rmse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch(predicted.len(), actual.len()));
    }
    if predicted.is_empty() {
        return Err(Error::TooFewPoints { required: 1, got: 0 });
    }
    let mut acc = 0.0;
    for (&p, &a) in predicted.iter().zip(actual) {
        if !(p > 0.0 && a > 0.0 && p.is_finite() && a.is_finite()) {
            return Err(Error::InvalidParam {
                name: "loss",
                value: if p > 0.0 && p.is_finite() { a } else { p },
                reason: "RMSE needs finite positive values",
            });
        }
        acc += (p.ln() - a.ln()).powi(2);
    }
    Ok((acc / predicted.len() as f64).sqrt())
}

/// Extrapolation RMSE of `params` on the points of `holdout`.
pub fn holdout_rmse(params: &ModelParams, holdout: &LearningCurve) -> Result<f64> {
    let predicted = holdout
        .xs()
        .map(|x| params.predict(x))
        .collect::<Result<Vec<_>>>()?;
    let actual: Vec<f64> = holdout.losses().collect();
    extrapolation_rmse(&predicted, &actual)
}

/// Outcome of fitting every requested model on one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationReport {
    pub task: String,
    /// Failed fits are stored as `+inf` (serialised as `null`).
    #[serde(with = "finite_or_null")]
    pub rmse_by_model: BTreeMap<ModelKind, f64>,
    pub winners: BTreeSet<ModelKind>,
    pub fitted_exponent_by_model: BTreeMap<ModelKind, f64>,
    pub params_by_model: BTreeMap<ModelKind, ModelParams>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<ModelKind, String>,
}

impl ExtrapolationReport {
    /// Builds a report from per-model RMSEs, marking winners under `tie`.
    pub fn from_rmse(task: impl Into<String>, rmse_by_model: BTreeMap<ModelKind, f64>, tie: &TieTolerance) -> Self {
        let winners = winners(&rmse_by_model, tie);
        ExtrapolationReport {
            task: task.into(),
            rmse_by_model,
            winners,
            fitted_exponent_by_model: BTreeMap::new(),
            params_by_model: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
        }
    }
}

/// Models whose RMSE ties the smallest one.
pub fn winners(rmse_by_model: &BTreeMap<ModelKind, f64>, tie: &TieTolerance) -> BTreeSet<ModelKind> {
    let best = rmse_by_model.values().copied().fold(f64::INFINITY, f64::min);
    rmse_by_model
        .iter()
        .filter(|(_, &r)| r == best || tie.ties(r, best))
        .map(|(&m, _)| m)
        .collect()
}

/// Fits each model on `split.train` and scores it on `split.holdout`.
///
/// A model that cannot be fitted (or whose predictions are invalid) gets an
/// infinite RMSE and a diagnostic; it never aborts the task.
pub fn evaluate_task(split: &CurveSplit, cfg: &FitConfig, models: &[ModelKind], tie: &TieTolerance) -> ExtrapolationReport {
    let mut rmse_by_model = BTreeMap::new();
    let mut fitted_exponent_by_model = BTreeMap::new();
    let mut params_by_model = BTreeMap::new();
    let mut diagnostics = BTreeMap::new();

    for &kind in models {
        let scored = fit(kind, &split.train, cfg)
            .and_then(|r| holdout_rmse(&r.params, &split.holdout).map(|rmse| (r, rmse)));
        match scored {
            Ok((r, rmse)) => {
                rmse_by_model.insert(kind, rmse);
                fitted_exponent_by_model.insert(kind, r.params.scaling_exponent());
                params_by_model.insert(kind, r.params);
            }
            Err(e) => {
                log::warn!("{}: {kind} failed: {e}", split.train.name());
                rmse_by_model.insert(kind, f64::INFINITY);
                diagnostics.insert(kind, e.to_string());
            }
        }
    }

    ExtrapolationReport {
        task: split.train.name().to_string(),
        winners: winners(&rmse_by_model, tie),
        rmse_by_model,
        fitted_exponent_by_model,
        params_by_model,
        diagnostics,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    /// Fraction of tasks on which each model is among the winners. Ties
    /// count for every tied model, so the fractions can sum to more than one.
    pub best_fraction_by_model: BTreeMap<ModelKind, f64>,
    pub tasks: usize,
}

pub fn rank_methods(reports: &[ExtrapolationReport]) -> RankSummary {
    let mut wins: BTreeMap<ModelKind, usize> = BTreeMap::new();
    for r in reports {
        for &m in r.rmse_by_model.keys() {
            wins.entry(m).or_insert(0);
        }
        for &m in &r.winners {
            *wins.entry(m).or_insert(0) += 1;
        }
    }
    let n = reports.len().max(1) as f64;
    RankSummary {
        best_fraction_by_model: wins.into_iter().map(|(m, w)| (m, w as f64 / n)).collect(),
        tasks: reports.len(),
    }
}

/// `(x, eps - eps_inf)` pairs, for log-log plots where a power law is a line.
pub fn excess_risk_series(curve: &LearningCurve, eps_inf: f64) -> Result<Vec<(f64, f64)>> {
    curve
        .points()
        .iter()
        .map(|p| {
            let excess = p.eps - eps_inf;
            if excess > 0.0 {
                Ok((p.x, excess))
            } else {
                Err(Error::EpsInfTooLarge {
                    eps_inf,
                    min_eps: curve.min_loss(),
                })
            }
        })
        .collect()
}

/// One exponent in an [`exponent_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c: f64,
    /// Square-log loss on the train side (interpolation error).
    pub train_loss: f64,
    /// RMSE on the holdout side (extrapolation error).
    pub holdout_rmse: f64,
}

/// For each exponent `c`, refits M2's `(beta, eps_inf)` on the train side
/// with `c` held fixed and records both the fit loss and the holdout RMSE.
pub fn exponent_sweep(split: &CurveSplit, exponents: &[f64], cfg: &FitConfig) -> Result<Vec<SweepPoint>> {
    exponents
        .iter()
        .map(|&c| {
            let r = fit_m2_fixed_exponent(&split.train, c, cfg)?;
            Ok(SweepPoint {
                c,
                train_loss: r.train_loss,
                holdout_rmse: holdout_rmse(&r.params, &split.holdout)?,
            })
        })
        .collect()
}

mod finite_or_null {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::models::ModelKind;

    pub fn serialize<S: Serializer>(map: &BTreeMap<ModelKind, f64>, s: S) -> Result<S::Ok, S::Error> {
        let opt: BTreeMap<ModelKind, Option<f64>> =
            map.iter().map(|(&k, &v)| (k, v.is_finite().then_some(v))).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<ModelKind, f64>, D::Error> {
        let opt = BTreeMap::<ModelKind, Option<f64>>::deserialize(d)?;
        Ok(opt.into_iter().map(|(k, v)| (k, v.unwrap_or(f64::INFINITY))).collect())
    }
}
