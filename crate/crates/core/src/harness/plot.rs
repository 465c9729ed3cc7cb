//! Columnar plot data: fitted curves on a grid next to the observed points.

use std::collections::BTreeMap;

use crate::curve::{apply_cutoff, split_for_extrapolation, CurveSplit, LearningCurve};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_task, excess_risk_series, TieTolerance};
use crate::fitting::FitConfig;
use crate::models::{ModelKind, ModelParams};

/// `points` values of `x`, geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi / lo).ln() / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { hi } else { lo * (step * i as f64).exp() })
                .collect()
        }
    }
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: "<csv>".to_string(),
        message: e.to_string(),
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_error)?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn prediction_cell(params: &ModelParams, x: f64) -> String {
    params.predict(x).map(|v| v.to_string()).unwrap_or_default()
}

/// CSV with columns `x, source, observed, holdout` and one prediction column
/// per model. `source` is `grid`, `train` or `holdout`; the grid runs from
/// the smallest train `x` to the largest holdout `x`. `holdout` is `true`
/// exactly for observed points beyond `tau` and empty on grid rows.
pub fn emit_plot_data(split: &CurveSplit, fits: &BTreeMap<ModelKind, ModelParams>, grid_points: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["x".to_string(), "source".into(), "observed".into(), "holdout".into()];
    header.extend(fits.keys().map(|m| m.to_string()));
    w.write_record(&header).map_err(csv_error)?;

    let grid = geometric_grid(split.train.x_min(), split.holdout.x_max(), grid_points);
    let rows = grid
        .iter()
        .map(|&x| (x, "grid", None))
        .chain(split.train.points().iter().map(|p| (p.x, "train", Some(p.eps))))
        .chain(split.holdout.points().iter().map(|p| (p.x, "holdout", Some(p.eps))));
    for (x, source, observed) in rows {
        let mut rec = vec![
            x.to_string(),
            source.to_string(),
            observed.map(|v| v.to_string()).unwrap_or_default(),
            observed.map(|_| (x > split.tau).to_string()).unwrap_or_default(),
        ];
        rec.extend(fits.values().map(|p| prediction_cell(p, x)));
        w.write_record(&rec).map_err(csv_error)?;
    }
    finish(w)
}

/// Excess-risk panels over several fitting cutoffs, in long form with
/// columns `cutoff, series, x, excess, used_in_fit`.
///
/// Every panel fits `models` on the train side of the usual split, keeping
/// only train points with `x >= cutoff`. The `observed` series is
/// `eps - bayes_risk` at every point of the curve; each model series is its
/// predicted excess over the same ground truth on `grid_points` grid values.
/// Predicted losses at or below `bayes_risk` have no excess and are omitted.
pub fn emit_excess_panels(
    curve: &LearningCurve,
    bayes_risk: f64,
    cutoffs: &[f64],
    cfg: &FitConfig,
    models: &[ModelKind],
    grid_points: usize,
) -> Result<String> {
    let split = split_for_extrapolation(curve)?;
    let observed = excess_risk_series(curve, bayes_risk)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["cutoff", "series", "x", "excess", "used_in_fit"]).map_err(csv_error)?;
    for &cutoff in cutoffs {
        let train = apply_cutoff(&split.train, cutoff)?;
        let panel = CurveSplit {
            train,
            holdout: split.holdout.clone(),
            tau: split.tau,
        };
        for &(x, excess) in &observed {
            let used = x >= cutoff && x <= split.tau;
            w.write_record([cutoff.to_string(), "observed".into(), x.to_string(), excess.to_string(), used.to_string()])
                .map_err(csv_error)?;
        }
        let report = evaluate_task(&panel, cfg, models, &TieTolerance::default());
        let grid = geometric_grid(curve.x_min(), curve.x_max(), grid_points);
        for (m, params) in &report.params_by_model {
            for &x in &grid {
                let Ok(pred) = params.predict(x) else { continue };
                if pred > bayes_risk {
                    w.write_record([cutoff.to_string(), m.to_string(), x.to_string(), (pred - bayes_risk).to_string(), String::new()])
                        .map_err(csv_error)?;
                }
            }
        }
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::fit_m2;
    use crate::models::{predict_m2, M2Params};

    fn read(csv_text: &str) -> Vec<csv::StringRecord> {
        csv::Reader::from_reader(csv_text.as_bytes()).records().map(|r| r.unwrap()).collect()
    }

    #[test]
    fn grid_endpoints() {
        let g = geometric_grid(2.0, 200.0, 3);
        assert_eq!(g.first(), Some(&2.0));
        assert_eq!(g.last(), Some(&200.0));
        assert!((g[1] - 20.0).abs() < 1e-12);
    }

    #[test]
    fn m2_fit_reproduces_the_generating_curve() {
        let p = M2Params { eps_inf: 0.2, beta: 1.0, c: -0.5 };
        let pts = (0..11).map(|k| 2f64.powi(k)).map(|x| (x, predict_m2(&p, x))).collect();
        let curve = LearningCurve::new(pts, 2.0, "m2", "loss").unwrap();
        let split = split_for_extrapolation(&curve).unwrap();
        let fitted = fit_m2(&split.train, &FitConfig::default()).unwrap().params;
        let fits = BTreeMap::from([(ModelKind::M2, fitted.clone())]);
        let text = emit_plot_data(&split, &fits, 25).unwrap();
        let rows = read(&text);
        assert_eq!(rows.len(), 25 + 11);
        for r in rows.iter().filter(|r| &r[1] == "grid") {
            let x: f64 = r[0].parse().unwrap();
            let pred: f64 = r[4].parse().unwrap();
            assert_eq!(pred, fitted.predict(x).unwrap());
            assert!((pred - predict_m2(&p, x)).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn holdout_flag_marks_points_beyond_tau() {
        let curve = LearningCurve::new(vec![(1.0, 0.5), (2.0, 0.4), (3.0, 0.35), (4.0, 0.3)], 1.0, "t", "").unwrap();
        let split = split_for_extrapolation(&curve).unwrap();
        let text = emit_plot_data(&split, &BTreeMap::new(), 4).unwrap();
        let flagged: Vec<(String, String)> = read(&text)
            .iter()
            .filter(|r| &r[1] != "grid")
            .map(|r| (r[0].to_string(), r[3].to_string()))
            .collect();
        let expected = [("1", "false"), ("2", "false"), ("3", "true"), ("4", "true")];
        assert_eq!(flagged, expected.map(|(a, b)| (a.to_string(), b.to_string())));
    }

    #[test]
    fn excess_panels_cover_every_cutoff() {
        let p = M2Params { eps_inf: 0.2, beta: 1.0, c: -0.5 };
        let pts = (0..12).map(|k| 2f64.powi(k)).map(|x| (x, predict_m2(&p, x))).collect();
        let curve = LearningCurve::new(pts, 2.0, "m2", "loss").unwrap();
        let text = emit_excess_panels(&curve, 0.2, &[0.0, 16.0], &FitConfig::default(), &[ModelKind::M2], 10).unwrap();
        let rows = read(&text);
        for cutoff in ["0", "16"] {
            let observed = rows.iter().filter(|r| &r[0] == cutoff && &r[1] == "observed").count();
            let fitted = rows.iter().filter(|r| &r[0] == cutoff && &r[1] == "M2").count();
            assert_eq!(observed, 12);
            assert_eq!(fitted, 10);
        }
        let used = rows.iter().filter(|r| &r[0] == "16" && &r[4] == "true").count();
        assert_eq!(used, 7); // 16 ..= 1024
    }
}
