//! Runs the extrapolation protocol over a collection of task files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{apply_cutoff, split_for_extrapolation, truncate_at_peak, CurveSplit, LearningCurve};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_task, rank_methods, ExtrapolationReport, RankSummary, TieTolerance};
use crate::fitting::FitConfig;
use crate::harness::task::load_task;
use crate::models::ModelKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub fit: FitConfig,
    pub models: Vec<ModelKind>,
    pub tie: TieTolerance,
    /// Cut each curve at its lowest loss before splitting.
    pub truncate_at_peak: bool,
    /// Drop train points with `x` below this value; `None` keeps them all.
    pub cutoff: Option<f64>,
    /// Recorded with the run. Fitting itself uses no randomness.
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            fit: FitConfig::default(),
            models: ModelKind::MAIN.to_vec(),
            tie: TieTolerance::default(),
            truncate_at_peak: false,
            cutoff: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedTask {
    pub source: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRun {
    /// Sorted by task name.
    pub reports: Vec<ExtrapolationReport>,
    pub summary: RankSummary,
    pub config: BenchmarkConfig,
    pub seed: u64,
    /// Sorted by source.
    pub skipped: Vec<SkippedTask>,
}

/// Truncation, split at `x_max / 2`, then the cutoff on the train side.
pub fn prepare_split(curve: &LearningCurve, cfg: &BenchmarkConfig) -> Result<CurveSplit> {
    let curve = if cfg.truncate_at_peak {
        truncate_at_peak(curve)
    } else {
        curve.clone()
    };
    let mut split = split_for_extrapolation(&curve)?;
    if let Some(tau) = cfg.cutoff {
        split.train = apply_cutoff(&split.train, tau)?;
    }
    Ok(split)
}

/// `*.json` files directly inside `dir`, sorted.
pub fn task_paths(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let io = |e: std::io::Error| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Loads and evaluates every task; unloadable or unsplittable tasks are
/// skipped and listed in the run.
pub fn run_benchmark(paths: &[PathBuf], cfg: &BenchmarkConfig) -> Result<BenchmarkRun> {
    let sources: Vec<(String, Result<LearningCurve>)> = paths
        .par_iter()
        .map(|p| (p.display().to_string(), load_task(p)))
        .collect();
    run_sources(sources, cfg)
}

/// [`run_benchmark`] on curves already in memory; each is identified by its name.
pub fn run_benchmark_curves(curves: &[LearningCurve], cfg: &BenchmarkConfig) -> Result<BenchmarkRun> {
    let sources = curves.iter().map(|c| (c.name().to_string(), Ok(c.clone()))).collect();
    run_sources(sources, cfg)
}

fn run_sources(sources: Vec<(String, Result<LearningCurve>)>, cfg: &BenchmarkConfig) -> Result<BenchmarkRun> {
    cfg.fit.validate()?;
    let outcomes: Vec<(String, Result<ExtrapolationReport>)> = sources
        .into_par_iter()
        .map(|(source, curve)| {
            let report = curve
                .and_then(|c| prepare_split(&c, cfg))
                .map(|split| evaluate_task(&split, &cfg.fit, &cfg.models, &cfg.tie));
            (source, report)
        })
        .collect();

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for (source, outcome) in outcomes {
        match outcome {
            Ok(r) => reports.push((source, r)),
            Err(e) => {
                log::warn!("skipping {source}: {e}");
                skipped.push(SkippedTask {
                    source,
                    reason: e.to_string(),
                });
            }
        }
    }
    if reports.is_empty() {
        return Err(Error::NoTasks);
    }
    reports.sort_by(|a, b| a.1.task.cmp(&b.1.task).then_with(|| a.0.cmp(&b.0)));
    skipped.sort_by(|a, b| a.source.cmp(&b.source));
    let reports: Vec<ExtrapolationReport> = reports.into_iter().map(|(_, r)| r).collect();
    Ok(BenchmarkRun {
        summary: rank_methods(&reports),
        reports,
        config: cfg.clone(),
        seed: cfg.seed,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{predict_m2, M2Params};

    fn m2_curve(name: &str, eps_inf: f64) -> LearningCurve {
        let p = M2Params { eps_inf, beta: 1.0, c: -0.5 };
        let pts = (0..10).map(|k| 2f64.powi(k)).map(|x| (x, predict_m2(&p, x) / 2.0)).collect();
        LearningCurve::new(pts, 1.0, name, "loss").unwrap()
    }

    #[test]
    fn reports_are_sorted_by_name() {
        let curves = [m2_curve("b", 0.1), m2_curve("a", 0.2)];
        let run = run_benchmark_curves(&curves, &BenchmarkConfig::default()).unwrap();
        let names: Vec<&str> = run.reports.iter().map(|r| r.task.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
        assert_eq!(run.summary.tasks, 2);
    }

    #[test]
    fn single_task_fractions_are_zero_or_one() {
        let run = run_benchmark_curves(&[m2_curve("a", 0.1)], &BenchmarkConfig::default()).unwrap();
        for &f in run.summary.best_fraction_by_model.values() {
            assert!(f == 0.0 || f == 1.0);
        }
    }

    #[test]
    fn cutoff_leaving_too_few_points_skips_the_task() {
        let cfg = BenchmarkConfig {
            cutoff: Some(1e9),
            ..BenchmarkConfig::default()
        };
        let curves = [m2_curve("a", 0.1)];
        assert_eq!(run_benchmark_curves(&curves, &cfg), Err(Error::NoTasks));
    }

    #[test]
    fn prepare_split_truncates_then_cuts() {
        let pts = vec![(1.0, 0.5), (2.0, 0.4), (4.0, 0.3), (8.0, 0.2), (16.0, 0.1), (32.0, 0.3)];
        let c = LearningCurve::new(pts, 1.0, "t", "loss").unwrap();
        let cfg = BenchmarkConfig {
            truncate_at_peak: true,
            cutoff: Some(2.0),
            ..BenchmarkConfig::default()
        };
        let s = prepare_split(&c, &cfg).unwrap();
        assert_eq!(s.tau, 8.0);
        assert_eq!(s.train.xs().collect::<Vec<_>>(), vec![2.0, 4.0, 8.0]);
        assert_eq!(s.holdout.xs().collect::<Vec<_>>(), vec![16.0]);
    }
}
