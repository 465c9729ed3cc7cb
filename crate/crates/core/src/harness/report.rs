//! Benchmark reports: a Markdown table for reading and JSON for machines.

use std::fmt::Write;

use crate::evaluation::ExtrapolationReport;
use crate::harness::benchmark::BenchmarkRun;
use crate::models::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
}

/// Table cell for one RMSE: two significant digits, or `fail` for a model
/// that could not be fitted.
pub fn format_rmse(rmse: f64) -> String {
    if rmse.is_finite() {
        format!("{rmse:.1e}")
    } else {
        "fail".to_string()
    }
}

/// One row per task, one column per model; winners are in bold.
pub fn render_table(reports: &[ExtrapolationReport], models: &[ModelKind]) -> String {
    let mut out = String::from("| Task |");
    for m in models {
        write!(out, " {m} |").unwrap();
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(models.len()));
    out.push('\n');
    for r in reports {
        write!(out, "| {} |", r.task.replace('|', "\\|")).unwrap();
        for m in models {
            let cell = match r.rmse_by_model.get(m) {
                Some(&v) if r.winners.contains(m) => format!("**{}**", format_rmse(v)),
                Some(&v) => format_rmse(v),
                None => String::new(),
            };
            write!(out, " {cell} |").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn emit_report(run: &BenchmarkRun, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(run).expect("reports always serialise"),
        ReportFormat::Table => {
            let models = &run.config.models;
            let mut out = render_table(&run.reports, models);
            write!(out, "| best fraction ({} tasks) |", run.summary.tasks).unwrap();
            for m in models {
                let f = run.summary.best_fraction_by_model.get(m).copied().unwrap_or(0.0);
                write!(out, " {f:.2} |").unwrap();
            }
            out.push('\n');
            if !run.skipped.is_empty() {
                writeln!(out, "\nSkipped {} task(s):", run.skipped.len()).unwrap();
                for s in &run.skipped {
                    writeln!(out, "- {}: {}", s.source, s.reason).unwrap();
                }
            }
            out
        }
    }
}
