//! Task files, benchmark runs over collections of them, and the documents
//! the command-line tool emits.

pub mod benchmark;
pub mod plot;
pub mod report;
pub mod task;

pub use benchmark::{prepare_split, run_benchmark, run_benchmark_curves, task_paths, BenchmarkConfig, BenchmarkRun, SkippedTask};
pub use plot::{emit_excess_panels, emit_plot_data, geometric_grid};
pub use report::{emit_report, format_rmse, render_table, ReportFormat};
pub use task::{load_task, load_task_bytes, TaskFile};
