//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 fit failure when
//! `--strict` is given.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use scaling_laws::curve::apply_cutoff;
use scaling_laws::evaluation::{evaluate_task, TieTolerance};
use scaling_laws::fitting::{fit, FitConfig};
use scaling_laws::harness::{
    emit_excess_panels, emit_plot_data, emit_report, prepare_split, run_benchmark, task_paths, BenchmarkConfig,
    ReportFormat, TaskFile,
};
use scaling_laws::models::ModelKind;
use scaling_laws::synthetic::{generate_sphere_curve, LogisticConfig, SphereTaskSpec};
use scaling_laws::Error;

#[derive(Parser)]
#[command(name = "scaling-laws", version, about = "Fit and compare scaling laws on learning curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit models to a whole curve and print parameters and training loss.
    Fit {
        task: PathBuf,
        #[command(flatten)]
        opts: FitOpts,
    },
    /// Fit on x <= x_max/2 and score extrapolation on the rest.
    Evaluate {
        task: PathBuf,
        #[command(flatten)]
        opts: FitOpts,
    },
    /// Evaluate every *.json task in a directory and rank the models.
    Benchmark {
        dir: PathBuf,
        #[command(flatten)]
        opts: FitOpts,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Generate a noisy-sphere logistic-regression learning curve.
    Synth {
        #[arg(long, default_value_t = 100)]
        dim: usize,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long, default_value_t = 16)]
        min_n: usize,
        #[arg(long, default_value_t = 8192)]
        max_n: usize,
        /// Ratio between consecutive sample sizes.
        #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
        ratio: f64,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value_t = 10_000)]
        test_size: usize,
        /// Score classifiers by exact population error instead of a test set.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of curves, with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Output directory (one file per curve); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write CSV plot data for the fitted models of one task.
    Plotdata {
        task: PathBuf,
        #[command(flatten)]
        opts: FitOpts,
        #[arg(long, default_value_t = 100)]
        grid_points: usize,
        /// Emit excess-risk panels for these cutoffs instead; needs bayes_risk in the task.
        #[arg(long, value_delimiter = ',')]
        panels: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct FitOpts {
    /// Models to fit (M1, M2, M3, M4, M4-no-alpha), comma separated or repeated.
    #[arg(long = "model", value_delimiter = ',', default_values_t = ModelKind::MAIN.map(|m| m.to_string()))]
    models: Vec<String>,
    /// Drop train points with x below this value; `auto` keeps every point.
    #[arg(long, default_value = "auto")]
    cutoff: String,
    #[arg(long, default_value_t = TieTolerance::default().rel)]
    tie_rel: f64,
    #[arg(long, default_value_t = TieTolerance::default().abs)]
    tie_abs: f64,
    /// Recorded in benchmark output; fitting is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base gradient step for eps_inf / gamma.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    truncate_at_peak: bool,
    /// Exit with status 3 if any requested model fails to fit.
    #[arg(long)]
    strict: bool,
}

enum Failure {
    Usage(String),
    Data(String),
    Fit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownModel(_) | Error::InvalidParam { .. } => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl FitOpts {
    fn config(&self) -> Result<BenchmarkConfig, Failure> {
        let models = self
            .models
            .iter()
            .map(|m| m.parse::<ModelKind>())
            .collect::<Result<Vec<_>, _>>()?;
        let cutoff = match self.cutoff.as_str() {
            "auto" => None,
            v => Some(v.parse::<f64>().map_err(|_| Failure::Usage(format!("invalid --cutoff {v:?}")))?),
        };
        let mut fit = FitConfig::default();
        if let Some(lr) = self.lr {
            fit.learning_rate = lr;
        }
        if let Some(n) = self.max_iters {
            fit.max_outer_iters = n;
        }
        fit.validate()?;
        Ok(BenchmarkConfig {
            fit,
            models,
            tie: TieTolerance {
                abs: self.tie_abs,
                rel: self.tie_rel,
            },
            truncate_at_peak: self.truncate_at_peak,
            cutoff,
            seed: self.seed,
        })
    }
}

fn strict_check(strict: bool, failures: &BTreeMap<ModelKind, String>) -> Result<(), Failure> {
    if strict && !failures.is_empty() {
        let list: Vec<String> = failures.iter().map(|(m, e)| format!("{m}: {e}")).collect();
        return Err(Failure::Fit(list.join("; ")));
    }
    Ok(())
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fit { task, opts } => {
            let cfg = opts.config()?;
            let mut curve = TaskFile::read(&task)?.to_curve()?;
            if cfg.truncate_at_peak {
                curve = scaling_laws::curve::truncate_at_peak(&curve);
            }
            if let Some(tau) = cfg.cutoff {
                curve = apply_cutoff(&curve, tau)?;
            }
            let mut failures = BTreeMap::new();
            for &m in &cfg.models {
                match fit(m, &curve, &cfg.fit) {
                    Ok(r) => println!(
                        "{}",
                        json!({
                            "model": m,
                            "params": r.params,
                            "train_loss": r.train_loss,
                            "iterations": r.iterations,
                            "converged": r.converged,
                        })
                    ),
                    Err(e) => {
                        eprintln!("{m}: {e}");
                        failures.insert(m, e.to_string());
                    }
                }
            }
            strict_check(opts.strict, &failures)
        }
        Command::Evaluate { task, opts } => {
            let cfg = opts.config()?;
            let curve = TaskFile::read(&task)?.to_curve()?;
            let split = prepare_split(&curve, &cfg)?;
            let report = evaluate_task(&split, &cfg.fit, &cfg.models, &cfg.tie);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
            strict_check(opts.strict, &report.diagnostics)
        }
        Command::Benchmark { dir, opts, format } => {
            let cfg = opts.config()?;
            let paths = task_paths(&dir)?;
            let run = run_benchmark(&paths, &cfg)?;
            let format = match format {
                Format::Table => ReportFormat::Table,
                Format::Json => ReportFormat::Json,
            };
            print!("{}", emit_report(&run, format));
            if matches!(format, ReportFormat::Json) {
                println!();
            }
            let failures: BTreeMap<ModelKind, String> = run
                .reports
                .iter()
                .flat_map(|r| r.diagnostics.iter().map(move |(m, e)| (*m, format!("{}: {e}", r.task))))
                .collect();
            strict_check(opts.strict, &failures)
        }
        Command::Synth {
            dim,
            delta,
            min_n,
            max_n,
            ratio,
            trials,
            test_size,
            exact,
            seed,
            count,
            out,
        } => {
            if !(ratio > 1.0) || min_n == 0 || min_n > max_n {
                return Err(Failure::Usage("need --ratio > 1 and 0 < --min-n <= --max-n".into()));
            }
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Data(format!("{}: {e}", dir.display())))?;
            }
            for s in seed..seed + count {
                let spec = SphereTaskSpec {
                    dim,
                    delta,
                    sample_sizes: SphereTaskSpec::geometric_sizes(min_n, max_n, ratio),
                    test_size,
                    trials,
                    seed: s,
                    trainer: LogisticConfig::default(),
                    exact_test_error: exact,
                };
                let synth = generate_sphere_curve(&spec).map_err(|e| match e {
                    Error::InvalidParam { .. } => Failure::Usage(e.to_string()),
                    other => Failure::Data(other.to_string()),
                })?;
                let doc = TaskFile::from_curve(&synth.curve, "synthetic", Some(synth.bayes_risk)).to_json() + "\n";
                let path = out.as_ref().map(|d| d.join(format!("{}.json", synth.curve.name())));
                write_output(path.as_deref(), &doc)?;
            }
            Ok(())
        }
        Command::Plotdata {
            task,
            opts,
            grid_points,
            panels,
        } => {
            let cfg = opts.config()?;
            let file = TaskFile::read(&task)?;
            let curve = file.to_curve()?;
            if !panels.is_empty() {
                let bayes = file
                    .bayes_risk
                    .ok_or_else(|| Failure::Data(format!("{}: --panels needs bayes_risk", task.display())))?;
                print!("{}", emit_excess_panels(&curve, bayes, &panels, &cfg.fit, &cfg.models, grid_points)?);
                return Ok(());
            }
            let split = prepare_split(&curve, &cfg)?;
            let report = evaluate_task(&split, &cfg.fit, &cfg.models, &cfg.tie);
            for (m, e) in &report.diagnostics {
                eprintln!("{m}: {e}");
            }
            print!("{}", emit_plot_data(&split, &report.params_by_model, grid_points)?);
            strict_check(opts.strict, &report.diagnostics)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Fit(m)) => {
            eprintln!("fit failed: {m}");
            ExitCode::from(3)
        }
    }
}
