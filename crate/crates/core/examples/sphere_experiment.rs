//! Runs the noisy-sphere logistic-regression experiment and prints the
//! extrapolation RMSE of every estimator at several fitting cutoffs.
//!
//! cargo run --release --example sphere_experiment -- --seed 3 --exact

use std::time::Instant;

use clap::Parser;
use scaling_laws::curve::apply_cutoff;
use scaling_laws::prelude::*;
use scaling_laws::synthetic::{generate_sphere_curve, LogisticConfig, SphereTaskSpec};

#[derive(Parser)]
struct Args {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    trials: usize,
    #[arg(long, default_value_t = 16)]
    min_n: usize,
    #[arg(long, default_value_t = 8192)]
    max_n: usize,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    ratio: f64,
    /// Score with the exact population error instead of a sampled test set.
    #[arg(long)]
    exact: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 512.0, 1024.0])]
    cutoffs: Vec<f64>,
    /// Also print the fitted parameters.
    #[arg(long)]
    verbose: bool,
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let spec = SphereTaskSpec {
        dim: 100,
        delta: 0.2,
        sample_sizes: SphereTaskSpec::geometric_sizes(args.min_n, args.max_n, args.ratio),
        test_size: 10_000,
        trials: args.trials,
        seed: args.seed,
        trainer: LogisticConfig::default(),
        exact_test_error: args.exact,
    };
    let start = Instant::now();
    let synth = generate_sphere_curve(&spec)?;
    eprintln!("generated in {:.1?}", start.elapsed());
    for p in synth.curve.points() {
        println!("{:>8} {:.5} excess {:.5}", p.x, p.eps, p.eps - synth.bayes_risk);
    }
    let split = split_for_extrapolation(&synth.curve)?;
    let cfg = FitConfig::default();
    let tie = TieTolerance::default();
    for &cutoff in &args.cutoffs {
        let train = apply_cutoff(&split.train, cutoff)?;
        let s = CurveSplit { train, holdout: split.holdout.clone(), tau: split.tau };
        let r = evaluate_task(&s, &cfg, &ModelKind::ALL, &tie);
        let cells: Vec<String> = r
            .rmse_by_model
            .iter()
            .map(|(m, v)| format!("{m}={v:.2e}{}", if r.winners.contains(m) { "*" } else { "" }))
            .collect();
        println!("cutoff {cutoff:>6}: {}", cells.join("  "));
        if args.verbose {
            for (m, p) in &r.params_by_model {
                println!("    {m}: {p:?}");
            }
        }
    }
    Ok(())
}
