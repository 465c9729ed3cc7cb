//! Learning curves with known ground truth.
//!
//! Randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`. Stream 0
//! draws the target direction and stream `1 + t` everything in trial `t`, so
//! a curve depends only on its [`SphereTaskSpec`] and not on how trials are
//! scheduled.
//!
//! Within a trial the training sets are nested: one pool of
//! `max(sample_sizes)` examples is drawn and size `n` trains on its first `n`
//! rows, as when a learning curve is measured on subsets of one dataset.

pub mod sphere;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::LearningCurve;
use crate::error::{Error, Result};
use crate::models::ModelParams;

pub use sphere::{
    logistic_loss, misclassification_rate, population_error, random_unit_vector, sample_sphere_dataset,
    train_logistic, LabeledDataset, LogisticConfig,
};

/// Random-guess error rate for balanced binary labels.
pub const BINARY_EPS0: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereTaskSpec {
    pub dim: usize,
    /// Label-flip probability, which is also the Bayes risk.
    pub delta: f64,
    pub sample_sizes: Vec<usize>,
    pub test_size: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub trainer: LogisticConfig,
    /// Score each classifier by its exact population error instead of a
    /// sampled test set of `test_size` points.
    #[serde(default)]
    pub exact_test_error: bool,
}

impl SphereTaskSpec {
    /// Sizes `round(start * ratio^k)` up to `stop`, deduplicated.
    pub fn geometric_sizes(start: usize, stop: usize, ratio: f64) -> Vec<usize> {
        let mut sizes = Vec::new();
        let mut v = start as f64;
        while v.round() as usize <= stop {
            let n = v.round() as usize;
            if sizes.last() != Some(&n) {
                sizes.push(n);
            }
            v *= ratio;
        }
        sizes
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: f64, reason| Err(Error::InvalidParam { name, value, reason });
        if self.dim == 0 {
            return bad("dim", 0.0, "must be positive");
        }
        if !(0.0..0.5).contains(&self.delta) {
            return bad("delta", self.delta, "must lie in [0, 0.5)");
        }
        if self.sample_sizes.is_empty() || self.sample_sizes[0] == 0 {
            return bad("sample_sizes", 0.0, "must be nonempty and positive");
        }
        if self.sample_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return bad("sample_sizes", 0.0, "must be strictly increasing");
        }
        if self.test_size == 0 {
            return bad("test_size", 0.0, "must be positive");
        }
        if self.trials == 0 {
            return bad("trials", 0.0, "must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCurve {
    pub curve: LearningCurve,
    /// Ground-truth irreducible loss (`delta` for sphere curves).
    pub bayes_risk: f64,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Averages the test error of the logistic classifier over `trials`
/// independent trials at every sample size. Points whose mean error is not
/// below random guessing are dropped with a warning.
pub fn generate_sphere_curve(spec: &SphereTaskSpec) -> Result<SyntheticCurve> {
    spec.validate()?;
    // Stream 0 is reserved for the target direction.
    let w_star = random_unit_vector(spec.dim, &mut stream_rng(spec.seed, 0));

    let n_max = *spec.sample_sizes.last().expect("validated nonempty");
    let per_trial = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(spec.seed, 1 + t as u64);
            let full = sample_sphere_dataset(spec.dim, n_max, &w_star, spec.delta, &mut rng);
            spec.sample_sizes
                .iter()
                .map(|&n| {
                    let w = train_logistic(&full.prefix(n), &spec.trainer);
                    if spec.exact_test_error {
                        population_error(&w, &w_star, spec.delta)
                    } else {
                        misclassification_rate(&w, &w_star, spec.delta, spec.test_size, &mut rng)
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let mut points = Vec::with_capacity(spec.sample_sizes.len());
    for (s, &n) in spec.sample_sizes.iter().enumerate() {
        let mean = per_trial.iter().map(|r| r[s]).sum::<f64>() / spec.trials as f64;
        if mean >= BINARY_EPS0 || mean <= 0.0 {
            log::warn!("dropping n = {n}: mean error {mean} outside (0, {BINARY_EPS0})");
            continue;
        }
        points.push((n as f64, mean));
    }
    let name = format!("sphere-d{}-delta{}-seed{}", spec.dim, spec.delta, spec.seed);
    let curve = LearningCurve::new(points, BINARY_EPS0, name, "misclassification error")?;
    Ok(SyntheticCurve {
        curve,
        bayes_risk: spec.delta,
    })
}

/// Observation noise for [`generate_from_model`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Noise {
    /// `eps * exp(N(0, sigma^2))`, natural for square-log losses.
    Multiplicative(f64),
    /// `eps + N(0, sigma^2)`.
    Additive(f64),
}

/// Samples a curve from a fitted or hand-picked model.
pub fn generate_from_model<R: Rng + ?Sized>(
    params: &ModelParams,
    xs: &[f64],
    eps0: f64,
    noise: Noise,
    rng: &mut R,
) -> Result<LearningCurve> {
    let sigma = match noise {
        Noise::Multiplicative(s) | Noise::Additive(s) => s,
    };
    let normal = Normal::new(0.0, sigma).map_err(|_| Error::InvalidParam {
        name: "noise_sigma",
        value: sigma,
        reason: "must be finite and nonnegative",
    })?;
    let mut points = Vec::with_capacity(xs.len());
    for &x in xs {
        let clean = params.predict(x)?;
        if clean >= eps0 {
            return Err(Error::LossOutOfRange {
                index: points.len(),
                eps: clean,
                eps0,
            });
        }
        let eps = match noise {
            _ if sigma == 0.0 => clean,
            Noise::Multiplicative(_) => clean * normal.sample(rng).exp(),
            Noise::Additive(_) => clean + normal.sample(rng),
        };
        points.push((x, eps));
    }
    LearningCurve::new(points, eps0, "generated", "loss")
}
