//! Noisy-halfspace classification on the unit sphere.
//!
//! Instances are uniform on `S^{d-1}`; the label is `sign(<w*, x>)`, flipped
//! independently with probability `delta`. The Bayes-optimal classifier is
//! `w*` itself and its error rate (the Bayes risk) is exactly `delta`, which
//! gives learning curves with a known irreducible loss.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// `n` labeled points stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub dim: usize,
    pub features: Vec<f64>,
    /// `+1.0` or `-1.0`.
    pub labels: Vec<f64>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    /// The first `n` examples (all of them if `n >= len`).
    pub fn prefix(&self, n: usize) -> LabeledDataset {
        let n = n.min(self.len());
        LabeledDataset {
            dim: self.dim,
            features: self.features[..n * self.dim].to_vec(),
            labels: self.labels[..n].to_vec(),
        }
    }
}

/// Uniform direction on the sphere: a normalised standard Gaussian vector.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = dot(&v, &v).sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|e| *e /= n);
            return v;
        }
    }
}

fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub fn sample_sphere_dataset<R: Rng + ?Sized>(
    dim: usize,
    n: usize,
    w_star: &[f64],
    delta: f64,
    rng: &mut R,
) -> LabeledDataset {
    assert_eq!(w_star.len(), dim, "w_star has the wrong dimension");
    let mut features = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x = random_unit_vector(dim, rng);
        let clean = sign(dot(w_star, &x));
        let flip = rng.random::<f64>() < delta;
        labels.push(if flip { -clean } else { clean });
        features.extend_from_slice(&x);
    }
    LabeledDataset {
        dim,
        features,
        labels,
    }
}

/// Full-batch gradient descent on the mean logistic loss.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogisticConfig {
    pub iterations: usize,
    /// Fixed step; `None` uses `1 / (1 + L)` with `L` the smoothness bound
    /// `max_i |x_i|^2 / 4` of the mean logistic loss.
    pub step: Option<f64>,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            iterations: 500,
            step: None,
        }
    }
}

/// Mean logistic loss `mean(log(1 + exp(-y <w, x>)))`.
pub fn logistic_loss(data: &LabeledDataset, w: &[f64]) -> f64 {
    let total: f64 = (0..data.len())
        .map(|i| softplus(-data.labels[i] * dot(w, data.row(i))))
        .sum();
    total / data.len() as f64
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Trains from the zero vector and returns the weights.
pub fn train_logistic(data: &LabeledDataset, cfg: &LogisticConfig) -> Vec<f64> {
    let dim = data.dim;
    let mut w = vec![0.0; dim];
    if data.is_empty() {
        return w;
    }
    let step = cfg.step.unwrap_or_else(|| {
        let max_sq = (0..data.len())
            .map(|i| {
                let r = data.row(i);
                dot(r, r)
            })
            .fold(0.0, f64::max);
        1.0 / (1.0 + max_sq / 4.0)
    });
    let n = data.len() as f64;
    let mut grad = vec![0.0; dim];
    for _ in 0..cfg.iterations {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for i in 0..data.len() {
            let row = data.row(i);
            let y = data.labels[i];
            // d/dw log(1 + exp(-y w.x)) = -y sigmoid(-y w.x) x
            let coef = -y * sigmoid(-y * dot(&w, row));
            axpy(coef, row, &mut grad);
        }
        axpy(-step / n, &grad, &mut w);
    }
    w
}

/// Error rate of `sign(<w, x>)` on `test_size` fresh noisy samples.
pub fn misclassification_rate<R: Rng + ?Sized>(
    w: &[f64],
    w_star: &[f64],
    delta: f64,
    test_size: usize,
    rng: &mut R,
) -> Result<f64> {
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::UndefinedClassifier);
    }
    if test_size == 0 {
        return Err(Error::TooFewPoints { required: 1, got: 0 });
    }
    let test = sample_sphere_dataset(w_star.len(), test_size, w_star, delta, rng);
    let wrong = (0..test.len())
        .filter(|&i| sign(dot(w, test.row(i))) != test.labels[i])
        .count();
    Ok(wrong as f64 / test_size as f64)
}

/// Population error rate of `sign(<w, x>)`: `delta + (1 - 2 delta) angle(w, w*) / pi`.
///
/// For `x` uniform on the sphere two halfspaces through the origin disagree
/// on a fraction `angle / pi` of the sphere; label noise flips the outcome
/// with probability `delta` either way.
pub fn population_error(w: &[f64], w_star: &[f64], delta: f64) -> Result<f64> {
    let norm = dot(w, w).sqrt();
    if norm == 0.0 {
        return Err(Error::UndefinedClassifier);
    }
    let star_norm = dot(w_star, w_star).sqrt();
    let cos = (dot(w, w_star) / (norm * star_norm)).clamp(-1.0, 1.0);
    Ok(delta + (1.0 - 2.0 * delta) * cos.acos() / std::f64::consts::PI)
}

/// Dot product with eight independent accumulators so the loop pipelines
/// and vectorises; the summation order is fixed, so results do not depend
/// on the instruction set.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let chunks_a = a.chunks_exact(8);
    let chunks_b = b.chunks_exact(8);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        let ca: &[f64; 8] = ca.try_into().expect("chunk of 8");
        let cb: &[f64; 8] = cb.try_into().expect("chunk of 8");
        for k in 0..8 {
            acc[k] += ca[k] * cb[k];
        }
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
