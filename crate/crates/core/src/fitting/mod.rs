//! Block coordinate descent fitters for the four function classes.
//!
//! The log-linear parameters (`alpha`, `log beta`, `c`) are always solved in
//! closed form by least squares. The one remaining nonlinear parameter
//! (`eps_inf` for M2/M4, `gamma` for M3) moves by gradient descent on the
//! square-log loss, starting from the configured learning rate.
//!
//! With `adaptive_step` on (the default) the step size doubles after every
//! accepted step and halves whenever a step would raise the loss, so the
//! training loss is non-increasing across outer iterations. With it off the
//! step is the fixed `learning_rate * rate_multiplier`.

mod descent;
pub mod loss;
pub mod lstsq;

use serde::{Deserialize, Serialize};

use crate::curve::LearningCurve;
use crate::error::{Error, Result};
use crate::models::{M1Params, M2Params, M3Params, M4Params, ModelKind, ModelParams};

use descent::{coordinate_descent, BlockEval};
pub use loss::{
    grad_eps_inf_m2, grad_eps_inf_m4, grad_gamma_m3, loss_m1, loss_m2, loss_m3, loss_m4,
};
pub use lstsq::{solve_least_squares, solve_loglinear};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Base gradient step on `eps_inf` / `gamma`, in raw parameter units.
    pub learning_rate: f64,
    /// Uniform multiplier on `learning_rate`.
    pub rate_multiplier: f64,
    /// Grow/shrink the step with the loss (see module docs).
    pub adaptive_step: bool,
    pub max_outer_iters: usize,
    /// Threshold on the absolute loss decrease per outer iteration.
    pub convergence_tol: f64,
    /// `eps_inf` starts at this fraction of the smallest observed loss.
    pub eps_inf_init_fraction: f64,
    /// Further starting fractions for `eps_inf`. Each start runs its own
    /// descent and the lowest training loss wins; earlier starts win ties,
    /// `eps_inf_init_fraction` first. Ignored when the learning rate is zero.
    pub eps_inf_restarts: Vec<f64>,
    pub gamma_init: f64,
    /// `eps_inf` is kept at or below `(1 - margin) * min eps`.
    pub eps_inf_margin: f64,
    /// Keep the per-iteration training loss in [`FitResult::history`].
    pub record_history: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            learning_rate: 1e-7,
            rate_multiplier: 1.0,
            adaptive_step: true,
            max_outer_iters: 100_000,
            convergence_tol: 1e-8,
            eps_inf_init_fraction: 0.5,
            eps_inf_restarts: vec![0.0, 0.95],
            gamma_init: 0.0,
            eps_inf_margin: 1e-6,
            record_history: false,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, reason| Err(Error::InvalidParam { name, value, reason });
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad("learning_rate", self.learning_rate, "must be finite and nonnegative");
        }
        if !(self.rate_multiplier.is_finite() && self.rate_multiplier >= 0.0) {
            return bad("rate_multiplier", self.rate_multiplier, "must be finite and nonnegative");
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return bad("convergence_tol", self.convergence_tol, "must be positive");
        }
        if !(0.0..1.0).contains(&self.eps_inf_init_fraction) {
            return bad("eps_inf_init_fraction", self.eps_inf_init_fraction, "must lie in [0, 1)");
        }
        if let Some(&f) = self.eps_inf_restarts.iter().find(|f| !(0.0..1.0).contains(*f)) {
            return bad("eps_inf_restarts", f, "must lie in [0, 1)");
        }
        if !(self.gamma_init.is_finite() && self.gamma_init >= 0.0) {
            return bad("gamma_init", self.gamma_init, "must be nonnegative");
        }
        if !(self.eps_inf_margin > 0.0 && self.eps_inf_margin < 1.0) {
            return bad("eps_inf_margin", self.eps_inf_margin, "must lie in (0, 1)");
        }
        if self.max_outer_iters == 0 {
            return bad("max_outer_iters", 0.0, "must be positive");
        }
        Ok(())
    }

    /// Same config with the nonlinear parameter frozen at its initial value.
    pub fn pinned(&self) -> Self {
        FitConfig {
            learning_rate: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ModelParams,
    /// Final square-log training loss.
    pub train_loss: f64,
    /// Outer iterations, summed over all starts.
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub history: Vec<f64>,
}

fn require_points(curve: &LearningCurve, kind: ModelKind) -> Result<()> {
    let required = kind.min_points();
    if curve.len() < required {
        Err(Error::TooFewPoints {
            required,
            got: curve.len(),
        })
    } else {
        Ok(())
    }
}

fn log_xs(curve: &LearningCurve) -> Vec<f64> {
    curve.xs().map(f64::ln).collect()
}

fn mean_square(residuals: impl Iterator<Item = f64>, n: usize) -> f64 {
    residuals.map(|r| r * r).sum::<f64>() / n as f64
}

/// Power law `eps = beta x^c`: one least-squares solve of `log eps` on `(1, log x)`.
pub fn fit_m1(curve: &LearningCurve) -> Result<FitResult> {
    require_points(curve, ModelKind::M1)?;
    let lx = log_xs(curve);
    let targets: Vec<f64> = curve.losses().map(f64::ln).collect();
    let coef = solve_least_squares(&[vec![1.0; lx.len()], lx.clone()], &targets)?;
    let (log_beta, c) = (coef[0], coef[1]);
    let loss = mean_square(
        targets.iter().zip(&lx).map(|(t, l)| t - log_beta - c * l),
        targets.len(),
    );
    Ok(FitResult {
        params: ModelParams::M1(M1Params {
            beta: log_beta.exp(),
            c,
        }),
        train_loss: loss,
        iterations: 1,
        converged: true,
        history: Vec::new(),
    })
}

/// Coefficients of the log-linear block of M2/M4 at a fixed `eps_inf`.
#[derive(Clone, Copy)]
struct ExcessCoeffs {
    alpha: f64,
    log_beta: f64,
    c: f64,
}

/// Closed-form block for targets `log(eps - eps_inf)` regressed on
/// `(log(eps0 - eps), 1, log x)`, with the first column dropped when `alpha`
/// is pinned at zero or its unconstrained solution is negative.
struct ExcessBlock<'a> {
    curve: &'a LearningCurve,
    log_x: Vec<f64>,
    log_gap: Option<Vec<f64>>,
    fixed_c: Option<f64>,
}

impl<'a> ExcessBlock<'a> {
    fn new(curve: &'a LearningCurve, free_alpha: bool) -> Self {
        let eps0 = curve.eps0();
        ExcessBlock {
            curve,
            log_x: log_xs(curve),
            log_gap: free_alpha.then(|| curve.losses().map(|e| (eps0 - e).ln()).collect()),
            fixed_c: None,
        }
    }

    fn solve(&self, targets: &[f64]) -> Result<ExcessCoeffs> {
        let n = targets.len();
        if let Some(c) = self.fixed_c {
            let shifted: Vec<f64> = targets.iter().zip(&self.log_x).map(|(t, l)| t - c * l).collect();
            let coef = solve_least_squares(&[vec![1.0; n]], &shifted)?;
            return Ok(ExcessCoeffs { alpha: 0.0, log_beta: coef[0], c });
        }
        let ones = vec![1.0; n];
        if let Some(gap) = &self.log_gap {
            let coef = solve_least_squares(&[gap.clone(), ones.clone(), self.log_x.clone()], targets)?;
            if coef[0] >= 0.0 {
                return Ok(ExcessCoeffs { alpha: coef[0], log_beta: coef[1], c: coef[2] });
            }
        }
        let coef = solve_least_squares(&[ones, self.log_x.clone()], targets)?;
        Ok(ExcessCoeffs { alpha: 0.0, log_beta: coef[0], c: coef[1] })
    }

    fn eval(&self, eps_inf: f64) -> Result<BlockEval<ExcessCoeffs>> {
        let targets: Vec<f64> = self.curve.losses().map(|e| (e - eps_inf).ln()).collect();
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::EpsInfTooLarge {
                eps_inf,
                min_eps: self.curve.min_loss(),
            });
        }
        let k = self.solve(&targets)?;
        let n = targets.len() as f64;
        let (mut loss, mut grad) = (0.0, 0.0);
        for (i, (t, e)) in targets.iter().zip(self.curve.losses()).enumerate() {
            let gap = self.log_gap.as_ref().map_or(0.0, |g| g[i]);
            let r = t - k.alpha * gap - k.log_beta - k.c * self.log_x[i];
            loss += r * r;
            grad += 2.0 * r * (-1.0 / (e - eps_inf));
        }
        Ok(BlockEval {
            loss: loss / n,
            grad: grad / n,
            coeffs: k,
        })
    }
}

type ExcessFit = (f64, BlockEval<ExcessCoeffs>, usize, bool, Vec<f64>);

fn fit_excess(curve: &LearningCurve, cfg: &FitConfig, block: ExcessBlock<'_>) -> Result<ExcessFit> {
    cfg.validate()?;
    let min_eps = curve.min_loss();
    let hi = (1.0 - cfg.eps_inf_margin) * min_eps;
    let mut starts = vec![cfg.eps_inf_init_fraction];
    if cfg.learning_rate * cfg.rate_multiplier > 0.0 {
        starts.extend(&cfg.eps_inf_restarts);
    }
    let mut best: Option<ExcessFit> = None;
    let mut first_err = None;
    let mut total_iters = 0;
    for fraction in starts {
        match coordinate_descent(fraction * min_eps, 0.0, hi, min_eps, cfg, |t| block.eval(t)) {
            Ok(d) => {
                total_iters += d.iterations;
                if best.as_ref().is_none_or(|b| d.eval.loss < b.1.loss) {
                    best = Some((d.theta, d.eval, d.iterations, d.converged, d.history));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut b) => {
            b.2 = total_iters;
            Ok(b)
        }
        None => Err(first_err.expect("at least one start")),
    }
}

/// `eps = eps_inf + beta x^c`.
pub fn fit_m2(curve: &LearningCurve, cfg: &FitConfig) -> Result<FitResult> {
    require_points(curve, ModelKind::M2)?;
    let (eps_inf, eval, iterations, converged, history) =
        fit_excess(curve, cfg, ExcessBlock::new(curve, false))?;
    Ok(FitResult {
        params: ModelParams::M2(M2Params {
            eps_inf,
            beta: eval.coeffs.log_beta.exp(),
            c: eval.coeffs.c,
        }),
        train_loss: eval.loss,
        iterations,
        converged,
        history,
    })
}

/// M2 with the exponent held at `c`; only `(beta, eps_inf)` are fitted.
pub fn fit_m2_fixed_exponent(curve: &LearningCurve, c: f64, cfg: &FitConfig) -> Result<FitResult> {
    require_points(curve, ModelKind::M1)?;
    let mut block = ExcessBlock::new(curve, false);
    block.fixed_c = Some(c);
    let (eps_inf, eval, iterations, converged, history) = fit_excess(curve, cfg, block)?;
    Ok(FitResult {
        params: ModelParams::M2(M2Params {
            eps_inf,
            beta: eval.coeffs.log_beta.exp(),
            c,
        }),
        train_loss: eval.loss,
        iterations,
        converged,
        history,
    })
}

/// `(eps - eps_inf) / (eps0 - eps)^alpha = beta x^c` with `eps0` taken from
/// the curve. `fix_alpha_zero` drops `alpha` from the model (the ablation).
pub fn fit_m4(curve: &LearningCurve, cfg: &FitConfig, fix_alpha_zero: bool) -> Result<FitResult> {
    let kind = if fix_alpha_zero { ModelKind::M4NoAlpha } else { ModelKind::M4 };
    require_points(curve, kind)?;
    let (eps_inf, eval, iterations, converged, history) =
        fit_excess(curve, cfg, ExcessBlock::new(curve, !fix_alpha_zero))?;
    Ok(FitResult {
        params: ModelParams::M4(M4Params {
            eps0: curve.eps0(),
            eps_inf,
            alpha: eval.coeffs.alpha,
            beta: eval.coeffs.log_beta.exp(),
            c: eval.coeffs.c,
        }),
        train_loss: eval.loss,
        iterations,
        converged,
        history,
    })
}

/// `eps = beta (1/x + gamma)^c`; see [`crate::models`] for the sign of `c`.
pub fn fit_m3(curve: &LearningCurve, cfg: &FitConfig) -> Result<FitResult> {
    require_points(curve, ModelKind::M3)?;
    cfg.validate()?;
    let targets: Vec<f64> = curve.losses().map(f64::ln).collect();
    let inv_x: Vec<f64> = curve.xs().map(f64::recip).collect();
    let n = targets.len();
    let ones = vec![1.0; n];

    let block = |gamma: f64| -> Result<BlockEval<(f64, f64)>> {
        let feature: Vec<f64> = inv_x.iter().map(|u| (u + gamma).ln()).collect();
        let coef = solve_least_squares(&[ones.clone(), feature.clone()], &targets)?;
        let (log_beta, c) = (coef[0], coef[1]);
        let (mut loss, mut grad) = (0.0, 0.0);
        for i in 0..n {
            let r = targets[i] - log_beta - c * feature[i];
            loss += r * r;
            grad += 2.0 * r * (-c / (inv_x[i] + gamma));
        }
        Ok(BlockEval {
            loss: loss / n as f64,
            grad: grad / n as f64,
            coeffs: (log_beta, c),
        })
    };

    let scale = curve.x_max().recip();
    let d = coordinate_descent(cfg.gamma_init, 0.0, f64::INFINITY, scale, cfg, block)?;
    let (log_beta, c) = d.eval.coeffs;
    Ok(FitResult {
        params: ModelParams::M3(M3Params {
            beta: log_beta.exp(),
            c,
            gamma: d.theta,
        }),
        train_loss: d.eval.loss,
        iterations: d.iterations,
        converged: d.converged,
        history: d.history,
    })
}

/// Dispatches to the fitter for `kind`.
pub fn fit(kind: ModelKind, curve: &LearningCurve, cfg: &FitConfig) -> Result<FitResult> {
    match kind {
        ModelKind::M1 => fit_m1(curve),
        ModelKind::M2 => fit_m2(curve, cfg),
        ModelKind::M3 => fit_m3(curve, cfg),
        ModelKind::M4 => fit_m4(curve, cfg, false),
        ModelKind::M4NoAlpha => fit_m4(curve, cfg, true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::predict_m4;

    fn curve_from(f: impl Fn(f64) -> f64, xs: &[f64], eps0: f64) -> LearningCurve {
        let pts: Vec<_> = xs.iter().map(|&x| (x, f(x))).collect();
        LearningCurve::from_pairs(&pts, eps0).unwrap()
    }

    fn geometric(n: i32) -> Vec<f64> {
        (0..n).map(|k| 2f64.powi(k)).collect()
    }

    #[test]
    fn m1_exact_power_law() {
        // eps0 must exceed every loss, so the random-guess level sits above 1.
        let c = LearningCurve::from_pairs(&[(1.0, 1.0), (4.0, 0.5), (16.0, 0.25)], 2.0).unwrap();
        let r = fit_m1(&c).unwrap();
        let ModelParams::M1(p) = r.params else { panic!() };
        assert!((p.beta - 1.0).abs() < 1e-12 && (p.c + 0.5).abs() < 1e-12);
        assert!(r.converged && r.iterations == 1 && r.train_loss < 1e-28);
    }

    #[test]
    fn m1_constant_curve() {
        let c = curve_from(|_| 0.3, &[1.0, 2.0, 5.0, 9.0], 1.0);
        let ModelParams::M1(p) = fit_m1(&c).unwrap().params else { panic!() };
        assert!((p.beta - 0.3).abs() < 1e-12 && p.c.abs() < 1e-12);
    }

    #[test]
    fn m2_pinned_at_zero_is_m1() {
        let c = curve_from(|x| 0.2 + 0.7 * x.powf(-0.4), &geometric(8), 1.0);
        let cfg = FitConfig { eps_inf_init_fraction: 0.0, ..FitConfig::default() }.pinned();
        let ModelParams::M2(p2) = fit_m2(&c, &cfg).unwrap().params else { panic!() };
        let ModelParams::M1(p1) = fit_m1(&c).unwrap().params else { panic!() };
        assert_eq!(p2.eps_inf, 0.0);
        assert!((p2.beta - p1.beta).abs() < 1e-12 && (p2.c - p1.c).abs() < 1e-12);
    }

    #[test]
    fn m2_recovers_noiseless_parameters() {
        let c = curve_from(|x| 0.2 + x.powf(-0.5), &geometric(11), 2.0);
        let r = fit_m2(&c, &FitConfig::default()).unwrap();
        let ModelParams::M2(p) = r.params else { panic!() };
        assert!(r.converged, "{r:?}");
        assert!((p.eps_inf - 0.2).abs() / 0.2 < 1e-3, "{p:?}");
        assert!((p.beta - 1.0).abs() < 1e-3 && (p.c + 0.5).abs() / 0.5 < 1e-3, "{p:?}");
    }

    #[test]
    fn m3_pinned_at_zero_is_m1() {
        let c = curve_from(|x| 0.9 * (1.0 / x + 1e-3).powf(0.3), &geometric(10), 1.0);
        let ModelParams::M3(p3) = fit_m3(&c, &FitConfig::default().pinned()).unwrap().params else { panic!() };
        let ModelParams::M1(p1) = fit_m1(&c).unwrap().params else { panic!() };
        assert_eq!(p3.gamma, 0.0);
        assert!((p3.beta - p1.beta).abs() < 1e-12 && (p3.c + p1.c).abs() < 1e-12);
    }

    #[test]
    fn m4_recovers_noiseless_parameters() {
        let truth = M4Params { eps0: 1.0, eps_inf: 0.1, alpha: 1.0, beta: 2.0, c: -0.5 };
        let c = curve_from(|x| predict_m4(&truth, x).unwrap(), &geometric(12), 1.0);
        let r = fit_m4(&c, &FitConfig::default(), false).unwrap();
        let ModelParams::M4(p) = r.params else { panic!() };
        for (got, want) in [(p.eps_inf, 0.1), (p.alpha, 1.0), (p.beta, 2.0), (p.c, -0.5)] {
            assert!(((got - want) / want).abs() < 1e-2, "{p:?}");
        }
    }

    #[test]
    fn m4_without_alpha_is_m2() {
        let c = curve_from(|x| 0.15 + 0.6 * x.powf(-0.35), &geometric(10), 0.9);
        let ModelParams::M4(p4) = fit_m4(&c, &FitConfig::default(), true).unwrap().params else { panic!() };
        let ModelParams::M2(p2) = fit_m2(&c, &FitConfig::default()).unwrap().params else { panic!() };
        assert_eq!(p4.alpha, 0.0);
        assert_eq!(p4.eps0, 0.9);
        for (a, b) in [(p4.eps_inf, p2.eps_inf), (p4.beta, p2.beta), (p4.c, p2.c)] {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn loss_history_is_non_increasing() {
        let c = curve_from(|x| 0.3 + 0.4 * x.powf(-0.6) * (1.0 + 0.02 * (x.ln()).sin()), &geometric(10), 1.0);
        let cfg = FitConfig { record_history: true, ..FitConfig::default() };
        for kind in [ModelKind::M2, ModelKind::M3, ModelKind::M4] {
            let r = fit(kind, &c, &cfg).unwrap();
            assert!(r.history.len() > 1);
            for w in r.history.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{kind}: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn fixed_rate_takes_paper_sized_steps() {
        let c = curve_from(|x| 0.2 + x.powf(-0.5), &geometric(8), 2.0);
        let cfg = FitConfig { adaptive_step: false, max_outer_iters: 10, ..FitConfig::default() };
        let ModelParams::M2(p) = fit_m2(&c, &cfg).unwrap().params else { panic!() };
        let start = 0.5 * c.min_loss();
        assert!((p.eps_inf - start).abs() < 1e-4);
    }

    #[test]
    fn too_few_points() {
        let c = curve_from(|x| 0.5 / x, &[1.0, 2.0, 4.0], 1.0);
        assert!(matches!(fit_m4(&c, &FitConfig::default(), false), Err(Error::TooFewPoints { .. })));
        assert!(fit_m4(&c, &FitConfig::default(), true).is_ok());
    }

    #[test]
    fn invalid_config_rejected() {
        let c = curve_from(|x| 0.5 / x, &[1.0, 2.0, 4.0, 8.0], 1.0);
        let cfg = FitConfig { eps_inf_init_fraction: 1.0, ..FitConfig::default() };
        assert!(fit_m2(&c, &cfg).is_err());
    }
}
