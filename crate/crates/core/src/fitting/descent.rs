//! One-dimensional gradient block of the coordinate descent.
//!
//! Each outer iteration takes the current value of the nonlinear parameter
//! (`eps_inf` or `gamma`), lets the caller solve the linear block in closed
//! form, and moves the parameter one gradient step. The caller's closure does
//! both halves: given `theta` it returns the loss and `dL/dtheta` evaluated at
//! the closed-form optimum of the remaining coefficients.

use crate::error::{Error, Result};
use crate::fitting::FitConfig;

/// Output of one closed-form block at a fixed `theta`.
pub(crate) struct BlockEval<P> {
    pub loss: f64,
    pub grad: f64,
    pub coeffs: P,
}

pub(crate) struct Descent<P> {
    pub theta: f64,
    pub eval: BlockEval<P>,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// Runs the gradient block on `theta` within `[lo, hi]`.
///
/// `scale` is the natural magnitude of `theta`. In adaptive mode a step
/// shorter than `convergence_tol * max(|theta|, scale)` combined with a loss
/// decrease below `convergence_tol` counts as converged, but only once the
/// step size has been calibrated by at least one rejected overshoot; before
/// that, small steps only mean the step is still growing from its base rate.
pub(crate) fn coordinate_descent<P>(
    init: f64,
    lo: f64,
    hi: f64,
    scale: f64,
    cfg: &FitConfig,
    mut block: impl FnMut(f64) -> Result<BlockEval<P>>,
) -> Result<Descent<P>> {
    let clamp = |t: f64| t.clamp(lo, hi);
    let mut theta = clamp(init);
    let mut cur = block(theta)?;
    if !cur.loss.is_finite() {
        return Err(Error::NonFinite("training loss"));
    }
    let mut history = Vec::new();
    if cfg.record_history {
        history.push(cur.loss);
    }

    let mut step = cfg.learning_rate * cfg.rate_multiplier;
    let mut converged = false;
    let mut calibrated = false;
    let mut iterations = 0;

    while iterations < cfg.max_outer_iters {
        iterations += 1;
        let candidate = clamp(theta - step * cur.grad);
        if candidate == theta {
            // Zero step, vanished gradient, or pinned against a bound.
            converged = true;
            break;
        }
        let delta_theta = (candidate - theta).abs();

        if cfg.adaptive_step {
            match block(candidate) {
                Ok(next) if next.loss.is_finite() && next.loss <= cur.loss => {
                    let decrease = cur.loss - next.loss;
                    theta = candidate;
                    cur = next;
                    if cfg.record_history {
                        history.push(cur.loss);
                    }
                    if calibrated
                        && decrease < cfg.convergence_tol
                        && delta_theta <= cfg.convergence_tol * theta.abs().max(scale)
                    {
                        converged = true;
                        break;
                    }
                    step *= 2.0;
                }
                // Overshot (or left the feasible region): retry with half the step.
                _ => {
                    calibrated = true;
                    step *= 0.5;
                }
            }
        } else {
            let next = block(candidate)?;
            if !next.loss.is_finite() {
                return Err(Error::NonFinite("training loss"));
            }
            let decrease = cur.loss - next.loss;
            theta = candidate;
            cur = next;
            if cfg.record_history {
                history.push(cur.loss);
            }
            if decrease.abs() < cfg.convergence_tol {
                converged = true;
                break;
            }
        }
    }

    Ok(Descent {
        theta,
        eval: cur,
        iterations,
        converged,
        history,
    })
}
