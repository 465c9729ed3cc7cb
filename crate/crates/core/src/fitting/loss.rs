//! Square-log losses and their partial derivatives in the nonlinear parameters.
//!
//! Every loss is a mean of squared residuals in log space, so relative errors
//! count equally at every scale of the curve.

use crate::curve::LearningCurve;
use crate::error::{Error, Result};
use crate::models::{M1Params, M2Params, M3Params, M4Params};

fn check_eps_inf(curve: &LearningCurve, eps_inf: f64) -> Result<()> {
    let min_eps = curve.min_loss();
    if eps_inf >= min_eps {
        Err(Error::EpsInfTooLarge { eps_inf, min_eps })
    } else {
        Ok(())
    }
}

fn m4_residual(p: &M4Params, x: f64, eps: f64) -> f64 {
    let tail = if p.alpha == 0.0 { 0.0 } else { p.alpha * (p.eps0 - eps).ln() };
    (eps - p.eps_inf).ln() - tail - p.beta.ln() - p.c * x.ln()
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// `E[(log(eps - eps_inf) - alpha log(eps0 - eps) - log beta - c log x)^2]`.
///
/// `p.eps0` is used as given; fitters set it to the curve's random-guess loss.
pub fn loss_m4(curve: &LearningCurve, p: &M4Params) -> Result<f64> {
    check_eps_inf(curve, p.eps_inf)?;
    Ok(mean(curve.points().iter().map(|pt| m4_residual(p, pt.x, pt.eps).powi(2))))
}

/// M2 loss: the M4 loss with `alpha = 0`.
pub fn loss_m2(curve: &LearningCurve, p: &M2Params) -> Result<f64> {
    loss_m4(curve, &m2_as_m4(curve, p))
}

/// M1 loss: the M4 loss with `alpha = 0` and `eps_inf = 0`.
pub fn loss_m1(curve: &LearningCurve, p: &M1Params) -> Result<f64> {
    loss_m2(curve, &M2Params { eps_inf: 0.0, beta: p.beta, c: p.c })
}

/// `E[(log eps - log beta - c log(1/x + gamma))^2]`.
pub fn loss_m3(curve: &LearningCurve, p: &M3Params) -> Result<f64> {
    p.validate()?;
    Ok(mean(curve.points().iter().map(|pt| {
        (pt.eps.ln() - p.beta.ln() - p.c * (pt.x.recip() + p.gamma).ln()).powi(2)
    })))
}

/// `dL/d eps_inf` of [`loss_m4`] at fixed `(alpha, beta, c)`.
pub fn grad_eps_inf_m4(curve: &LearningCurve, p: &M4Params) -> Result<f64> {
    check_eps_inf(curve, p.eps_inf)?;
    Ok(mean(curve.points().iter().map(|pt| {
        2.0 * m4_residual(p, pt.x, pt.eps) * (-1.0 / (pt.eps - p.eps_inf))
    })))
}

pub fn grad_eps_inf_m2(curve: &LearningCurve, p: &M2Params) -> Result<f64> {
    grad_eps_inf_m4(curve, &m2_as_m4(curve, p))
}

/// `dL/d gamma` of [`loss_m3`] at fixed `(beta, c)`.
pub fn grad_gamma_m3(curve: &LearningCurve, p: &M3Params) -> Result<f64> {
    p.validate()?;
    Ok(mean(curve.points().iter().map(|pt| {
        let u = pt.x.recip() + p.gamma;
        let r = pt.eps.ln() - p.beta.ln() - p.c * u.ln();
        2.0 * r * (-p.c / u)
    })))
}

fn m2_as_m4(curve: &LearningCurve, p: &M2Params) -> M4Params {
    M4Params {
        eps0: curve.eps0(),
        eps_inf: p.eps_inf,
        alpha: 0.0,
        beta: p.beta,
        c: p.c,
    }
}
