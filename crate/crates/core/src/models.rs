//! The scaling-law function classes and their forward predictions.
//!
//! | class | form |
//! |-------|------|
//! | M1 | `eps = beta * x^c` |
//! | M2 | `eps = eps_inf + beta * x^c` |
//! | M3 | `eps = beta * (1/x + gamma)^c` |
//! | M4 | `(eps - eps_inf) / (eps0 - eps)^alpha = beta * x^c` |
//!
//! For M3 the stored `c` is the coefficient on `log(1/x + gamma)`, so with
//! `gamma = 0` the curve decays like `x^(-c)` and the scaling exponent is
//! `-c` (see [`ModelParams::scaling_exponent`]).
//!
//! M4 is implicit in `eps`; [`predict_m4`] inverts it by bisection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies a function class (plus the M4 ablation without `alpha`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    M1,
    M2,
    M3,
    M4,
    #[serde(rename = "M4-no-alpha")]
    M4NoAlpha,
}

impl ModelKind {
    /// The four main estimators in table order.
    pub const MAIN: [ModelKind; 4] = [ModelKind::M1, ModelKind::M2, ModelKind::M3, ModelKind::M4];
    pub const ALL: [ModelKind; 5] = [
        ModelKind::M1,
        ModelKind::M2,
        ModelKind::M3,
        ModelKind::M4,
        ModelKind::M4NoAlpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::M1 => "M1",
            ModelKind::M2 => "M2",
            ModelKind::M3 => "M3",
            ModelKind::M4 => "M4",
            ModelKind::M4NoAlpha => "M4-no-alpha",
        }
    }

    /// Fewest training points the corresponding fitter accepts.
    pub fn min_points(self) -> usize {
        match self {
            ModelKind::M1 => 2,
            ModelKind::M2 | ModelKind::M3 | ModelKind::M4NoAlpha => 3,
            ModelKind::M4 => 4,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m1" => Ok(ModelKind::M1),
            "m2" => Ok(ModelKind::M2),
            "m3" => Ok(ModelKind::M3),
            "m4" => Ok(ModelKind::M4),
            "m4-no-alpha" | "m4-noalpha" | "m4_no_alpha" => Ok(ModelKind::M4NoAlpha),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M1Params {
    pub beta: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M2Params {
    pub eps_inf: f64,
    pub beta: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M3Params {
    pub beta: f64,
    pub c: f64,
    pub gamma: f64,
}

/// M4 parameters. `eps0` is the fixed random-guess loss, never fitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M4Params {
    pub eps0: f64,
    pub eps_inf: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            name: "beta",
            value: beta,
            reason: "must be finite and positive",
        })
    }
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            name,
            value: v,
            reason: "must be finite and nonnegative",
        })
    }
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            name,
            value: v,
            reason: "must be finite",
        })
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            name: "x",
            value: x,
            reason: "must be finite and positive",
        })
    }
}

impl M1Params {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        check_finite("c", self.c)
    }
}

impl M2Params {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        check_finite("c", self.c)?;
        check_nonneg("eps_inf", self.eps_inf)
    }
}

impl M3Params {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        check_finite("c", self.c)?;
        check_nonneg("gamma", self.gamma)
    }
}

impl M4Params {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        check_finite("c", self.c)?;
        check_nonneg("alpha", self.alpha)?;
        check_nonneg("eps_inf", self.eps_inf)?;
        if !(self.eps0.is_finite() && self.eps0 > self.eps_inf) {
            return Err(Error::InvalidParam {
                name: "eps0",
                value: self.eps0,
                reason: "must be finite and exceed eps_inf",
            });
        }
        Ok(())
    }

    /// `beta * x^c`, the right-hand side of the implicit M4 equation.
    pub fn power_term(&self, x: f64) -> f64 {
        self.beta * x.powf(self.c)
    }
}

pub fn predict_m1(p: &M1Params, x: f64) -> f64 {
    p.beta * x.powf(p.c)
}

pub fn predict_m2(p: &M2Params, x: f64) -> f64 {
    p.eps_inf + p.beta * x.powf(p.c)
}

pub fn predict_m3(p: &M3Params, x: f64) -> f64 {
    p.beta * (x.recip() + p.gamma).powf(p.c)
}

const BISECTION_MAX_ITERS: usize = 200;

/// Solves `(eps - eps_inf) / (eps0 - eps)^alpha = beta * x^c` for `eps`.
///
/// The left-hand side is strictly increasing on `(eps_inf, eps0)` and sweeps
/// `(0, inf)`, so the root is unique. Bisection runs on the excess
/// `e = eps - eps_inf` until the bracket collapses to adjacent floats, which is
/// far below a `1e-12` tolerance and keeps small excesses relatively precise.
/// `alpha = 0` is the closed-form M2 prediction.
pub fn predict_m4(p: &M4Params, x: f64) -> Result<f64> {
    check_x(x)?;
    p.validate()?;
    let target = p.power_term(x);
    if !target.is_finite() {
        return Err(Error::NonFinite("beta * x^c"));
    }
    if p.alpha == 0.0 {
        return Ok(p.eps_inf + target);
    }
    let span = p.eps0 - p.eps_inf;
    let margin = 1e-15 * span;
    let log_target = target.ln();
    // h(e) = ln e - alpha ln(span - e) - ln target, increasing in e.
    let h = |e: f64| e.ln() - p.alpha * (span - e).ln() - log_target;

    let (mut lo, mut hi) = (margin, span - margin);
    if h(lo) >= 0.0 {
        return Ok(p.eps_inf + lo);
    }
    if h(hi) <= 0.0 {
        return Ok(p.eps_inf + hi);
    }
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(p.eps_inf + 0.5 * (lo + hi))
}

/// Two-term large-`x` expansion of the M4 excess loss `eps - eps_inf`:
/// `D^alpha t - alpha D^(2 alpha - 1) t^2` with `D = eps0 - eps_inf`,
/// `t = beta x^c`.
pub fn m4_asymptotic_excess(p: &M4Params, x: f64) -> Result<f64> {
    check_x(x)?;
    check_nonneg("alpha", p.alpha)?;
    let t = p.power_term(x);
    if p.alpha == 0.0 {
        return Ok(t);
    }
    let span = p.eps0 - p.eps_inf;
    if span == 0.0 && 2.0 * p.alpha - 1.0 < 0.0 {
        return Err(Error::SingularExpansion);
    }
    Ok(span.powf(p.alpha) * t - p.alpha * span.powf(2.0 * p.alpha - 1.0) * t * t)
}

/// Fitted parameters of any function class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelParams {
    M1(M1Params),
    M2(M2Params),
    M3(M3Params),
    M4(M4Params),
}

impl ModelParams {
    pub fn predict(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        let y = match self {
            ModelParams::M1(p) => predict_m1(p, x),
            ModelParams::M2(p) => predict_m2(p, x),
            ModelParams::M3(p) => predict_m3(p, x),
            ModelParams::M4(p) => return predict_m4(p, x),
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite("prediction"))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::M1(p) => p.validate(),
            ModelParams::M2(p) => p.validate(),
            ModelParams::M3(p) => p.validate(),
            ModelParams::M4(p) => p.validate(),
        }
    }

    /// Power-law exponent of the excess loss (the log-log slope for large `x`).
    ///
    /// For M3 this is the negated stored coefficient.
    pub fn scaling_exponent(&self) -> f64 {
        match self {
            ModelParams::M1(p) => p.c,
            ModelParams::M2(p) => p.c,
            ModelParams::M3(p) => -p.c,
            ModelParams::M4(p) => p.c,
        }
    }

    /// Irreducible loss, where the class has one.
    pub fn eps_inf(&self) -> Option<f64> {
        match self {
            ModelParams::M2(p) => Some(p.eps_inf),
            ModelParams::M4(p) => Some(p.eps_inf),
            _ => None,
        }
    }
}
