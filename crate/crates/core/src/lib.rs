//! Scaling-law estimation from learning curves.
//!
//! Four function classes (M1 to M4) are fitted to a learning curve by
//! minimising a square-log loss with block coordinate descent, and compared
//! by how well they *extrapolate* to larger `x` rather than by how well they
//! fit the points they were trained on.
//!
//! ```
//! use scaling_laws::prelude::*;
//!
//! let truth = M4Params { eps0: 1.0, eps_inf: 0.1, alpha: 1.0, beta: 2.0, c: -0.5 };
//! let points: Vec<(f64, f64)> = (0..12)
//!     .map(|k| {
//!         let x = 2f64.powi(k);
//!         (x, predict_m4(&truth, x).unwrap())
//!     })
//!     .collect();
//! let curve = LearningCurve::from_pairs(&points, 1.0).unwrap();
//! let split = split_for_extrapolation(&curve).unwrap();
//! let report = evaluate_task(&split, &FitConfig::default(), &ModelKind::MAIN, &TieTolerance::default());
//! assert!(report.winners.contains(&ModelKind::M4));
//! ```

pub mod curve;
pub mod error;
pub mod evaluation;
pub mod fitting;
pub mod harness;
pub mod models;
pub mod synthetic;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::curve::{apply_cutoff, split_for_extrapolation, truncate_at_peak, CurveSplit, LearningCurve};
    pub use crate::error::{Error, Result};
    pub use crate::evaluation::{evaluate_task, extrapolation_rmse, rank_methods, ExtrapolationReport, RankSummary, TieTolerance};
    pub use crate::fitting::{fit, fit_m1, fit_m2, fit_m3, fit_m4, FitConfig, FitResult};
    pub use crate::models::{
        m4_asymptotic_excess, predict_m1, predict_m2, predict_m3, predict_m4, M1Params, M2Params,
        M3Params, M4Params, ModelKind, ModelParams,
    };
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/fitting.md")]
    mod fitting {}
    #[doc = include_str!("../../../book/src/extrapolation.md")]
    mod extrapolation {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
