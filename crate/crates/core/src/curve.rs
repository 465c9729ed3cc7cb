//! Learning curves: validated `(x, eps)` samples plus the random-guess loss.
//!
//! A [`LearningCurve`] always stores a *loss* (lower is better). Curves that
//! arrive as accuracies are converted at ingestion (see [`crate::harness`]).

use crate::error::{Error, Result};

/// One observation on a learning curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub eps: f64,
}

/// Ordered samples `(x, eps_x)` with `0 < eps_x < eps0` and strictly
/// increasing, positive `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    points: Vec<Point>,
    eps0: f64,
    name: String,
    metric: String,
}

impl LearningCurve {
    /// Minimum number of points on a standalone curve.
    pub const MIN_POINTS: usize = 2;

    pub fn new(
        points: Vec<(f64, f64)>,
        eps0: f64,
        name: impl Into<String>,
        metric: impl Into<String>,
    ) -> Result<Self> {
        let points = points.into_iter().map(|(x, eps)| Point { x, eps }).collect();
        Self::validated(points, eps0, name.into(), metric.into(), Self::MIN_POINTS)
    }

    /// Curve from bare `(x, eps)` pairs with an empty name and metric.
    pub fn from_pairs(points: &[(f64, f64)], eps0: f64) -> Result<Self> {
        Self::new(points.to_vec(), eps0, "", "")
    }

    fn validated(
        points: Vec<Point>,
        eps0: f64,
        name: String,
        metric: String,
        min_points: usize,
    ) -> Result<Self> {
        if !(eps0.is_finite() && eps0 > 0.0) {
            return Err(Error::InvalidEps0(eps0));
        }
        if points.len() < min_points {
            return Err(Error::TooFewPoints {
                required: min_points,
                got: points.len(),
            });
        }
        for (index, p) in points.iter().enumerate() {
            if !(p.x.is_finite() && p.x > 0.0) {
                return Err(Error::NonPositiveX { index, x: p.x });
            }
            if !(p.eps.is_finite() && p.eps > 0.0 && p.eps < eps0) {
                return Err(Error::LossOutOfRange {
                    index,
                    eps: p.eps,
                    eps0,
                });
            }
            if index > 0 {
                let prev = points[index - 1].x;
                if p.x == prev {
                    return Err(Error::DuplicateX { index, x: p.x });
                }
                if p.x < prev {
                    return Err(Error::UnorderedX { index, x: p.x });
                }
            }
        }
        Ok(LearningCurve {
            points,
            eps0,
            name,
            metric,
        })
    }

    fn with_points(&self, points: Vec<Point>, min_points: usize) -> Result<Self> {
        Self::validated(
            points,
            self.eps0,
            self.name.clone(),
            self.metric.clone(),
            min_points,
        )
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn metric(&self) -> &str {
        &self.metric
    }

    pub fn xs(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.x)
    }

    pub fn losses(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.eps)
    }

    pub fn min_loss(&self) -> f64 {
        self.losses().fold(f64::INFINITY, f64::min)
    }

    pub fn x_min(&self) -> f64 {
        self.points[0].x
    }

    pub fn x_max(&self) -> f64 {
        self.points[self.points.len() - 1].x
    }
}

/// A curve cut at `tau` into a fitting side and an extrapolation side.
///
/// `train` holds `x <= tau` and has at least two points; `holdout` holds
/// `x > tau` and may consist of a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSplit {
    pub train: LearningCurve,
    pub holdout: LearningCurve,
    pub tau: f64,
}

/// Restriction of the curve to `x >= tau`.
pub fn apply_cutoff(curve: &LearningCurve, tau: f64) -> Result<LearningCurve> {
    let kept: Vec<Point> = curve.points.iter().copied().filter(|p| p.x >= tau).collect();
    if kept.len() < LearningCurve::MIN_POINTS {
        return Err(Error::InsufficientAfterCutoff {
            tau,
            got: kept.len(),
        });
    }
    curve.with_points(kept, LearningCurve::MIN_POINTS)
}

/// Splits at `tau = x_max / 2`: train is `[0, tau]`, holdout is `(tau, 2 tau]`.
pub fn split_for_extrapolation(curve: &LearningCurve) -> Result<CurveSplit> {
    let tau = curve.x_max() / 2.0;
    let (train, holdout): (Vec<Point>, Vec<Point>) =
        curve.points.iter().partition(|p| p.x <= tau);
    if holdout.is_empty() {
        return Err(Error::EmptySplit {
            side: "holdout",
            tau,
        });
    }
    if train.len() < LearningCurve::MIN_POINTS {
        return Err(match train.len() {
            0 => Error::EmptySplit { side: "train", tau },
            got => Error::TooFewPoints {
                required: LearningCurve::MIN_POINTS,
                got,
            },
        });
    }
    Ok(CurveSplit {
        train: curve.with_points(train, LearningCurve::MIN_POINTS)?,
        holdout: curve.with_points(holdout, 1)?,
        tau,
    })
}

/// Prefix of the curve up to and including the first global minimum of the loss.
///
/// Used when a curve overfits: points before the peak count as
/// "bootstrapped examples". The result may have a single point; callers that
/// need a fittable curve validate its length.
pub fn truncate_at_peak(curve: &LearningCurve) -> LearningCurve {
    let mut best = 0;
    for (i, p) in curve.points.iter().enumerate() {
        if p.eps < curve.points[best].eps {
            best = i;
        }
    }
    LearningCurve {
        points: curve.points[..=best].to_vec(),
        eps0: curve.eps0,
        name: curve.name.clone(),
        metric: curve.metric.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(xs: &[f64], eps: &[f64]) -> LearningCurve {
        let pts = xs.iter().copied().zip(eps.iter().copied()).collect();
        LearningCurve::new(pts, 1.0, "t", "loss").unwrap()
    }

    fn xs_of(c: &LearningCurve) -> Vec<f64> {
        c.xs().collect()
    }

    #[test]
    fn cutoff_keeps_points_at_or_above_tau() {
        let c = curve(&[1.0, 2.0, 4.0, 8.0], &[0.5, 0.4, 0.3, 0.2]);
        assert_eq!(xs_of(&apply_cutoff(&c, 3.0).unwrap()), vec![4.0, 8.0]);
        assert_eq!(apply_cutoff(&c, 0.0).unwrap(), c);
        assert_eq!(xs_of(&apply_cutoff(&c, 4.0).unwrap()), vec![4.0, 8.0]);
    }

    #[test]
    fn cutoff_with_one_survivor_fails() {
        let c = curve(&[1.0, 2.0, 4.0, 8.0], &[0.5, 0.4, 0.3, 0.2]);
        assert!(matches!(
            apply_cutoff(&c, 5.0),
            Err(Error::InsufficientAfterCutoff { got: 1, .. })
        ));
    }

    #[test]
    fn split_linear_grid() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let eps: Vec<f64> = xs.iter().map(|x| 0.5 / x).collect();
        let s = split_for_extrapolation(&curve(&xs, &eps)).unwrap();
        assert_eq!(s.tau, 5.0);
        assert_eq!(xs_of(&s.train), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(xs_of(&s.holdout), vec![6.0, 7.0, 8.0, 9.0, 10.0]);
    }

    #[test]
    fn split_geometric_grid() {
        let xs: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
        let eps: Vec<f64> = xs.iter().map(|x| 0.9 * x.powf(-0.3)).collect();
        let s = split_for_extrapolation(&curve(&xs, &eps)).unwrap();
        assert_eq!(s.tau, 512.0);
        assert_eq!(s.train.len(), 10);
        assert_eq!(xs_of(&s.holdout), vec![1024.0]);
    }

    #[test]
    fn split_two_points_is_rejected() {
        let c = curve(&[1.0, 2.0], &[0.5, 0.4]);
        assert!(split_for_extrapolation(&c).is_err());
    }

    #[test]
    fn peak_truncation() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let c = curve(&xs, &[0.9, 0.5, 0.3, 0.4, 0.6]);
        assert_eq!(truncate_at_peak(&c).len(), 3);

        let mono = curve(&xs, &[0.9, 0.8, 0.7, 0.6, 0.5]);
        assert_eq!(truncate_at_peak(&mono), mono);

        let tied = curve(&xs, &[0.9, 0.3, 0.5, 0.3, 0.6]);
        assert_eq!(truncate_at_peak(&tied).len(), 2);
    }

    #[test]
    fn construction_rejects_bad_curves() {
        let e = LearningCurve::from_pairs(&[(1.0, 0.5), (1.0, 0.4)], 1.0);
        assert!(matches!(e, Err(Error::DuplicateX { index: 1, .. })));
        let e = LearningCurve::from_pairs(&[(2.0, 0.5), (1.0, 0.4)], 1.0);
        assert!(matches!(e, Err(Error::UnorderedX { .. })));
        let e = LearningCurve::from_pairs(&[(0.0, 0.5), (1.0, 0.4)], 1.0);
        assert!(matches!(e, Err(Error::NonPositiveX { .. })));
        let e = LearningCurve::from_pairs(&[(1.0, 1.0), (2.0, 0.4)], 1.0);
        assert!(matches!(e, Err(Error::LossOutOfRange { index: 0, .. })));
        let e = LearningCurve::from_pairs(&[(1.0, 0.5)], 1.0);
        assert!(matches!(e, Err(Error::TooFewPoints { .. })));
    }
}
