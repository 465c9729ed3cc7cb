//! Small dense least squares via modified Gram-Schmidt QR.

use crate::error::{Error, Result};

/// Columns whose residual norm after orthogonalisation falls below this
/// fraction of their original norm are treated as linearly dependent.
const RANK_TOL: f64 = 1e-10;

/// Least-squares coefficients for `targets ~ sum_j coef_j * columns[j]`.
///
/// Each column must have the same length as `targets`. Returns
/// [`Error::DegenerateDesign`] when the columns are (numerically) linearly
/// dependent or there are fewer rows than columns.
pub fn solve_least_squares(columns: &[Vec<f64>], targets: &[f64]) -> Result<Vec<f64>> {
    let n = targets.len();
    let k = columns.len();
    if k == 0 || n < k {
        return Err(Error::DegenerateDesign);
    }
    if let Some(col) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch(col.len(), n));
    }

    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0; k]; k];
    for (j, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        let original = norm(&v);
        if !original.is_finite() {
            return Err(Error::NonFinite("design matrix"));
        }
        // Two passes of MGS keep Q orthogonal to working precision.
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let proj = dot(qi, &v);
                r[i][j] += proj;
                axpy(-proj, qi, &mut v);
            }
        }
        let residual = norm(&v);
        if original == 0.0 || residual <= RANK_TOL * original {
            return Err(Error::DegenerateDesign);
        }
        r[j][j] = residual;
        v.iter_mut().for_each(|e| *e /= residual);
        q.push(v);
    }

    // Back substitution on R coef = Q^T targets.
    let qtb: Vec<f64> = q.iter().map(|qi| dot(qi, targets)).collect();
    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let tail: f64 = (i + 1..k).map(|j| r[i][j] * coef[j]).sum();
        coef[i] = (qtb[i] - tail) / r[i][i];
    }
    if coef.iter().all(|c| c.is_finite()) {
        Ok(coef)
    } else {
        Err(Error::NonFinite("least-squares coefficients"))
    }
}

/// Row-oriented form: each row is `(target, features)`.
pub fn solve_loglinear(rows: &[(f64, Vec<f64>)]) -> Result<Vec<f64>> {
    let k = rows.first().map_or(0, |(_, f)| f.len());
    let mut columns = vec![Vec::with_capacity(rows.len()); k];
    let mut targets = Vec::with_capacity(rows.len());
    for (t, features) in rows {
        if features.len() != k {
            return Err(Error::LengthMismatch(features.len(), k));
        }
        targets.push(*t);
        for (col, &f) in columns.iter_mut().zip(features) {
            col.push(f);
        }
    }
    solve_least_squares(&columns, &targets)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mse(rows: &[(f64, Vec<f64>)], coef: &[f64]) -> f64 {
        rows.iter()
            .map(|(t, f)| {
                let pred: f64 = f.iter().zip(coef).map(|(a, b)| a * b).sum();
                (t - pred).powi(2)
            })
            .sum::<f64>()
            / rows.len() as f64
    }

    #[test]
    fn exactly_determined() {
        // 2a + b = 5, a - b = 1  =>  a = 2, b = 1
        let rows = vec![(5.0, vec![2.0, 1.0]), (1.0, vec![1.0, -1.0])];
        let c = solve_loglinear(&rows).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-14 && (c[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn noisy_rows_match_grid_minimiser() {
        let rows: Vec<(f64, Vec<f64>)> = [(0.0, 0.13), (1.0, 0.92), (2.0, 2.11), (3.0, 2.95), (4.0, 4.07)]
            .iter()
            .map(|&(x, y)| (y, vec![1.0, x]))
            .collect();
        let c = solve_loglinear(&rows).unwrap();

        // Brute-force grid over [-0.5, 0.5] x [0.5, 1.5] at resolution 1e-3.
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=1000 {
            for j in 0..=1000 {
                let coef = [-0.5 + i as f64 * 1e-3, 0.5 + j as f64 * 1e-3];
                let l = mse(&rows, &coef);
                if l < best.0 {
                    best = (l, coef[0], coef[1]);
                }
            }
        }
        assert!((c[0] - best.1).abs() <= 1e-3, "{} vs {}", c[0], best.1);
        assert!((c[1] - best.2).abs() <= 1e-3, "{} vs {}", c[1], best.2);
    }

    #[test]
    fn perturbation_never_improves() {
        let rows: Vec<(f64, Vec<f64>)> = (1..=7)
            .map(|i| {
                let x = i as f64;
                (x.ln() * 0.3 + (i % 3) as f64 * 0.05, vec![1.0, x.ln(), (x + 2.0).ln()])
            })
            .collect();
        let c = solve_loglinear(&rows).unwrap();
        let base = mse(&rows, &c);
        for j in 0..3 {
            for h in [-1e-3, 1e-3] {
                let mut p = c.clone();
                p[j] += h;
                assert!(mse(&rows, &p) >= base);
            }
        }
    }

    #[test]
    fn collinear_features_are_degenerate() {
        let rows = vec![
            (1.0, vec![1.0, 2.0]),
            (2.0, vec![2.0, 4.0]),
            (3.0, vec![3.0, 6.0]),
        ];
        assert_eq!(solve_loglinear(&rows), Err(Error::DegenerateDesign));
        // All x equal: intercept and log x columns are parallel.
        let rows: Vec<_> = (0..4).map(|i| (i as f64, vec![1.0, 5f64.ln()])).collect();
        assert_eq!(solve_loglinear(&rows), Err(Error::DegenerateDesign));
    }

    #[test]
    fn underdetermined_is_degenerate() {
        let rows = vec![(1.0, vec![1.0, 2.0])];
        assert_eq!(solve_loglinear(&rows), Err(Error::DegenerateDesign));
    }
}
