//! Test-only reference implementations, written without the library's
//! solvers: normal equations with Gaussian elimination, grid searches that
//! zoom in on the best cell, and central finite differences.

#![allow(dead_code)]

/// Solves `min ||X b - y||` through `X^T X b = X^T y` with partial pivoting.
pub fn normal_equations(columns: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = columns.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = columns[i].iter().zip(&columns[j]).map(|(p, q)| p * q).sum();
        }
        a[i][k] = columns[i].iter().zip(y).map(|(p, q)| p * q).sum();
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        a.swap(col, pivot);
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            for c in col..=k {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut b = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| a[r][c] * b[c]).sum();
        b[r] = (a[r][k] - s) / a[r][r];
    }
    b
}

fn residual_mse(columns: &[Vec<f64>], y: &[f64], b: &[f64]) -> f64 {
    let n = y.len();
    (0..n)
        .map(|i| {
            let fit: f64 = columns.iter().zip(b).map(|(col, bj)| col[i] * bj).sum();
            (y[i] - fit).powi(2)
        })
        .sum::<f64>()
        / n as f64
}

/// Minimises a one-dimensional function on `[lo, hi]` by repeated grid
/// refinement around the best cell.
pub fn zoom_grid(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    const CELLS: usize = 400;
    let mut best = lo;
    for _ in 0..8 {
        let step = (hi - lo) / CELLS as f64;
        let mut best_val = f64::INFINITY;
        for i in 0..=CELLS {
            let t = lo + step * i as f64;
            let v = f(t);
            if v < best_val {
                best_val = v;
                best = t;
            }
        }
        let (l, h) = ((best - step).max(lo), (best + step).min(hi));
        lo = l;
        hi = h;
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub struct ExcessOracle {
    pub eps_inf: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub loss: f64,
}

/// Closed-form `(alpha, log beta, c)` for one `eps_inf`, with `alpha`
/// projected onto `alpha >= 0` by dropping its column.
pub fn excess_block(points: &[(f64, f64)], eps0: f64, eps_inf: f64, free_alpha: bool) -> ExcessOracle {
    let y: Vec<f64> = points.iter().map(|&(_, e)| (e - eps_inf).ln()).collect();
    let ones = vec![1.0; points.len()];
    let lx: Vec<f64> = points.iter().map(|&(x, _)| x.ln()).collect();
    if free_alpha {
        let gap: Vec<f64> = points.iter().map(|&(_, e)| (eps0 - e).ln()).collect();
        let cols = [gap, ones.clone(), lx.clone()];
        let b = normal_equations(&cols, &y);
        if b[0] >= 0.0 {
            return ExcessOracle {
                eps_inf,
                alpha: b[0],
                beta: b[1].exp(),
                c: b[2],
                loss: residual_mse(&cols, &y, &b),
            };
        }
    }
    let cols = [ones, lx];
    let b = normal_equations(&cols, &y);
    ExcessOracle {
        eps_inf,
        alpha: 0.0,
        beta: b[0].exp(),
        c: b[1],
        loss: residual_mse(&cols, &y, &b),
    }
}

/// Global grid search over `eps_inf` in `[0, min eps)` for M2 (`free_alpha`
/// false) or M4.
pub fn grid_fit_excess(points: &[(f64, f64)], eps0: f64, free_alpha: bool) -> ExcessOracle {
    let min_eps = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = min_eps * (1.0 - 1e-9);
    let t = zoom_grid(0.0, hi, |t| excess_block(points, eps0, t, free_alpha).loss);
    excess_block(points, eps0, t, free_alpha)
}

#[derive(Debug, Clone, Copy)]
pub struct M3Oracle {
    pub beta: f64,
    pub c: f64,
    pub gamma: f64,
    pub loss: f64,
}

pub fn m3_block(points: &[(f64, f64)], gamma: f64) -> M3Oracle {
    let y: Vec<f64> = points.iter().map(|&(_, e)| e.ln()).collect();
    let cols = [vec![1.0; points.len()], points.iter().map(|&(x, _)| (x.recip() + gamma).ln()).collect()];
    let b = normal_equations(&cols, &y);
    M3Oracle {
        beta: b[0].exp(),
        c: b[1],
        gamma,
        loss: residual_mse(&cols, &y, &b),
    }
}

/// Grid search over `gamma` in `[0, gamma_max]`.
pub fn grid_fit_m3(points: &[(f64, f64)], gamma_max: f64) -> M3Oracle {
    let g = zoom_grid(0.0, gamma_max, |g| m3_block(points, g).loss);
    m3_block(points, g)
}

/// Central difference with step `h`.
pub fn central_difference(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
