//! Restarted GMRES with modified Gram-Schmidt and Givens rotations.
//!
//! All inner products run sequentially in index order, so the iterates do
//! not depend on thread scheduling inside the operator.

use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Result of a converged solve.
#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Final `‖b − A x‖ / ‖b‖`.
    pub relative_residual: f64,
}

/// Solves `A x = b` from `x = 0` until the relative residual drops to `tol`.
pub fn gmres(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    restart: usize,
    tol: f64,
    max_iterations: usize,
) -> Result<GmresOutcome> {
    let dim = b.len();
    let b_norm = norm(b);
    let mut x = vec![0.0; dim];
    if b_norm == 0.0 {
        return Ok(GmresOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let restart = restart.max(1).min(dim.max(1));
    let mut iterations = 0;
    let mut r: Vec<f64> = b.to_vec();
    let mut beta = b_norm;
    loop {
        if beta / b_norm <= tol {
            return Ok(GmresOutcome {
                solution: x,
                iterations,
                relative_residual: beta / b_norm,
            });
        }
        if iterations >= max_iterations {
            return Err(Error::LinearSolve {
                iterations,
                residual: beta / b_norm,
            });
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut used = 0;
        for j in 0..restart {
            let mut w = apply(&basis[j]);
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let wn = norm(&w);
            h[j + 1][j] = wn;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h[j + 1][j]);
            if denom == 0.0 {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = h[j][j] / denom;
                sn[j] = h[j + 1][j] / denom;
            }
            h[j][j] = denom;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            iterations += 1;
            used = j + 1;
            let converged = g[j + 1].abs() / b_norm <= tol;
            if converged || wn == 0.0 || iterations >= max_iterations {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        // Back substitution on the triangular least-squares system.
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let s: f64 = (i + 1..used).map(|k| h[i][k] * y[k]).sum();
            y[i] = if h[i][i] != 0.0 { (g[i] - s) / h[i][i] } else { 0.0 };
        }
        for (k, yk) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[k]) {
                *xi += yk * vi;
            }
        }
        let ax = apply(&x);
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let new_beta = norm(&r);
        if new_beta >= beta && used < restart && new_beta / b_norm > tol {
            // Lucky breakdown that did not reach the tolerance: no progress possible.
            return Err(Error::LinearSolve {
                iterations,
                residual: new_beta / b_norm,
            });
        }
        beta = new_beta;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_nonsymmetric_system() {
        let a = [[4.0, 1.0, 0.0], [2.0, 5.0, 1.0], [0.0, -1.0, 3.0]];
        let x_true = [1.0, -2.0, 0.5];
        let b: Vec<f64> = a.iter().map(|row| dot(row, &x_true)).collect();
        let apply = |x: &[f64]| a.iter().map(|row| dot(row, x)).collect::<Vec<f64>>();
        let out = gmres(apply, &b, 2, 1e-12, 100).unwrap();
        for (x, t) in out.solution.iter().zip(&x_true) {
            assert!((x - t).abs() < 1e-10);
        }
        assert!(out.relative_residual <= 1e-12);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let out = gmres(|x: &[f64]| x.to_vec(), &[0.0; 4], 3, 1e-10, 10).unwrap();
        assert_eq!(out.solution, vec![0.0; 4]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn singular_operator_reports_failure() {
        let apply = |x: &[f64]| vec![x[0], 0.0];
        let err = gmres(apply, &[1.0, 1.0], 2, 1e-10, 20).unwrap_err();
        assert_eq!(err.reason_code(), "linear-solve");
    }
}
