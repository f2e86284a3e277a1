//! Matrix-free linear solves for the Dirichlet Laplacian.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Conjugate gradients for an SPD operator given as `apply(x, y)` (`y = Ax`).
///
/// Runs until `‖b − Ax‖∞ ≤ tol` or `max_iter` iterations, whichever first;
/// non-convergence is an error carrying the final residual.
pub fn cg_solve<F>(apply: F, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];

    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
    let mut rr: f64 = r.iter().map(|&t| t * t).sum();
    if inf_norm(&r) <= tol {
        return Ok(x);
    }

    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(&a, &b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Solver("operator is not positive definite".into()));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if inf_norm(&r) <= tol {
            return Ok(x);
        }
        let rr_new: f64 = r.iter().map(|&t| t * t).sum();
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    // One exact-residual check before giving up: recompute r = b − Ax.
    apply(&x, &mut ap);
    for i in 0..n {
        r[i] = b[i] - ap[i];
    }
    let res = inf_norm(&r);
    if res <= tol {
        Ok(x)
    } else {
        Err(Error::Solver(format!(
            "conjugate gradients did not converge: residual {res:.3e} > {tol:.3e} after {max_iter} iterations"
        )))
    }
}

/// Direct solve of `(−Δ)x = b` on a path with zero Dirichlet ends:
/// the tridiagonal system with diagonal 2 and off-diagonals −1.
///
/// Thomas algorithm; residuals are at machine precision, which the
/// deterministic identity checks in d = 1 rely on.
pub fn tridiag_neg_laplace_solve(b: &[f64]) -> Vec<f64> {
    let n = b.len();
    if n == 0 {
        return Vec::new();
    }
    let mut diag = vec![2.0f64; n];
    let mut rhs = b.to_vec();
    // forward elimination; sub- and super-diagonals are −1
    for i in 1..n {
        let f = -1.0 / diag[i - 1];
        diag[i] += f; // 2 − 1/diag[i−1]
        rhs[i] -= f * rhs[i - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (rhs[i] + x[i + 1]) / diag[i];
    }
    x
}
