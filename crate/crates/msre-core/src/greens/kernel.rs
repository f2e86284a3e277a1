//! The potential kernel `a(x) = lim_N Σ_{n≤N} (P⁰(X_n = 0) − P⁰(X_n = x))`.
//!
//! d = 1 is exact (`a(x) = |x|`). For d = 2 the return probabilities are
//! computed by iterated transition convolutions: in the rotated coordinates
//! `(x+y, x−y)` the two components of the planar walk are independent 1-d
//! walks, so `P_n(a,b) = p_n(a+b)·p_n(a−b)` with `p_n` evolved on a clipped
//! interval of radius `4√N`. Partial sums are parity-smoothed and
//! Richardson-extrapolated twice (the tail is `c₁/N + c₂/N² + …`), with the
//! successive-oscillation criterion guarding the truncation.

use alloc::vec;
use crate::error::{Error, Result};
use crate::math;

pub fn potential_kernel(d: usize, x: &[i64]) -> Result<f64> {
    match d {
        1 => {
            if x.len() != 1 {
                return Err(Error::Param("d = 1 takes one coordinate".into()));
            }
            Ok(x[0].abs() as f64)
        }
        2 => {
            if x.len() != 2 {
                return Err(Error::Param("d = 2 takes two coordinates".into()));
            }
            Ok(kernel_d2(x[0], x[1]))
        }
        _ => Err(Error::Param(format!("potential kernel unsupported for d = {d}"))),
    }
}

use alloc::format;

fn kernel_d2(a: i64, b: i64) -> f64 {
    if a == 0 && b == 0 {
        return 0.0;
    }
    let norm2 = (a * a + b * b) as f64;
    let mut n_max = 4096usize;
    while (n_max as f64) < 8.0 * norm2 {
        n_max *= 2;
    }
    // rotated targets
    let k1 = a + b;
    let k2 = a - b;

    let radius = (4.0 * math::sqrt(n_max as f64)) as i64 + 2;
    let width = (2 * radius + 1) as usize;
    let idx = |k: i64| -> usize { (k + radius) as usize };

    // 1-d SRW pmf from 0, evolved in place
    let mut p = vec![0.0f64; width];
    let mut q = vec![0.0f64; width];
    p[idx(0)] = 1.0;

    let mut partial = 0.0f64; // S_n
    let mut prev_t = 0.0f64; // T_{n−1}
    let mut snapshots = [0.0f64; 3]; // T at n_max/4, n_max/2, n_max
    let mut oscillation_ok = false;

    for n in 0..=n_max {
        if n > 0 {
            // evolve: p'_k = (p_{k−1} + p_{k+1})/2
            q[0] = 0.5 * p[1];
            q[width - 1] = 0.5 * p[width - 2];
            for k in 1..width - 1 {
                q[k] = 0.5 * (p[k - 1] + p[k + 1]);
            }
            core::mem::swap(&mut p, &mut q);
        }
        let p0 = p[idx(0)] * p[idx(0)];
        let px = p[idx(k1)] * p[idx(k2)];
        let prev_s = partial;
        partial += p0 - px;
        let t = 0.5 * (partial + prev_s); // parity smoothing
        if n == n_max / 4 {
            snapshots[0] = t;
        } else if n == n_max / 2 {
            snapshots[1] = t;
        } else if n == n_max {
            snapshots[2] = t;
            oscillation_ok = math::abs(t - prev_t) < 1e-4;
        }
        prev_t = t;
    }
    debug_assert!(oscillation_ok, "partial-sum oscillation above 1e-4 at N = {n_max}");
    // two Richardson levels for the c₁/N (+ c₂/N²) tail
    let a1 = 2.0 * snapshots[2] - snapshots[1];
    let a2 = 2.0 * snapshots[1] - snapshots[0];
    (4.0 * a1 - a2) / 3.0
}
