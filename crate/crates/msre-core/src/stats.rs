//! Small statistics toolbox: moments, two-sample KS, least squares,
//! jackknife. Everything is deterministic given its inputs.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by n).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (divides by n − 1).
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    math::sqrt(ss / (xs.len() - 1) as f64)
}

/// Standard error of the mean.
pub fn stderr_mean(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    sample_std(xs) / math::sqrt(xs.len() as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Two-sample Kolmogorov–Smirnov statistic. Sorts its inputs in place.
pub fn ks_two_sample(xs: &mut [f64], ys: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        d = d.max(math::abs(i as f64 / n as f64 - j as f64 / m as f64));
    }
    d.max(math::abs(1.0 - j as f64 / m as f64))
        .max(math::abs(i as f64 / n as f64 - 1.0))
}

/// Jackknife standard error of the sample standard deviation.
pub fn jackknife_std_stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 3 {
        return 0.0;
    }
    let mut leave_one: Vec<f64> = Vec::with_capacity(n);
    let sum: f64 = xs.iter().sum();
    let sum2: f64 = xs.iter().map(|&x| x * x).sum();
    for i in 0..n {
        let s = sum - xs[i];
        let s2 = sum2 - xs[i] * xs[i];
        let m = (n - 1) as f64;
        let var = (s2 - s * s / m) / (m - 1.0);
        leave_one.push(math::sqrt(var.max(0.0)));
    }
    let lm = mean(&leave_one);
    let ss: f64 = leave_one.iter().map(|&x| (x - lm) * (x - lm)).sum();
    math::sqrt(ss * (n - 1) as f64 / n as f64)
}

/// A weighted least-squares line fit `y ≈ a + b·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope propagated from per-point errors.
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on `(x, y)` with per-point standard errors of `y`
/// used only for the slope's standard error (delta method).
pub fn ols_line(xs: &[f64], ys: &[f64], y_errs: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n || y_errs.len() != n {
        return Err(Error::Precondition("need at least two points to fit a line".into()));
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return Err(Error::Precondition("degenerate fit: all x equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // Var(b) = Σ w_i² se_i² with w_i = (x_i − x̄)/Sxx
    let var_slope: f64 = (0..n)
        .map(|i| {
            let w = (xs[i] - mx) / sxx;
            w * w * y_errs[i] * y_errs[i]
        })
        .sum();
    let ss_res: f64 = (0..n)
        .map(|i| {
            let r = ys[i] - intercept - slope * xs[i];
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LineFit { slope, intercept, slope_stderr: math::sqrt(var_slope), r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ols_recovers_exact_line() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let ys = vec![3.0, 5.0, 7.0, 9.0];
        let es = vec![0.1; 4];
        let fit = ols_line(&xs, &ys, &es).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ols_rejects_single_point() {
        assert!(ols_line(&[1.0], &[2.0], &[0.1]).is_err());
    }

    #[test]
    fn ks_identical_samples_is_zero() {
        let mut a = vec![1.0, 2.0, 3.0, 4.0];
        let mut b = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample(&mut a, &mut b), 0.0);
        let mut c = vec![10.0, 11.0, 12.0];
        let mut d = vec![1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&mut c, &mut d), 1.0);
    }

    #[test]
    fn jackknife_scale() {
        // For N(0,1) data, se(std) ≈ 1/√(2n)
        let key = crate::rng::Key::new(5, crate::rng::Stream::Test);
        let xs: Vec<f64> = (0..4000).map(|i| key.normal(i)).collect();
        let se = jackknife_std_stderr(&xs);
        let expect = 1.0 / (2.0 * xs.len() as f64).sqrt();
        assert!((se - expect).abs() < 0.5 * expect, "se {se} vs {expect}");
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
