//! Statistical checks assembled from replica results: the scaling
//! relation, the d = 1 fluctuation sandwich, the limit-shape identity,
//! localization profiles, delocalization fractions and the concentration
//! bounds.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::fits::ExponentFit;
use super::{ExperimentConfig, ReplicaResult};
use crate::error::{Error, Result};
use crate::lattice::{BoundaryValues, BoxDomain};
use crate::math;
use crate::solvers::{verify_boundary_shift, EnergyModel, ExactSolver};
use crate::stats::{mean, median, ols_line, sample_std, stderr_mean};

// ---- scaling relation χ = 2ξ + d − 2 ---------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub d: usize,
    pub xi: f64,
    pub xi_stderr: f64,
    pub chi: f64,
    pub chi_stderr: f64,
    /// χ̂ − (2ξ̂ + d − 2)
    pub gap: f64,
    pub combined_stderr: f64,
    pub pass: bool,
}

pub fn check_scaling_relation(
    xi: &ExponentFit,
    chi: &ExponentFit,
    d: usize,
) -> Result<ScalingReport> {
    if xi.d != d || chi.d != d || xi.family != chi.family {
        return Err(Error::Config(
            "configuration mismatch: ξ and χ fits come from different model families".into(),
        ));
    }
    let gap = chi.slope - (2.0 * xi.slope + d as f64 - 2.0);
    let combined = math::sqrt(
        chi.slope_stderr * chi.slope_stderr + 4.0 * xi.slope_stderr * xi.slope_stderr,
    );
    let pass = math::abs(gap) <= (0.1f64).max(3.0 * combined);
    Ok(ScalingReport {
        d,
        xi: xi.slope,
        xi_stderr: xi.slope_stderr,
        chi: chi.slope,
        chi_stderr: chi.slope_stderr,
        gap,
        combined_stderr: combined,
        pass,
    })
}

// ---- d = 1 sandwich ---------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichSize {
    pub size: i64,
    pub std_ge: f64,
    /// max_j 2^{−j} (Ê M_{2^j})²
    pub lower_proxy: f64,
    /// Σ_j 2^{−j} (1 + √(Ê M_{2^j}⁴))
    pub upper_proxy: f64,
    /// fitted A = lower/std (0 when both vanish)
    pub a: f64,
    /// fitted B = std/upper
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub per_size: Vec<SandwichSize>,
    /// max/min of the fitted A over sizes (1 when degenerate)
    pub a_spread: f64,
    pub b_spread: f64,
    pub pass: bool,
}

pub fn check_d1_sandwich(
    config: &ExperimentConfig,
    results: &[ReplicaResult],
) -> Result<SandwichReport> {
    if config.d != 1 || !config.collect_band_maxima {
        return Err(Error::Config(
            "sandwich check needs d = 1 results with band maxima collected".into(),
        ));
    }
    let mut sizes: Vec<i64> = results.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut per_size = Vec::new();
    for l in sizes {
        let group: Vec<&ReplicaResult> = results.iter().filter(|r| r.size == l).collect();
        let nj = group
            .iter()
            .map(|r| r.band_maxima.len())
            .min()
            .ok_or_else(|| Error::Config("no results".into()))?;
        if nj == 0 {
            return Err(Error::Config(format!("band maxima missing at size {l}")));
        }
        let ge: Vec<f64> = group.iter().map(|r| r.ge).collect();
        let std_ge = sample_std(&ge);
        let mut lower: f64 = 0.0;
        let mut upper = 0.0;
        for j in 0..nj {
            let w = math::powf(2.0, -(j as f64));
            let m1 = mean(&group.iter().map(|r| r.band_maxima[j]).collect::<Vec<_>>());
            let m4 = mean(
                &group
                    .iter()
                    .map(|r| {
                        let m = r.band_maxima[j];
                        m * m * m * m
                    })
                    .collect::<Vec<_>>(),
            );
            lower = lower.max(w * m1 * m1);
            upper += w * (1.0 + math::sqrt(m4));
        }
        let a = if lower == 0.0 { 0.0 } else { lower / std_ge };
        let b = if std_ge == 0.0 { 0.0 } else { std_ge / upper };
        per_size.push(SandwichSize { size: l, std_ge, lower_proxy: lower, upper_proxy: upper, a, b });
    }
    let spread = |vals: Vec<f64>| -> f64 {
        let pos: Vec<f64> = vals.into_iter().filter(|&v| v > 0.0).collect();
        if pos.is_empty() {
            return 1.0; // degenerate: trivially consistent
        }
        let hi = pos.iter().cloned().fold(0.0f64, f64::max);
        let lo = pos.iter().cloned().fold(f64::INFINITY, f64::min);
        hi / lo
    };
    let a_spread = spread(per_size.iter().map(|s| s.a).collect());
    let b_spread = spread(per_size.iter().map(|s| s.b).collect());
    let pass = a_spread <= 2.0 && b_spread <= 2.0;
    Ok(SandwichReport { per_size, a_spread, b_spread, pass })
}

// ---- d = 1 limit shape -------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct LimitShapePoint {
    pub x: f64,
    pub mu_hat: f64,
    pub mu_stderr: f64,
    /// μ̂(x) − μ̂(0) − ½x²
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitShapeReport {
    pub sizes: Vec<i64>,
    pub points: Vec<LimitShapePoint>,
    /// largest per-replica boundary-shift identity residual
    pub max_identity_residual: f64,
    pub identity_scale: f64,
    pub identity_pass: bool,
    pub pass: bool,
}

/// Tilted-boundary runs on `I_L = {1,…,L−1}` with `τ_0 = 0, τ_L = x·L`.
///
/// Per replica the exact corollary residual is recorded; across replicas,
/// `μ̂(x) = Ê GE / L` is compared against `μ̂(0) + ½x²`. Slopes `x` must be
/// multiples of the grid step.
pub fn check_limit_shape_d1(
    config: &ExperimentConfig,
    xs: &[f64],
) -> Result<LimitShapeReport> {
    config.validate()?;
    if config.d != 1 || config.ncomp != 1 {
        return Err(Error::Config("limit shape check requires d = n = 1".into()));
    }
    // the largest two sizes carry the estimate
    let mut sizes = config.sizes.clone();
    sizes.sort_unstable();
    let sizes: Vec<i64> = sizes.into_iter().rev().take(2).rev().collect();

    let mut all_x = vec![0.0];
    all_x.extend_from_slice(xs);
    let mut mu: Vec<(f64, Vec<f64>)> = Vec::new(); // per x: GE/L samples
    let mut max_residual = 0.0f64;
    let mut identity_scale = 1.0f64;

    for (xi, &x) in all_x.iter().enumerate() {
        let mut samples = Vec::new();
        for &l in &sizes {
            let domain = BoxDomain::new(vec![1], vec![l - 1])?;
            // pin the step so the slope ladder can align with the grid
            let mut policy = config.grid;
            policy.step = Some(policy.step.unwrap_or(0.25));
            let grid = policy.build(&domain, config.lambda, 1)?;
            let r = x / grid.step;
            if math::abs(r - math::round(r)) > 1e-9 {
                return Err(Error::Precondition(format!(
                    "slope {x} is not a multiple of the grid step {}",
                    grid.step
                )));
            }
            for rep in 0..config.replicas {
                let seed = config
                    .replica_seed(l, rep)
                    .wrapping_add((xi as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let field = config.field_for(seed)?;
                let mut tau = BoundaryValues::new();
                tau.insert(vec![0], vec![0.0]);
                tau.insert(vec![l], vec![x * l as f64]);
                let model = EnergyModel::new(domain.clone(), field, config.lambda, tau)?;
                let rep_out = verify_boundary_shift(&model, &ExactSolver::Dp1d(grid.clone()))?;
                max_residual = max_residual.max(rep_out.ge_residual);
                identity_scale = identity_scale.max(math::abs(rep_out.ge_with_tau));
                samples.push(rep_out.ge_with_tau / l as f64);
            }
        }
        mu.push((x, samples));
    }

    let mu0 = mean(&mu[0].1);
    let se0 = stderr_mean(&mu[0].1);
    let mut points = Vec::new();
    for (x, samples) in &mu {
        let m = mean(samples);
        let se = stderr_mean(samples);
        let gap = m - mu0 - 0.5 * x * x;
        let tolerance = 0.05 * 0.5 * x * x + 3.0 * math::sqrt(se * se + se0 * se0);
        let pass = if *x == 0.0 { true } else { math::abs(gap) <= tolerance };
        points.push(LimitShapePoint { x: *x, mu_hat: m, mu_stderr: se, gap, tolerance, pass });
    }
    let identity_pass = max_residual <= 1e-9 * identity_scale;
    let pass = identity_pass && points.iter().all(|p| p.pass);
    Ok(LimitShapeReport {
        sizes,
        points,
        max_identity_residual: max_residual,
        identity_scale,
        identity_pass,
        pass,
    })
}

// ---- localization profile and delocalization fractions ----------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileBin {
    pub r: i64,
    pub mean_norm: f64,
    /// mean_norm / r^{(4−d)/4}
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileReport {
    pub per_size: Vec<(i64, Vec<ProfileBin>)>,
    /// per-size sup of the ratio over the upper half of bins: the
    /// empirical envelope constant at each size
    pub per_size_sup: Vec<(i64, f64)>,
    /// max/min of the per-size sups — the envelope constant must not
    /// drift across sizes
    pub sup_spread: f64,
    pub empty_bins: usize,
    pub pass: bool,
}

pub fn localization_profile(
    config: &ExperimentConfig,
    results: &[ReplicaResult],
) -> Result<ProfileReport> {
    let shape = (4.0 - config.d as f64) / 4.0;
    let mut sizes: Vec<i64> = results.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut per_size = Vec::new();
    let mut per_size_sup = Vec::new();
    let mut empty_bins = 0usize;
    for l in sizes {
        let mut acc: BTreeMap<i64, (f64, u64)> = BTreeMap::new();
        for r in results.iter().filter(|r| r.size == l) {
            for &(rv, s, c) in &r.profile {
                let e = acc.entry(rv).or_insert((0.0, 0));
                e.0 += s;
                e.1 += c;
            }
        }
        if acc.is_empty() {
            return Err(Error::Config("no profile data collected".into()));
        }
        let max_r = *acc.keys().max().unwrap();
        let mut bins = Vec::new();
        let mut sup: f64 = 0.0;
        for (rv, (s, c)) in acc {
            if c == 0 {
                empty_bins += 1;
                continue;
            }
            let m = s / c as f64;
            let ratio = m / math::powf(rv as f64, shape);
            if 2 * rv >= max_r {
                sup = sup.max(ratio);
            }
            bins.push(ProfileBin { r: rv, mean_norm: m, ratio });
        }
        per_size.push((l, bins));
        per_size_sup.push((l, sup));
    }
    let hi = per_size_sup.iter().map(|&(_, s)| s).fold(0.0f64, f64::max);
    let lo = per_size_sup.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
    let sup_spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    Ok(ProfileReport { per_size, per_size_sup, sup_spread, empty_bins, pass: sup_spread <= 1.5 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionReport {
    /// (h, mean fraction of vertices with ‖φ_v‖ ≥ h)
    pub per_h: Vec<(f64, f64)>,
    /// h* = ½·median(‖φ₀‖) over replicas at the largest size
    pub floor_h: f64,
    pub floor_fraction: f64,
    /// fraction at h* stays above 0.05 (asserted for d ≤ 3)
    pub pass: bool,
}

pub fn delocalization_fraction(
    config: &ExperimentConfig,
    results: &[ReplicaResult],
    h_ladder: &[f64],
) -> Result<FractionReport> {
    if results.iter().any(|r| r.norms.is_empty()) {
        return Err(Error::Config("delocalization fractions need collected norms".into()));
    }
    let fraction_at = |h: f64, rs: &[&ReplicaResult]| -> f64 {
        let each: Vec<f64> = rs
            .iter()
            .map(|r| {
                let below = r.norms.partition_point(|&x| x < h);
                (r.norms.len() - below) as f64 / r.norms.len() as f64
            })
            .collect();
        mean(&each)
    };
    let max_size = results.iter().map(|r| r.size).max().unwrap();
    let at_max: Vec<&ReplicaResult> = results.iter().filter(|r| r.size == max_size).collect();
    let centers: Vec<f64> = at_max.iter().map(|r| r.center_norm).collect();
    let floor_h = 0.5 * median(&centers);
    let floor_fraction = fraction_at(floor_h, &at_max);
    let per_h: Vec<(f64, f64)> = h_ladder.iter().map(|&h| (h, fraction_at(h, &at_max))).collect();
    let pass = config.d > 3 || floor_fraction >= 0.05;
    Ok(FractionReport { per_h, floor_h, floor_fraction, pass })
}

// ---- concentration -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub d: usize,
    /// slope of log Var(GE) against log |Λ|
    pub var_slope: f64,
    pub var_slope_stderr: f64,
    /// pooled frequency of |z| ≥ 2 and ≥ 3 for standardized GE
    pub exceed_2sigma: f64,
    pub exceed_3sigma: f64,
    /// slope of log(Ê‖∇φ‖²/|Λ|) against log L
    pub grad_slope: f64,
    pub pass: bool,
}

pub fn check_concentration(
    config: &ExperimentConfig,
    results: &[ReplicaResult],
) -> Result<ConcentrationReport> {
    let mut sizes: Vec<i64> = results.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(Error::Precondition("concentration check needs at least two sizes".into()));
    }
    let mut log_vol = Vec::new();
    let mut log_var = Vec::new();
    let mut log_l = Vec::new();
    let mut log_grad = Vec::new();
    let mut z2 = 0usize;
    let mut z3 = 0usize;
    let mut total = 0usize;
    for &l in &sizes {
        let group: Vec<&ReplicaResult> = results.iter().filter(|r| r.size == l).collect();
        let ge: Vec<f64> = group.iter().map(|r| r.ge).collect();
        let std = sample_std(&ge);
        if std <= 0.0 {
            return Err(Error::Precondition(format!("zero GE variance at size {l}")));
        }
        let vol = math::powf((2 * l + 1) as f64, config.d as f64);
        log_vol.push(math::ln(vol));
        log_var.push(2.0 * math::ln(std));
        let m = mean(&ge);
        for &g in &ge {
            let z = math::abs((g - m) / std);
            if z >= 2.0 {
                z2 += 1;
            }
            if z >= 3.0 {
                z3 += 1;
            }
            total += 1;
        }
        let grad: Vec<f64> = group.iter().map(|r| r.grad_norm2 / vol).collect();
        log_l.push(math::ln(l as f64));
        log_grad.push(math::ln(mean(&grad)));
    }
    let var_fit = ols_line(&log_vol, &log_var, &vec![0.0; log_vol.len()])?;
    let grad_fit = ols_line(&log_l, &log_grad, &vec![0.0; log_l.len()])?;
    let exceed_2sigma = z2 as f64 / total as f64;
    let exceed_3sigma = z3 as f64 / total as f64;
    let pass = var_fit.slope <= 1.1
        && exceed_2sigma <= 0.10
        && exceed_3sigma <= 0.02
        && grad_fit.slope <= 0.1;
    Ok(ConcentrationReport {
        d: config.d,
        var_slope: var_fit.slope,
        var_slope_stderr: var_fit.slope_stderr,
        exceed_2sigma,
        exceed_3sigma,
        grad_slope: grad_fit.slope,
        pass,
    })
}
