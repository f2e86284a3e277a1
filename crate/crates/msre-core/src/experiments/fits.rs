//! Exponent estimation: log–log least squares over per-size statistics.

use alloc::format;
use alloc::vec::Vec;

use super::{ExperimentConfig, ReplicaResult};
use crate::error::{Error, Result};
use crate::math;
use crate::stats::{jackknife_std_stderr, mean, ols_line, sample_std, stderr_mean};

#[derive(Debug, Clone, PartialEq)]
pub struct SizeStat {
    pub size: i64,
    /// the per-size statistic (mean height or std of GE)
    pub value: f64,
    pub stderr: f64,
    pub replicas: usize,
}

/// A log–log regression result.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub per_size: Vec<SizeStat>,
    /// sizes actually used (after the fit floor)
    pub window: (i64, i64),
    pub d: usize,
    pub family: u64,
}

fn group_sizes(results: &[ReplicaResult]) -> Vec<(i64, Vec<&ReplicaResult>)> {
    let mut sizes: Vec<i64> = results.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|l| {
            let mut group: Vec<&ReplicaResult> =
                results.iter().filter(|r| r.size == l).collect();
            group.sort_by_key(|r| r.replica);
            (l, group)
        })
        .collect()
}

fn fit_loglog(config: &ExperimentConfig, stats: Vec<SizeStat>) -> Result<ExponentFit> {
    let kept: Vec<&SizeStat> = stats.iter().filter(|s| s.size >= config.fit_floor).collect();
    if kept.len() < 2 {
        return Err(Error::Precondition(format!(
            "need at least two sizes ≥ fit floor {} for a fit, have {}",
            config.fit_floor,
            kept.len()
        )));
    }
    for s in &kept {
        if !(s.value > 0.0) {
            return Err(Error::Precondition(format!(
                "non-positive statistic {} at size {}; cannot take logs",
                s.value, s.size
            )));
        }
    }
    let xs: Vec<f64> = kept.iter().map(|s| math::ln(s.size as f64)).collect();
    let ys: Vec<f64> = kept.iter().map(|s| math::ln(s.value)).collect();
    // delta method: se(log v) = se(v)/v
    let es: Vec<f64> = kept.iter().map(|s| s.stderr / s.value).collect();
    let line = ols_line(&xs, &ys, &es)?;
    Ok(ExponentFit {
        slope: line.slope,
        intercept: line.intercept,
        slope_stderr: line.slope_stderr,
        r_squared: line.r_squared,
        window: (kept.first().unwrap().size, kept.last().unwrap().size),
        per_size: stats,
        d: config.d,
        family: config.family_fingerprint(),
    })
}

/// Transversal fluctuation exponent ξ̂: slope of `log E|φ₀·e|` (or
/// `log E‖φ₀‖` with `use_norm`) against `log L`.
pub fn estimate_transversal(
    config: &ExperimentConfig,
    results: &[ReplicaResult],
    use_norm: bool,
) -> Result<ExponentFit> {
    let groups = group_sizes(results);
    if groups.iter().any(|(_, g)| g.len() < 30) {
        return Err(Error::Precondition(
            "transversal fit needs at least 30 replicas per size".into(),
        ));
    }
    let stats = groups
        .into_iter()
        .map(|(l, g)| {
            let vals: Vec<f64> =
                g.iter().map(|r| if use_norm { r.center_norm } else { r.center_abs_e }).collect();
            SizeStat { size: l, value: mean(&vals), stderr: stderr_mean(&vals), replicas: vals.len() }
        })
        .collect();
    fit_loglog(config, stats)
}

/// Energy fluctuation exponent χ̂: slope of `log std(GE)` against `log L`,
/// with jackknife standard errors.
pub fn estimate_energy_fluct(
    config: &ExperimentConfig,
    results: &[ReplicaResult],
) -> Result<ExponentFit> {
    let groups = group_sizes(results);
    if groups.iter().any(|(_, g)| g.len() < 30) {
        return Err(Error::Precondition(
            "energy-fluctuation fit needs at least 30 replicas per size".into(),
        ));
    }
    let stats = groups
        .into_iter()
        .map(|(l, g)| {
            let ge: Vec<f64> = g.iter().map(|r| r.ge).collect();
            SizeStat {
                size: l,
                value: sample_std(&ge),
                stderr: jackknife_std_stderr(&ge),
                replicas: ge.len(),
            }
        })
        .collect();
    fit_loglog(config, stats)
}
