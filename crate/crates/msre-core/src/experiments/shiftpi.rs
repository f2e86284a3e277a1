//! The shift function π: equal to 1 on the inner cube
//! `Λ_L⁻ = Λ_{⌈(1−ε/2d)L⌉}`, supported in `Λ_L`, with `Δπ = O(1/L²)` and
//! `‖∇π‖² = O(L^{d−2})`.
//!
//! π is a product of per-axis lattice ramps, `π_v = Π_i R(|v_i|)`: R is 1
//! through the plateau, then descends to 0 over a band of M steps whose
//! increments follow a triangle profile — the discrete quadratic spline —
//! so every second difference of R has the same magnitude `1/Σt(M)`.
//! The band width is chosen to hold `max|Δπ|·L²` near one target value
//! across sizes (subject to the margin cap from `Λ_L⁻`), which keeps the
//! reported constants comparable along a size ladder even where a
//! continuum profile sampled at `v/L` would be far from resolved.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{dirichlet_norm2, laplacian, BoxDomain, Surface};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftPiReport {
    pub l: i64,
    pub d: usize,
    pub epsilon: f64,
    /// π vanishes outside Λ_L (the zero extension is genuine)
    pub support_ok: bool,
    /// min of π over Λ_L⁻ (must be ≥ 1)
    pub min_on_inner: f64,
    /// max_v |Δπ_v| · L²
    pub max_laplacian_scaled: f64,
    /// ‖∇π‖² / L^{d−2}
    pub energy_scaled: f64,
    /// descent band width in lattice steps
    pub band_steps: usize,
}

/// Per-axis ramp heights over the band: `heights[m]` is the value at
/// `|v| = plateau_edge + m`, descending from 1 to (close to) 0 with
/// triangle-profile increments.
fn ramp_heights(m_steps: usize) -> Vec<f64> {
    let t: Vec<f64> =
        (0..m_steps).map(|i| ((i + 1).min(m_steps - i)) as f64).collect();
    let total: f64 = t.iter().sum();
    let mut h = Vec::with_capacity(m_steps + 1);
    let mut cur = 1.0;
    h.push(cur);
    for ti in &t {
        cur -= ti / total;
        h.push(cur);
    }
    h
}

fn triangle_sum(m_steps: usize) -> f64 {
    (0..m_steps).map(|i| ((i + 1).min(m_steps - i)) as f64).sum()
}

pub fn build_shift_pi(l: i64, epsilon: f64, d: usize) -> Result<(Surface, ShiftPiReport)> {
    if l < 1 || d < 1 {
        return Err(Error::Param("need L ≥ 1 and d ≥ 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Param(format!("ε must lie in (0,1), got {epsilon}")));
    }
    let domain = BoxDomain::cube(d, l);
    let inner_l = math::ceil((1.0 - epsilon / (2.0 * d as f64)) * l as f64) as i64;

    // band width: target max|Δπ|·L² ≈ 115 (triangle sum ≈ L²/115), capped
    // by the margin between Λ_L⁻ and the boundary
    let cap = ((l - inner_l + 1).max(1)) as usize;
    let target = 115.0f64;
    let mut best_m = 1usize;
    let mut best_gap = f64::INFINITY;
    for m in 1..=cap.max(1) {
        let c = (l as f64) * (l as f64) / triangle_sum(m).max(1.0);
        let gap = math::abs(c - target);
        if gap < best_gap {
            best_gap = gap;
            best_m = m;
        }
    }
    let m_steps = best_m;
    // heights[j] sits at |v| = plateau_edge + j; heights[M] = 0 lands at
    // |v| = L + 1, i.e. exactly on the zero extension
    let plateau_edge = l + 1 - m_steps as i64;
    let heights = ramp_heights(m_steps);
    let ramp = |coord: i64| -> f64 {
        let a = coord.abs();
        if a < plateau_edge {
            1.0
        } else {
            let idx = (a - plateau_edge) as usize;
            if idx >= heights.len() {
                0.0
            } else {
                heights[idx]
            }
        }
    };

    let mut pi = Surface::zeros(domain.clone(), 1);
    for off in 0..domain.len() {
        let v = domain.vertex_at(off);
        let mut p = 1.0;
        for &c in &v {
            p *= ramp(c);
        }
        pi.at_mut(off)[0] = p;
    }

    // support: stored strictly inside Λ_L, zero extension beyond
    let support_ok = pi.boundary().is_empty();

    let mut min_on_inner = f64::INFINITY;
    for off in 0..domain.len() {
        let v = domain.vertex_at(off);
        if v.iter().all(|&c| c.abs() <= inner_l) {
            min_on_inner = min_on_inner.min(pi.at(off)[0]);
        }
    }

    let lap = laplacian(&domain, &pi);
    let mut max_lap = lap.interior().iter().fold(0.0f64, |m, &x| m.max(math::abs(x)));
    for vals in lap.boundary().values() {
        max_lap = max_lap.max(math::abs(vals[0]));
    }
    let energy = dirichlet_norm2(&domain, &pi);
    let report = ShiftPiReport {
        l,
        d,
        epsilon,
        support_ok,
        min_on_inner,
        max_laplacian_scaled: max_lap * (l as f64) * (l as f64),
        energy_scaled: energy / math::powf(l as f64, d as f64 - 2.0),
        band_steps: m_steps,
    };
    Ok((pi, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_support_and_center_value() {
        for d in 1..=3usize {
            for &l in &[4i64, 16, 64] {
                let (pi, rep) = build_shift_pi(l, 0.95, d).unwrap();
                let domain = BoxDomain::cube(d, l);
                let center = domain.offset(&vec![0; d]).unwrap();
                assert_eq!(pi.at(center)[0], 1.0, "π(0) = 1 for d={d}, L={l}");
                assert!(rep.support_ok);
                assert!(rep.min_on_inner >= 1.0, "d={d} L={l}: min {}", rep.min_on_inner);
            }
        }
    }

    #[test]
    fn scalings_are_stable_across_the_ladder() {
        for d in 1..=3usize {
            let mut laps = alloc::vec::Vec::new();
            let mut energies = alloc::vec::Vec::new();
            for &l in &[16i64, 32, 64] {
                let (_, rep) = build_shift_pi(l, 0.95, d).unwrap();
                laps.push(rep.max_laplacian_scaled);
                energies.push(rep.energy_scaled);
            }
            for vals in [&laps, &energies] {
                let hi = vals.iter().cloned().fold(0.0f64, f64::max);
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(
                    hi <= 1.5 * lo,
                    "d={d}: scaled sequence not ×1.5-stable: {vals:?}"
                );
            }
        }
    }

    #[test]
    fn epsilon_domain_checked() {
        assert!(build_shift_pi(8, 0.0, 1).is_err());
        assert!(build_shift_pi(8, 1.0, 1).is_err());
        assert!(build_shift_pi(0, 0.5, 1).is_err());
    }

    #[test]
    fn tiny_boxes_still_satisfy_the_contracts() {
        for d in 1..=3usize {
            let (_, rep) = build_shift_pi(2, 0.2, d).unwrap();
            assert!(rep.min_on_inner >= 1.0);
            assert!(rep.support_ok);
            assert!(rep.band_steps >= 1);
        }
    }
}
