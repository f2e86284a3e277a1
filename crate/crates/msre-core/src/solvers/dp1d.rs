//! Exact d = 1 ground states by dynamic programming over per-site height
//! states.
//!
//! Two state models share the machinery:
//!
//! * grid mode — states are the points of a [`HeightGrid`] (optionally
//!   translated per vertex by a grid-aligned offset field, which is how
//!   boundary-shift verification solves tilted problems);
//! * candidate mode — for the {0, +∞} point disorders the states are the
//!   support points inside the window, which is where all finite-energy
//!   configurations live.
//!
//! The backward pass computes exact cost-to-go tables; grid-mode
//! transitions go through the quadratic lower envelope, so a solve is
//! O(sites · states). The forward pass re-scans states in ascending
//! (lexicographic) order with strict improvement, which selects the
//! lexicographically smallest minimizing height sequence.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::envelope::quad_envelope;
use super::{EnergyModel, Exactness, GroundState, HeightGrid, SolverTag};
use crate::error::{Error, Result};
use crate::lattice::Surface;

const MAX_STATES: usize = 1_000_000;

pub fn solve_dp_1d(model: &EnergyModel, grid: &HeightGrid) -> Result<GroundState> {
    if model.domain.dim() != 1 {
        return Err(Error::Precondition("dynamic programming requires d = 1".into()));
    }
    if grid.ncomp() != model.ncomp() {
        return Err(Error::Precondition("grid and model component counts differ".into()));
    }
    if model.disorder.is_point_support() {
        return dp_candidates(model, grid);
    }
    let mut g = grid.clone();
    let mut retried = false;
    loop {
        let (mut gs, saturated) = dp_grid(model, &g, None)?;
        if !saturated || retried {
            gs.window_saturated = saturated;
            return Ok(gs);
        }
        g = g.doubled();
        retried = true;
    }
}

/// Fixed-grid solve: exactly the given grid, no window-doubling retry.
/// `window_saturated` reports whether an optimal height sits on the edge.
pub fn solve_dp_1d_on(model: &EnergyModel, grid: &HeightGrid) -> Result<GroundState> {
    if model.domain.dim() != 1 {
        return Err(Error::Precondition("dynamic programming requires d = 1".into()));
    }
    if grid.ncomp() != model.ncomp() {
        return Err(Error::Precondition("grid and model component counts differ".into()));
    }
    if model.disorder.is_point_support() {
        return dp_candidates(model, grid);
    }
    let (mut gs, saturated) = dp_grid(model, grid, None)?;
    gs.window_saturated = saturated;
    Ok(gs)
}

/// Grid-mode DP. `offsets` translates every site's grid by the surface
/// value at that vertex (used by the boundary-shift verifier). Returns the
/// ground state and whether any optimal height sits on the window edge.
pub(crate) fn dp_grid(
    model: &EnergyModel,
    grid: &HeightGrid,
    offsets: Option<&Surface>,
) -> Result<(GroundState, bool)> {
    let states = grid.states();
    if states > MAX_STATES {
        return Err(Error::Resource(format!(
            "grid has {states} states per site (cap {MAX_STATES}); coarsen the grid"
        )));
    }
    let domain = &model.domain;
    let n = model.ncomp();
    let m = grid.points_per_axis;
    let sites = domain.len();
    let lam = model.lambda;

    let offset_at = |off: usize, out: &mut [f64]| {
        match offsets {
            Some(s) => out.copy_from_slice(s.at(off)),
            None => out.fill(0.0),
        };
    };

    // λ·η for every site and state
    let mut site_cost: Vec<Vec<f64>> = Vec::with_capacity(sites);
    let mut height = vec![0.0; n];
    let mut ovec = vec![0.0; n];
    for off in 0..sites {
        let v = domain.vertex_at(off);
        offset_at(off, &mut ovec);
        let mut costs = vec![0.0; states];
        if n == 1 {
            let ts: Vec<f64> = (0..m).map(|i| grid.axis_value(0, i) + ovec[0]).collect();
            model.disorder.eval_batch_1d(&v, &ts, &mut costs);
            for c in costs.iter_mut() {
                *c *= lam;
            }
        } else {
            for s in 0..states {
                grid.decode(s, &mut height);
                for c in 0..n {
                    height[c] += ovec[c];
                }
                costs[s] = lam * model.disorder.eval(&v, &height);
            }
        }
        if costs.iter().all(|&c| c == f64::INFINITY) {
            let v = domain.vertex_at(off);
            return Err(Error::Infeasible(format!(
                "every grid height at vertex {v:?} has infinite environment energy"
            )));
        }
        site_cost.push(costs);
    }

    // boundary values read off the shell (zero-extended)
    let bsurf = model.boundary_surface();
    let lo_v = domain.lo()[0];
    let hi_v = domain.hi()[0];
    let mut tau_left = vec![0.0; n];
    let mut tau_right = vec![0.0; n];
    bsurf.get(&[lo_v - 1], &mut tau_left);
    bsurf.get(&[hi_v + 1], &mut tau_right);

    let half_dist2 = |grid: &HeightGrid, s: usize, ov: &[f64], target: &[f64]| -> f64 {
        let mut acc = 0.0;
        let mut h = [0.0f64; crate::disorder::MAX_NCOMP];
        grid.decode(s, &mut h[..n]);
        for c in 0..n {
            let d = h[c] + ov[c] - target[c];
            acc += d * d;
        }
        0.5 * acc
    };

    // backward cost-to-go: B[k][s] = transitions and site costs after k
    let mut cost_to_go: Vec<Vec<f64>> = vec![Vec::new(); sites];
    {
        let mut b = vec![0.0; states];
        offset_at(sites - 1, &mut ovec);
        for (s, bs) in b.iter_mut().enumerate() {
            *bs = half_dist2(grid, s, &ovec, &tau_right);
        }
        cost_to_go[sites - 1] = b;
    }
    let mut from_off = vec![0.0; n];
    for k in (0..sites.saturating_sub(1)).rev() {
        let mut f = vec![0.0; states];
        for s in 0..states {
            f[s] = site_cost[k + 1][s] + cost_to_go[k + 1][s];
        }
        offset_at(k, &mut from_off);
        offset_at(k + 1, &mut ovec);
        let b = envelope_transform(grid, &f, &ovec, &from_off)?;
        cost_to_go[k] = b;
    }

    // lexicographically smallest optimum, scanning ascending with strict <
    offset_at(0, &mut ovec);
    let mut best_s = usize::MAX;
    let mut best = f64::INFINITY;
    for s in 0..states {
        let total = half_dist2(grid, s, &ovec, &tau_left) + site_cost[0][s] + cost_to_go[0][s];
        if total < best {
            best = total;
            best_s = s;
        }
    }
    if best == f64::INFINITY {
        return Err(Error::Infeasible("no finite-energy grid configuration".into()));
    }

    let mut chosen = vec![0usize; sites];
    chosen[0] = best_s;
    let mut prev_h = vec![0.0; n];
    for k in 0..sites - 1 {
        offset_at(k, &mut from_off);
        grid.decode(chosen[k], &mut prev_h);
        for c in 0..n {
            prev_h[c] += from_off[c];
        }
        offset_at(k + 1, &mut ovec);
        let mut arg = usize::MAX;
        let mut cur = f64::INFINITY;
        for s in 0..states {
            let t = half_dist2(grid, s, &ovec, &prev_h) + site_cost[k + 1][s] + cost_to_go[k + 1][s];
            if t < cur {
                cur = t;
                arg = s;
            }
        }
        chosen[k + 1] = arg;
    }

    let mut saturated = false;
    let mut surface = model.boundary_surface();
    for k in 0..sites {
        offset_at(k, &mut ovec);
        grid.decode(chosen[k], &mut height);
        for c in 0..n {
            surface.at_mut(k)[c] = height[c] + ovec[c];
            let idx = grid.axis_index(chosen[k], c);
            if idx == 0 || idx + 1 == m {
                saturated = true;
            }
        }
    }
    let energy = super::energy(model, &surface)?;
    Ok((
        GroundState {
            surface,
            energy,
            solver: SolverTag::Dp1d,
            exactness: Exactness::ExactOnGrid,
            iterations: sites as u64,
            window_saturated: false,
        },
        saturated,
    ))
}

/// Separable quadratic transform: `out[s] = min_{s'} f[s'] + ½‖h_s − h_{s'}‖²`
/// where source heights carry `src_off` and targets `dst_off`.
fn envelope_transform(
    grid: &HeightGrid,
    f: &[f64],
    src_off: &[f64],
    dst_off: &[f64],
) -> Result<Vec<f64>> {
    let n = grid.ncomp();
    let m = grid.points_per_axis;
    let states = grid.states();
    let mut cur = f.to_vec();
    let mut line_in = vec![0.0; m];
    let mut line_out = vec![0.0; m];
    for axis in (0..n).rev() {
        // stride of `axis` in the flat index (axis 0 most significant)
        let stride = m.pow((n - 1 - axis) as u32);
        let src_pos: Vec<f64> = (0..m).map(|i| grid.axis_value(axis, i) + src_off[axis]).collect();
        let dst_pos: Vec<f64> = (0..m).map(|i| grid.axis_value(axis, i) + dst_off[axis]).collect();
        let blocks = states / (m * stride);
        for b in 0..blocks {
            for r in 0..stride {
                let base = b * m * stride + r;
                for i in 0..m {
                    line_in[i] = cur[base + i * stride];
                }
                quad_envelope(0.5, &src_pos, &line_in, &dst_pos, &mut line_out);
                for i in 0..m {
                    cur[base + i * stride] = line_out[i];
                }
            }
        }
    }
    Ok(cur)
}

/// Candidate-mode DP for point-supported disorders: per-site states are the
/// support points inside the window.
fn dp_candidates(model: &EnergyModel, grid: &HeightGrid) -> Result<GroundState> {
    let domain = &model.domain;
    let n = model.ncomp();
    let sites = domain.len();
    let m = grid.points_per_axis;
    let wlo: Vec<f64> = (0..n).map(|c| grid.axis_value(c, 0)).collect();
    let whi: Vec<f64> = (0..n).map(|c| grid.axis_value(c, m - 1) + grid.step).collect();

    let mut cands: Vec<Vec<Vec<f64>>> = Vec::with_capacity(sites);
    for off in 0..sites {
        let v = domain.vertex_at(off);
        let pts = model
            .disorder
            .candidates(&v, &wlo, &whi)
            .ok_or_else(|| Error::Precondition("disorder kind has no candidate points".into()))?;
        if pts.is_empty() {
            return Err(Error::Infeasible(format!(
                "no support points at vertex {v:?} inside the height window"
            )));
        }
        if pts.len() > MAX_STATES {
            return Err(Error::Resource(format!("too many candidates at {v:?}")));
        }
        cands.push(pts);
    }

    let bsurf = model.boundary_surface();
    let mut tau_left = vec![0.0; n];
    let mut tau_right = vec![0.0; n];
    bsurf.get(&[domain.lo()[0] - 1], &mut tau_left);
    bsurf.get(&[domain.hi()[0] + 1], &mut tau_right);

    let half_dist2 = |a: &[f64], b: &[f64]| -> f64 {
        0.5 * a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<f64>()
    };

    let mut cost_to_go: Vec<Vec<f64>> = vec![Vec::new(); sites];
    cost_to_go[sites - 1] = cands[sites - 1].iter().map(|p| half_dist2(p, &tau_right)).collect();
    for k in (0..sites.saturating_sub(1)).rev() {
        let next = &cands[k + 1];
        let b_next = &cost_to_go[k + 1];
        let b: Vec<f64> = cands[k]
            .iter()
            .map(|p| {
                let mut best = f64::INFINITY;
                for (j, q) in next.iter().enumerate() {
                    let t = half_dist2(p, q) + b_next[j];
                    if t < best {
                        best = t;
                    }
                }
                best
            })
            .collect();
        cost_to_go[k] = b;
    }

    let mut chosen = vec![0usize; sites];
    let mut best = f64::INFINITY;
    let mut arg = usize::MAX;
    for (s, p) in cands[0].iter().enumerate() {
        let t = half_dist2(p, &tau_left) + cost_to_go[0][s];
        if t < best {
            best = t;
            arg = s;
        }
    }
    if arg == usize::MAX {
        return Err(Error::Infeasible("no finite-energy candidate configuration".into()));
    }
    chosen[0] = arg;
    for k in 0..sites - 1 {
        let p = &cands[k][chosen[k]];
        let mut cur = f64::INFINITY;
        let mut a = usize::MAX;
        for (s, q) in cands[k + 1].iter().enumerate() {
            let t = half_dist2(p, q) + cost_to_go[k + 1][s];
            if t < cur {
                cur = t;
                a = s;
            }
        }
        chosen[k + 1] = a;
    }

    let mut surface = model.boundary_surface();
    for k in 0..sites {
        surface.at_mut(k).copy_from_slice(&cands[k][chosen[k]]);
    }
    let energy = super::energy(model, &surface)?;
    Ok(GroundState {
        surface,
        energy,
        solver: SolverTag::Dp1d,
        exactness: Exactness::ExactOnGrid,
        iterations: sites as u64,
        window_saturated: false,
    })
}
