//! Coordinate-descent local search: the heuristic fallback for n ≥ 2 in
//! d ≥ 2, where no exact structure is available.
//!
//! Full-lattice sweeps; each site update minimizes the one-site energy
//! exactly over the grid candidates, then (for disorders with continuous
//! sample paths) refines within one grid cell by per-component ternary
//! search. A move is accepted only when it strictly lowers the one-site
//! energy, so the total energy is non-increasing along the whole run.

use alloc::vec;
use alloc::vec::Vec;

use super::{EnergyModel, Exactness, GroundState, HeightGrid, SolverTag};
use crate::error::{Error, Result};
use crate::lattice::{harmonic_extension, Surface};
use crate::rng::{Key, Stream};

pub fn solve_local(
    model: &EnergyModel,
    grid: &HeightGrid,
    restarts: usize,
    sweeps: usize,
) -> Result<GroundState> {
    if grid.ncomp() != model.ncomp() {
        return Err(Error::Precondition("grid and model component counts differ".into()));
    }
    let restarts = restarts.max(1);
    let mut best: Option<GroundState> = None;
    for r in 0..restarts {
        let init = initial_surface(model, grid, r)?;
        let (surface, moves) = descend(model, grid, init, sweeps);
        let energy = super::energy(model, &surface)?;
        let better = match &best {
            None => true,
            Some(b) => energy < b.energy,
        };
        if better {
            best = Some(GroundState {
                surface,
                energy,
                solver: SolverTag::Local,
                exactness: Exactness::Heuristic,
                iterations: moves,
                window_saturated: false,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

fn initial_surface(model: &EnergyModel, grid: &HeightGrid, restart: usize) -> Result<Surface> {
    let n = model.ncomp();
    match restart {
        0 => Ok(model.boundary_surface()),
        1 => {
            if model.tau.is_empty() {
                return Ok(model.boundary_surface());
            }
            let mut ext = harmonic_extension(&model.domain, &model.tau)?;
            *ext.boundary_mut() = model.tau.clone();
            Ok(ext)
        }
        _ => {
            let mut s = model.boundary_surface();
            let seed_key = Key::new(restart as u64, Stream::LocalInit);
            for off in 0..model.domain.len() {
                let key = seed_key.absorb(off as u64);
                for c in 0..n {
                    let idx = (key.word(c as u64) % grid.points_per_axis as u64) as usize;
                    s.at_mut(off)[c] = grid.axis_value(c, idx);
                }
            }
            Ok(s)
        }
    }
}

pub(crate) fn descend(
    model: &EnergyModel,
    grid: &HeightGrid,
    phi: Surface,
    sweeps: usize,
) -> (Surface, u64) {
    let refine = model.disorder.has_continuous_paths();
    descend_opts(model, grid, phi, sweeps, refine)
}

pub(crate) fn descend_opts(
    model: &EnergyModel,
    grid: &HeightGrid,
    mut phi: Surface,
    sweeps: usize,
    refine: bool,
) -> (Surface, u64) {
    let domain = &model.domain;
    let n = model.ncomp();
    let lam = model.lambda;
    let deg = 2.0 * domain.dim() as f64;
    let m = grid.points_per_axis;
    let states = grid.states();
    let mut accepted_total = 0u64;
    let mut nbuf = vec![0.0; n];
    let mut height = vec![0.0; n];

    let wlo: Vec<f64> = (0..n).map(|c| grid.axis_value(c, 0)).collect();
    let whi: Vec<f64> = (0..n).map(|c| grid.axis_value(c, m - 1) + grid.step).collect();

    for _ in 0..sweeps {
        let mut accepted_this_sweep = 0u64;
        for off in 0..domain.len() {
            let v = domain.vertex_at(off);
            // neighbor sum (boundary values included)
            let mut nb_sum = vec![0.0; n];
            domain.for_each_neighbor(off, &mut |_, noff, nv| match noff {
                Some(noff) => {
                    let u = phi.at(noff);
                    for c in 0..n {
                        nb_sum[c] += u[c];
                    }
                }
                None => {
                    phi.get(nv, &mut nbuf);
                    for c in 0..n {
                        nb_sum[c] += nbuf[c];
                    }
                }
            });
            // one-site score (constant terms dropped):
            //   ½·deg·‖h‖² − h·nb_sum + λη(v, h)
            let score = |h: &[f64]| -> f64 {
                let mut q = 0.0;
                let mut lin = 0.0;
                for c in 0..n {
                    q += h[c] * h[c];
                    lin += h[c] * nb_sum[c];
                }
                0.5 * deg * q - lin + lam * model.disorder.eval(&v, h)
            };

            let current = score(phi.at(off));
            let mut best_val = f64::INFINITY;
            let mut best_h = vec![0.0; n];
            if model.disorder.is_point_support() {
                let cands = match model.disorder.candidates(&v, &wlo, &whi) {
                    Some(c) => c,
                    None => continue,
                };
                for cand in &cands {
                    let s = score(cand);
                    if s < best_val {
                        best_val = s;
                        best_h.copy_from_slice(cand);
                    }
                }
            } else {
                for st in 0..states {
                    grid.decode(st, &mut height);
                    let s = score(&height);
                    if s < best_val {
                        best_val = s;
                        best_h.copy_from_slice(&height);
                    }
                }
                if refine && best_val < f64::INFINITY {
                    refine_in_cell(&score, grid.step, &mut best_h, &mut best_val);
                }
            }
            // a move must strictly lower the one-site energy and change the
            // height beyond float noise (ulp-level "improvements" near a
            // stationary point would otherwise count as moves)
            let moved = best_h
                .iter()
                .zip(phi.at(off))
                .any(|(&b, &c)| (b - c).abs() > 1e-10 * (1.0 + c.abs()));
            if best_val < current && moved {
                phi.at_mut(off).copy_from_slice(&best_h);
                accepted_this_sweep += 1;
            }
        }
        accepted_total += accepted_this_sweep;
        if accepted_this_sweep == 0 {
            break;
        }
    }
    (phi, accepted_total)
}

/// Per-component continuous refinement within ± one grid cell around `h`,
/// two rounds over the components: ternary search to locate the basin,
/// then one parabolic polish whose vertex formula stays noise-robust where
/// plain value comparisons degenerate. Updates `h` and `val` in place.
fn refine_in_cell(score: &dyn Fn(&[f64]) -> f64, step: f64, h: &mut [f64], val: &mut f64) {
    let n = h.len();
    let mut trial = h.to_vec();
    for _round in 0..2 {
        for c in 0..n {
            let mut lo = h[c] - step;
            let mut hi = h[c] + step;
            for _ in 0..40 {
                if hi - lo <= 1e-5 * (1.0 + h[c].abs()) {
                    break;
                }
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                trial[c] = m1;
                let s1 = score(&trial);
                trial[c] = m2;
                let s2 = score(&trial);
                if s1 < s2 {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let mut cand = 0.5 * (lo + hi);
            // parabolic vertex from three points δ apart; the curvature in
            // the denominator keeps the formula stable against the float
            // noise that stalls pure value comparisons near the minimum
            let delta = 1e-4 * (1.0 + cand.abs());
            trial[c] = cand - delta;
            let sm = score(&trial);
            trial[c] = cand;
            let s0 = score(&trial);
            trial[c] = cand + delta;
            let sp = score(&trial);
            let curv = sp - 2.0 * s0 + sm;
            if curv > 0.0 {
                let vertex = cand - 0.5 * delta * (sp - sm) / curv;
                if vertex.is_finite() && (vertex - cand).abs() <= step {
                    cand = vertex;
                }
            }
            trial[c] = cand;
            let s = score(&trial);
            if s < *val {
                *val = s;
                h[c] = cand;
            } else {
                trial[c] = h[c];
            }
        }
    }
}
