//! Ground-configuration solvers for the finite-volume energy
//!
//! ```text
//! H(φ) = ½ Σ_{u~v, {u,v}∩Λ≠∅} ‖φ_u − φ_v‖²  +  λ Σ_{v∈Λ} η(v, φ_v),
//! ```
//!
//! minimized over surfaces matching boundary data `τ` off `Λ`:
//!
//! * [`solve_dp_1d`] — exact on a height grid for d = 1 (any n) by dynamic
//!   programming; per-site transition minimization uses the quadratic
//!   lower-envelope transform, so a solve costs O(sites · states).
//! * [`solve_mincut`] — exact on a height grid for n = 1 (any d) by the
//!   layered min-cut construction for convex pairwise costs.
//! * [`solve_local`] — coordinate-descent local search for everything else
//!   (heuristic; energy non-increasing per accepted move).
//! * [`solve_linear_closed_form`] — the exact minimizer
//!   `φ = −λ(−Δ_Λ)^{-1} ζ` for linear disorder with zero boundary data.
//!
//! Exact-on-grid solvers break ties toward the lexicographically smallest
//! height sequence; repeated solves of one instance are bit-identical.

mod dp1d;
mod envelope;
mod linear_exact;
mod local;
mod mincut;
mod verify;

pub use dp1d::{solve_dp_1d, solve_dp_1d_on};
pub use envelope::quad_envelope;
pub use linear_exact::{linear_minimizer, solve_linear_closed_form};
pub use local::solve_local;
pub use mincut::{solve_mincut, solve_mincut_on};
pub use verify::{
    surface_add, surface_neg, verify_boundary_shift, verify_main_identity,
    BoundaryShiftReport, ExactSolver,
};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::disorder::DisorderField;
use crate::error::{Error, Result};
use crate::lattice::{BoundaryValues, BoxDomain, Surface};
use crate::math;

/// A finite-volume energy: domain, environment, strength and boundary data.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    pub domain: BoxDomain,
    pub disorder: DisorderField,
    pub lambda: f64,
    pub tau: BoundaryValues,
}

impl EnergyModel {
    pub fn new(
        domain: BoxDomain,
        disorder: DisorderField,
        lambda: f64,
        tau: BoundaryValues,
    ) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Param(format!(
                "environment strength λ must be positive, got {lambda}"
            )));
        }
        for (v, vals) in &tau {
            if vals.len() != disorder.ncomp() {
                return Err(Error::Precondition(format!(
                    "boundary value at {v:?} has {} components, model has {}",
                    vals.len(),
                    disorder.ncomp()
                )));
            }
            if !vals.iter().all(|x| x.is_finite()) {
                return Err(Error::Precondition(format!("boundary value at {v:?} is not finite")));
            }
        }
        Ok(EnergyModel { domain, disorder, lambda, tau })
    }

    pub fn ncomp(&self) -> usize {
        self.disorder.ncomp()
    }

    /// The all-zero interior surface carrying this model's boundary data.
    pub fn boundary_surface(&self) -> Surface {
        Surface::with_boundary(self.domain.clone(), self.ncomp(), self.tau.clone())
    }

    /// `φ` must carry exactly this model's boundary data.
    pub fn check_boundary(&self, phi: &Surface) -> Result<()> {
        let n = self.ncomp();
        if phi.ncomp() != n || phi.domain() != &self.domain {
            return Err(Error::Precondition("surface does not match the model's domain".into()));
        }
        let mut want = vec![0.0; n];
        let mut have = vec![0.0; n];
        for v in self.domain.shell() {
            want.fill(0.0);
            if let Some(vals) = self.tau.get(&v) {
                want.copy_from_slice(vals);
            }
            phi.get(&v, &mut have);
            if want != have {
                return Err(Error::Precondition(format!(
                    "surface violates the boundary condition at {v:?}"
                )));
            }
        }
        Ok(())
    }
}

/// `H^{η,λ,Λ}(φ)` for an arbitrary configuration (no boundary contract).
pub fn hamiltonian(
    domain: &BoxDomain,
    disorder: &DisorderField,
    lambda: f64,
    phi: &Surface,
) -> f64 {
    let n = phi.ncomp();
    let mut elastic = 0.0;
    let mut buf = vec![0.0; n];
    for off in 0..domain.len() {
        let center = phi.at(off).to_vec();
        domain.for_each_neighbor(off, &mut |_, noff, nv| match noff {
            Some(noff) => {
                if noff > off {
                    let u = phi.at(noff);
                    for c in 0..n {
                        let d = u[c] - center[c];
                        elastic += d * d;
                    }
                }
            }
            None => {
                phi.get(nv, &mut buf);
                for c in 0..n {
                    let d = buf[c] - center[c];
                    elastic += d * d;
                }
            }
        });
    }
    let mut site = 0.0;
    for off in 0..domain.len() {
        let v = domain.vertex_at(off);
        let e = disorder.eval(&v, phi.at(off));
        if e == f64::INFINITY {
            return f64::INFINITY;
        }
        site += e;
    }
    0.5 * elastic + lambda * site
}

/// Energy of a configuration in the model's boundary class.
pub fn energy(model: &EnergyModel, phi: &Surface) -> Result<f64> {
    model.check_boundary(phi)?;
    Ok(hamiltonian(&model.domain, &model.disorder, model.lambda, phi))
}

/// A uniform product grid of height values: per axis,
/// `lo, lo + step, …, lo + (m−1)·step`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightGrid {
    pub lo: Vec<f64>,
    pub step: f64,
    pub points_per_axis: usize,
}

impl HeightGrid {
    pub fn new(lo: Vec<f64>, step: f64, points_per_axis: usize) -> Result<Self> {
        if !(step > 0.0) || points_per_axis < 3 {
            return Err(Error::Param(
                "height grid needs step > 0 and at least 3 points per axis".into(),
            ));
        }
        Ok(HeightGrid { lo, step, points_per_axis })
    }

    /// Symmetric grid `[−W', W']^n` with `W' = ceil(W/step)·step ≥ W`, so 0
    /// is exactly a grid point.
    pub fn symmetric(window: f64, step: f64, ncomp: usize) -> Result<Self> {
        if !(window > 0.0 && step > 0.0) {
            return Err(Error::Param("window and step must be positive".into()));
        }
        let half = math::ceil(window / step) as usize;
        HeightGrid::new(vec![-(half as f64) * step; ncomp], step, 2 * half + 1)
    }

    pub fn ncomp(&self) -> usize {
        self.lo.len()
    }

    /// Total states per site.
    pub fn states(&self) -> usize {
        self.points_per_axis.pow(self.ncomp() as u32)
    }

    #[inline]
    pub fn axis_value(&self, axis: usize, idx: usize) -> f64 {
        self.lo[axis] + idx as f64 * self.step
    }

    pub fn axis_values(&self, axis: usize) -> Vec<f64> {
        (0..self.points_per_axis).map(|i| self.axis_value(axis, i)).collect()
    }

    /// Decode a flat state (axis 0 most significant, so flat order is the
    /// lexicographic order of height vectors).
    pub fn decode(&self, mut state: usize, out: &mut [f64]) {
        let n = self.ncomp();
        for c in (0..n).rev() {
            let idx = state % self.points_per_axis;
            out[c] = self.axis_value(c, idx);
            state /= self.points_per_axis;
        }
    }

    pub fn axis_index(&self, mut state: usize, axis: usize) -> usize {
        let n = self.ncomp();
        for _ in axis + 1..n {
            state /= self.points_per_axis;
        }
        state % self.points_per_axis
    }

    /// Doubled window, same step.
    pub fn doubled(&self) -> HeightGrid {
        let half = (self.points_per_axis - 1) / 2;
        HeightGrid {
            lo: self.lo.iter().map(|&x| 2.0 * x).collect(),
            step: self.step,
            points_per_axis: 4 * half + 1,
        }
    }
}

/// Default height-grid policy: window `W = max(4, 4·L^{(4−d)/4}·√λ)` from
/// the localization envelope, step `min(0.25, W/64)`.
pub fn default_grid(domain: &BoxDomain, lambda: f64, ncomp: usize) -> Result<HeightGrid> {
    let d = domain.dim();
    let l_eff = (0..d)
        .map(|i| (domain.hi()[i] - domain.lo()[i] + 1) as f64 / 2.0)
        .fold(1.0f64, f64::max);
    let w = 4.0f64.max(4.0 * math::powf(l_eff, (4.0 - d as f64) / 4.0) * math::sqrt(lambda));
    let step = 0.25f64.min(w / 64.0);
    HeightGrid::symmetric(w, step, ncomp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverTag {
    Dp1d,
    MinCut,
    Local,
    LinearClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    /// Global minimizer over the searched (grid) configuration set.
    ExactOnGrid,
    /// Exact continuum minimizer (no grid).
    Exact,
    /// Best configuration found; no optimality certificate.
    Heuristic,
}

/// A solved configuration with its energy and solver metadata.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub surface: Surface,
    pub energy: f64,
    pub solver: SolverTag,
    pub exactness: Exactness,
    /// Sweeps, augmentations or CG iterations, depending on the solver.
    pub iterations: u64,
    /// Set when an optimal height still hits the window edge after the
    /// automatic retry with a doubled window.
    pub window_saturated: bool,
}

/// Solver auto-selection: closed form for base linear disorder with τ ≡ 0,
/// dynamic programming in d = 1, min-cut for scalar heights, local search
/// otherwise.
pub fn solve_auto(model: &EnergyModel, grid: &HeightGrid) -> Result<GroundState> {
    if model.disorder.linear_slopes_available() && model.tau.is_empty() {
        return solve_linear_closed_form(model);
    }
    if model.domain.dim() == 1 {
        return solve_dp_1d(model, grid);
    }
    if model.ncomp() == 1 {
        return solve_mincut(model, grid);
    }
    solve_local(model, grid, 3, 200)
}

#[cfg(test)]
mod tests;
