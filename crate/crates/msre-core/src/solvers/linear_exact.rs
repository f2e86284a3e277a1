//! The exact minimizer for linear disorder `η(v,t) = ζ_v · t` with zero
//! boundary data: the components decouple and
//!
//! ```text
//! φ = −λ (−Δ_Λ)^{-1} ζ     componentwise,
//! ```
//!
//! with ground energy `−½λ²(ζ, (−Δ_Λ)^{-1} ζ)`. No height grid enters.


use alloc::vec::Vec;

use super::{EnergyModel, Exactness, GroundState, SolverTag};
use crate::error::{Error, Result};
use crate::lattice::{cg_solve, neg_laplacian_dirichlet, tridiag_neg_laplace_solve};

/// Solve `(−Δ_Λ)φ = −λζ` componentwise with zero Dirichlet data.
pub fn linear_minimizer(
    domain: &crate::lattice::BoxDomain,
    lambda: f64,
    zeta: &crate::lattice::Surface,
) -> Result<crate::lattice::Surface> {
    let n = zeta.ncomp();
    let sites = domain.len();
    let mut surface = crate::lattice::Surface::zeros(domain.clone(), n);
    for c in 0..n {
        let b: Vec<f64> = (0..sites).map(|o| -lambda * zeta.at(o)[c]).collect();
        let x = if domain.dim() == 1 {
            tridiag_neg_laplace_solve(&b)
        } else {
            let scale = b.iter().fold(1.0f64, |m, &t| m.max(t.abs()));
            let apply = |x: &[f64], y: &mut [f64]| neg_laplacian_dirichlet(domain, 1, x, y);
            cg_solve(apply, &b, 1e-12 * scale, 20 * sites.max(8))?
        };
        for o in 0..sites {
            surface.at_mut(o)[c] = x[o];
        }
    }
    Ok(surface)
}

pub fn solve_linear_closed_form(model: &EnergyModel) -> Result<GroundState> {
    if !model.disorder.linear_slopes_available() {
        return Err(Error::Precondition(
            "closed form requires an unwrapped linear disorder".into(),
        ));
    }
    if !model.tau.is_empty() {
        return Err(Error::Precondition(
            "closed form requires τ ≡ 0; compose with the boundary-shift identity instead".into(),
        ));
    }
    let domain = &model.domain;
    let n = model.ncomp();
    let sites = domain.len();

    let mut zeta = crate::lattice::Surface::zeros(domain.clone(), n);
    for off in 0..sites {
        let v = domain.vertex_at(off);
        let z = model.disorder.linear_slope(&v).expect("linear kind");
        zeta.at_mut(off).copy_from_slice(&z);
    }
    let mut surface = linear_minimizer(domain, model.lambda, &zeta)?;
    *surface.boundary_mut() = model.tau.clone();
    let energy = super::energy(model, &surface)?;
    Ok(GroundState {
        surface,
        energy,
        solver: SolverTag::LinearClosedForm,
        exactness: Exactness::Exact,
        iterations: 0,
        window_saturated: false,
    })
}
