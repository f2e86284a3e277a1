//! Box domains on Z^d, surfaces with n real components, and the discrete
//! differential operators of the energy: Laplacian, Dirichlet inner
//! product, harmonic extension.
//!
//! Conventions:
//!
//! * A box `Λ = [lo_1,hi_1] × … × [lo_d,hi_d]` is stored by its corners.
//!   Interior vertices are indexed by row-major offset (last axis fastest).
//! * `Λ⁺` contains every vertex touched by an edge meeting `Λ`; for a box
//!   this is `Λ` plus the face-adjacent outer shell (corner-adjacent
//!   outside vertices are *not* in `Λ⁺` — they touch no edge meeting `Λ`).
//! * Surfaces are zero-extended outside the vertices they store, so every
//!   operator below is total.

mod linsolve;

pub use linsolve::{cg_solve, tridiag_neg_laplace_solve};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A lattice point of Z^d.
pub type Vertex = Vec<i64>;

/// A finite axis-aligned box in Z^d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxDomain {
    lo: Vec<i64>,
    hi: Vec<i64>,
    strides: Vec<usize>,
    len: usize,
}

impl BoxDomain {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::Param(format!(
                "box corners must be non-empty and of equal dimension, got {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for i in 0..lo.len() {
            if lo[i] > hi[i] {
                return Err(Error::Param(format!(
                    "box corner violation on axis {i}: lo {} > hi {}",
                    lo[i], hi[i]
                )));
            }
        }
        let d = lo.len();
        let mut strides = vec![0usize; d];
        let mut acc = 1usize;
        for i in (0..d).rev() {
            strides[i] = acc;
            acc = acc
                .checked_mul((hi[i] - lo[i] + 1) as usize)
                .ok_or_else(|| Error::Resource("box too large to index".into()))?;
        }
        Ok(BoxDomain { lo, hi, strides, len: acc })
    }

    /// The centered cube `Λ_L = {−L, …, L}^d`.
    pub fn cube(d: usize, l: i64) -> Self {
        assert!(d >= 1 && l >= 0);
        BoxDomain::new(vec![-l; d], vec![l; d]).expect("cube corners are valid")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Number of vertices |Λ|.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.dim()
            && v.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&c, (&lo, &hi))| lo <= c && c <= hi)
    }

    /// Row-major offset of `v`, or `None` if `v ∉ Λ`.
    pub fn offset(&self, v: &[i64]) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        Some(
            v.iter()
                .zip(self.lo.iter().zip(&self.strides))
                .map(|(&c, (&lo, &s))| (c - lo) as usize * s)
                .sum(),
        )
    }

    pub fn vertex_at(&self, mut offset: usize) -> Vertex {
        debug_assert!(offset < self.len);
        let mut v = vec![0i64; self.dim()];
        for i in 0..self.dim() {
            v[i] = self.lo[i] + (offset / self.strides[i]) as i64;
            offset %= self.strides[i];
        }
        v
    }

    /// Iterate interior vertices in offset order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len).map(move |o| self.vertex_at(o))
    }

    /// ℓ∞ distance from `v ∈ Λ` to the complement of `Λ`.
    ///
    /// For a box this is one more than the smallest margin to a face.
    pub fn boundary_distance(&self, v: &[i64]) -> Result<i64> {
        if !self.contains(v) {
            return Err(Error::Domain(format!("vertex {v:?} is outside the box")));
        }
        let mut margin = i64::MAX;
        for i in 0..self.dim() {
            margin = margin.min(v[i] - self.lo[i]).min(self.hi[i] - v[i]);
        }
        Ok(margin + 1)
    }

    /// The face-adjacent outer shell `Λ⁺ \ Λ`, in a canonical order.
    pub fn shell(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        for axis in 0..self.dim() {
            for &side in &[self.lo[axis] - 1, self.hi[axis] + 1] {
                let mut lo = self.lo.clone();
                let mut hi = self.hi.clone();
                lo[axis] = side;
                hi[axis] = side;
                let face = BoxDomain::new(lo, hi).expect("face corners are valid");
                out.extend(face.vertices());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Apply `f` to every neighbor `u ~ v` of the interior offset `off`,
    /// passing `Some(neighbor_offset)` when `u ∈ Λ` and `None` with the
    /// neighbor vertex when it is outside.
    pub fn for_each_neighbor<F: FnMut(usize, Option<usize>, &[i64])>(&self, off: usize, f: &mut F) {
        let v = self.vertex_at(off);
        let mut nb = v.clone();
        for axis in 0..self.dim() {
            for &delta in &[-1i64, 1] {
                nb[axis] = v[axis] + delta;
                let inside = nb[axis] >= self.lo[axis] && nb[axis] <= self.hi[axis];
                if inside {
                    let noff = (off as i64 + delta * self.strides[axis] as i64) as usize;
                    f(axis, Some(noff), &nb);
                } else {
                    f(axis, None, &nb);
                }
            }
            nb[axis] = v[axis];
        }
    }
}

/// Boundary values: a sparse map from shell vertices to R^n vectors.
pub type BoundaryValues = BTreeMap<Vertex, Vec<f64>>;

/// A surface `φ: Z^d → R^n`, stored on `Λ` plus boundary values on the
/// outer shell, zero-extended elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    domain: BoxDomain,
    ncomp: usize,
    interior: Vec<f64>,
    boundary: BoundaryValues,
}

impl Surface {
    pub fn zeros(domain: BoxDomain, ncomp: usize) -> Self {
        assert!(ncomp >= 1);
        let interior = vec![0.0; domain.len() * ncomp];
        Surface { domain, ncomp, interior, boundary: BTreeMap::new() }
    }

    pub fn with_boundary(domain: BoxDomain, ncomp: usize, boundary: BoundaryValues) -> Self {
        let mut s = Surface::zeros(domain, ncomp);
        s.boundary = boundary;
        s
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        &mut self.interior
    }

    pub fn boundary(&self) -> &BoundaryValues {
        &self.boundary
    }

    pub fn boundary_mut(&mut self) -> &mut BoundaryValues {
        &mut self.boundary
    }

    /// Components of `φ_v` for an interior offset.
    #[inline]
    pub fn at(&self, off: usize) -> &[f64] {
        &self.interior[off * self.ncomp..(off + 1) * self.ncomp]
    }

    #[inline]
    pub fn at_mut(&mut self, off: usize) -> &mut [f64] {
        &mut self.interior[off * self.ncomp..(off + 1) * self.ncomp]
    }

    /// Read `φ` at an arbitrary vertex (boundary map, zero-extension).
    pub fn get(&self, v: &[i64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.ncomp);
        if let Some(off) = self.domain.offset(v) {
            out.copy_from_slice(self.at(off));
        } else if let Some(vals) = self.boundary.get(v) {
            out.copy_from_slice(vals);
        } else {
            out.fill(0.0);
        }
    }

    pub fn set_boundary(&mut self, v: Vertex, vals: Vec<f64>) {
        assert_eq!(vals.len(), self.ncomp);
        self.boundary.insert(v, vals);
    }

    pub fn all_finite(&self) -> bool {
        self.interior.iter().all(|x| x.is_finite())
            && self.boundary.values().flatten().all(|x| x.is_finite())
    }
}

fn check_compatible(a: &Surface, b: &Surface) -> Result<()> {
    if a.domain() != b.domain() || a.ncomp() != b.ncomp() {
        return Err(Error::Precondition(
            "surfaces must share a domain and component count".into(),
        ));
    }
    Ok(())
}

/// `(Δ_Λ φ)_v = Σ_{u~v, {u,v}∩Λ≠∅} (φ_u − φ_v)`, as a field on `Λ⁺`
/// (dense on `Λ`, shell values in the boundary map; zero beyond).
pub fn laplacian(domain: &BoxDomain, phi: &Surface) -> Surface {
    let n = phi.ncomp();
    let mut out = Surface::zeros(domain.clone(), n);
    let mut buf = vec![0.0; n];
    let mut shell_acc: BoundaryValues = BTreeMap::new();
    for off in 0..domain.len() {
        let center: Vec<f64> = phi.at(off).to_vec();
        let acc = out.at_mut(off);
        domain.for_each_neighbor(off, &mut |_, noff, nv| match noff {
            Some(noff) => {
                // interior edge, u ∈ Λ
                let u = phi.at(noff);
                for c in 0..n {
                    acc[c] += u[c] - center[c];
                }
            }
            None => {
                // edge into the shell: contributes to Δ at v and at nv
                phi.get(nv, &mut buf);
                for c in 0..n {
                    acc[c] += buf[c] - center[c];
                }
                let entry = shell_acc.entry(nv.to_vec()).or_insert_with(|| vec![0.0; n]);
                for c in 0..n {
                    entry[c] += center[c] - buf[c];
                }
            }
        });
    }
    out.boundary = shell_acc;
    out
}

/// `(∇φ, ∇ψ)_Λ = Σ_{edges {u,v} meeting Λ} (φ_u−φ_v)·(ψ_u−ψ_v)`.
pub fn dirichlet_inner(domain: &BoxDomain, phi: &Surface, psi: &Surface) -> Result<f64> {
    check_compatible(phi, psi)?;
    let n = phi.ncomp();
    let mut total = 0.0;
    let mut pbuf = vec![0.0; n];
    let mut qbuf = vec![0.0; n];
    for off in 0..domain.len() {
        let pv = phi.at(off).to_vec();
        let qv = psi.at(off).to_vec();
        domain.for_each_neighbor(off, &mut |_, noff, nv| {
            match noff {
                Some(noff) => {
                    // count interior edges once, from the smaller offset
                    if noff > off {
                        let pu = phi.at(noff);
                        let qu = psi.at(noff);
                        for c in 0..n {
                            total += (pu[c] - pv[c]) * (qu[c] - qv[c]);
                        }
                    }
                }
                None => {
                    phi.get(nv, &mut pbuf);
                    psi.get(nv, &mut qbuf);
                    for c in 0..n {
                        total += (pbuf[c] - pv[c]) * (qbuf[c] - qv[c]);
                    }
                }
            }
        });
    }
    Ok(total)
}

/// Dirichlet energy `‖∇φ‖²_Λ`.
pub fn dirichlet_norm2(domain: &BoxDomain, phi: &Surface) -> f64 {
    dirichlet_inner(domain, phi, phi).expect("surface is compatible with itself")
}

/// Vertex inner product `(φ, ψ)` over `Λ⁺` (both zero beyond).
pub fn vertex_inner(domain: &BoxDomain, phi: &Surface, psi: &Surface) -> Result<f64> {
    check_compatible(phi, psi)?;
    let n = phi.ncomp();
    let mut total = 0.0;
    for off in 0..domain.len() {
        let a = phi.at(off);
        let b = psi.at(off);
        for c in 0..n {
            total += a[c] * b[c];
        }
    }
    // shell terms: only vertices where φ is nonzero can contribute
    let mut buf = vec![0.0; n];
    for (v, vals) in phi.boundary() {
        if domain.contains(v) {
            continue;
        }
        psi.get(v, &mut buf);
        for c in 0..n {
            total += vals[c] * buf[c];
        }
    }
    Ok(total)
}

/// The harmonic extension `τ̄^Λ`: equals `τ` off `Λ`, `Δ_Λ τ̄ = 0` on `Λ`.
///
/// d = 1 is solved exactly by the tridiagonal algorithm; higher dimensions
/// by conjugate gradients on `−Δ` (SPD) with residual max-norm below
/// 1e−11·max(1, ‖τ‖∞) and an iteration cap of 20·|Λ|.
pub fn harmonic_extension(domain: &BoxDomain, tau: &BoundaryValues) -> Result<Surface> {
    let ncomp = tau.values().next().map(|v| v.len()).unwrap_or(1);
    for vals in tau.values() {
        if vals.len() != ncomp {
            return Err(Error::Precondition("boundary values must share a component count".into()));
        }
        if !vals.iter().all(|x| x.is_finite()) {
            return Err(Error::Precondition("boundary values must be finite".into()));
        }
    }
    let mut out = Surface::with_boundary(domain.clone(), ncomp, tau.clone());
    let nverts = domain.len();

    let tau_scale = tau
        .values()
        .flatten()
        .fold(0.0f64, |m, &x| m.max(x.abs()))
        .max(1.0);

    // Right-hand side of (−Δ)x = b: b_v = Σ_{u~v, u∉Λ} τ_u per component.
    let mut rhs = vec![0.0; nverts * ncomp];
    let mut buf = vec![0.0; ncomp];
    for off in 0..nverts {
        domain.for_each_neighbor(off, &mut |_, noff, nv| {
            if noff.is_none() {
                out.get_boundary_or_zero(nv, &mut buf);
                for c in 0..ncomp {
                    rhs[off * ncomp + c] += buf[c];
                }
            }
        });
    }

    if domain.dim() == 1 {
        for c in 0..ncomp {
            let b: Vec<f64> = (0..nverts).map(|o| rhs[o * ncomp + c]).collect();
            let x = tridiag_neg_laplace_solve(&b);
            for o in 0..nverts {
                out.interior_mut()[o * ncomp + c] = x[o];
            }
        }
        return Ok(out);
    }

    let apply = |x: &[f64], y: &mut [f64]| neg_laplacian_dirichlet(domain, 1, x, y);
    for c in 0..ncomp {
        let b: Vec<f64> = (0..nverts).map(|o| rhs[o * ncomp + c]).collect();
        let x = cg_solve(apply, &b, 1e-11 * tau_scale, 20 * nverts.max(8))?;
        for o in 0..nverts {
            out.interior_mut()[o * ncomp + c] = x[o];
        }
    }
    Ok(out)
}

impl Surface {
    fn get_boundary_or_zero(&self, v: &[i64], out: &mut [f64]) {
        if let Some(vals) = self.boundary.get(v) {
            out.copy_from_slice(vals);
        } else {
            out.fill(0.0);
        }
    }
}

/// `y = (−Δ x)` on `Λ` with zero Dirichlet data, for `ncomp`-interleaved
/// vectors. The workhorse of the iterative solves.
pub fn neg_laplacian_dirichlet(domain: &BoxDomain, ncomp: usize, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), domain.len() * ncomp);
    debug_assert_eq!(y.len(), x.len());
    let deg = 2.0 * domain.dim() as f64;
    for off in 0..domain.len() {
        for c in 0..ncomp {
            y[off * ncomp + c] = deg * x[off * ncomp + c];
        }
        domain.for_each_neighbor(off, &mut |_, noff, _| {
            if let Some(noff) = noff {
                for c in 0..ncomp {
                    y[off * ncomp + c] -= x[noff * ncomp + c];
                }
            }
        });
    }
}

/// Dirichlet energy of the harmonic extension, `‖τ‖²_DE(Λ)`.
pub fn dirichlet_energy_of_bc(domain: &BoxDomain, tau: &BoundaryValues) -> Result<f64> {
    let ext = harmonic_extension(domain, tau)?;
    Ok(dirichlet_norm2(domain, &ext))
}
