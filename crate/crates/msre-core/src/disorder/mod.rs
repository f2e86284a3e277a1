//! Seeded, reproducible random environments `η: Z^d × R^n → R ∪ {+∞}`.
//!
//! Six generator kinds are provided:
//!
//! * `white` — per-vertex white noise convolved with a compactly supported
//!   Lipschitz bump, discretized on a height grid of spacing `δ`:
//!   `η(v,t) = δ^{n/2} Σ_k g_{v,k} b(x_k − t)` over grid points
//!   `x_k = kδ` with `‖x_k − t‖ < 1`. The finite sum is itself an exact,
//!   legal disorder: every deterministic identity holds for it exactly;
//!   only continuum-law statistics carry an O(δ) bias.
//! * `poisson` — unit-cell Poisson points of intensity ρ; the environment
//!   is 0 on the points and +∞ elsewhere.
//! * `brownian` (n = 1) — two-sided random walks with N(0, δ) increments,
//!   linearly interpolated, pinned to 0 at the origin.
//! * `linear` — `η(v,t) = ζ_v · t` with standard Gaussian slopes `ζ_v`.
//! * `periodic_white` — white noise on the unit torus convolved with the
//!   bump; exactly 1-periodic in every height coordinate.
//! * `rpsg` — the uniformly shifted lattice `Z^n + U_v` (0 on it, +∞ off).
//!
//! Three height-space transforms wrap any field without mutating it:
//! `shift` (`η^s(v,t) = η(v, t − s_v)`), `resample` on a vertex set, and
//! `rescale` (`η^λ(v,t) = η(v, t√λ)`).
//!
//! Every value is a pure function of (seed, stream, coordinates): there is
//! no generator state, so evaluation order and sharing across threads are
//! immaterial, and repeated evaluation is bit-identical by construction.

mod generators;

pub use generators::{Generator, GeneratorKind};

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Surface, Vertex};
use crate::math;

/// Most components supported in a height vector; keeps hot-path buffers on
/// the stack.
pub const MAX_NCOMP: usize = 8;

/// Point tolerance for the {0, +∞} disorders.
pub const POINT_TOL: f64 = 1e-12;

/// Named bump profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpProfile {
    /// `b(t) = c_n · max(0, 1 − ‖t‖)`.
    Tent,
}

/// The smoothing kernel of the white-noise disorders.
///
/// Axioms: Lipschitz, supported in the unit ball, `∫ b² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFunction {
    profile: BumpProfile,
    ncomp: usize,
    norm: f64,
}

impl BumpFunction {
    pub fn new(profile: BumpProfile, ncomp: usize) -> Result<Self> {
        if ncomp == 0 || ncomp > MAX_NCOMP {
            return Err(Error::Param(format!(
                "component count must be in 1..={MAX_NCOMP}, got {ncomp}"
            )));
        }
        let norm = match profile {
            BumpProfile::Tent => {
                // ∫ (1−‖t‖)²₊ dt = S_{n−1} ∫₀¹ (1−r)² r^{n−1} dr, the radial
                // factor by composite Simpson (machine precision for this
                // low-degree polynomial integrand).
                let radial = simpson(|r| {
                    if ncomp == 1 {
                        (1.0 - r) * (1.0 - r)
                    } else {
                        math::powf(r, (ncomp - 1) as f64) * (1.0 - r) * (1.0 - r)
                    }
                });
                let integral = math::unit_sphere_area(ncomp as u32) * radial;
                1.0 / math::sqrt(integral)
            }
        };
        Ok(BumpFunction { profile, ncomp, norm })
    }

    pub fn tent(ncomp: usize) -> Result<Self> {
        BumpFunction::new(BumpProfile::Tent, ncomp)
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn profile(&self) -> BumpProfile {
        self.profile
    }

    /// The normalization constant `c_n`.
    pub fn norm_const(&self) -> f64 {
        self.norm
    }

    /// The (smallest) Lipschitz constant; for the tent profile this is `c_n`.
    pub fn lipschitz(&self) -> f64 {
        self.norm
    }

    #[inline]
    pub fn eval(&self, t: &[f64]) -> f64 {
        debug_assert_eq!(t.len(), self.ncomp);
        let r2: f64 = t.iter().map(|&x| x * x).sum();
        if r2 >= 1.0 {
            return 0.0;
        }
        self.norm * (1.0 - math::sqrt(r2))
    }

    /// Scalar-height fast path.
    #[inline]
    pub fn eval1(&self, x: f64) -> f64 {
        let a = math::abs(x);
        if a >= 1.0 {
            0.0
        } else {
            self.norm * (1.0 - a)
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64) -> f64 {
    let n = 1 << 10;
    let h = 1.0 / n as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

/// Parameters for a base generator.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderParams {
    pub kind: GeneratorKind,
    pub seed: u64,
    pub ncomp: usize,
    /// Height-grid spacing for white / brownian / periodic kinds.
    pub delta: f64,
    /// Poisson intensity per unit height-volume.
    pub intensity: f64,
    pub bump: BumpProfile,
}

impl DisorderParams {
    pub fn new(kind: GeneratorKind, seed: u64, ncomp: usize) -> Self {
        DisorderParams {
            kind,
            seed,
            ncomp,
            delta: 0.25,
            intensity: 1.0,
            bump: BumpProfile::Tent,
        }
    }
}

/// An evaluatable random environment, possibly wrapped by height-space
/// transforms. Immutable; transforms return new handles sharing nothing
/// mutable with the source.
#[derive(Debug, Clone)]
pub enum DisorderField {
    Base(Generator),
    /// `η^s(v, t) = η(v, t − s_v)`; `s` zero-extended off its domain.
    Shifted { inner: Box<DisorderField>, shift: Box<Surface> },
    /// `η^λ(v, t) = η(v, t·√λ)`.
    Rescaled { inner: Box<DisorderField>, sqrt_lambda: f64 },
    /// Agrees with `inner` off `delta`; an independent copy on it.
    Resampled {
        inner: Box<DisorderField>,
        delta: Box<BTreeSet<Vertex>>,
        fresh: Box<DisorderField>,
    },
}

impl DisorderField {
    pub fn new(params: DisorderParams) -> Result<Self> {
        Ok(DisorderField::Base(Generator::new(params)?))
    }

    pub fn ncomp(&self) -> usize {
        match self {
            DisorderField::Base(g) => g.ncomp(),
            DisorderField::Shifted { inner, .. } => inner.ncomp(),
            DisorderField::Rescaled { inner, .. } => inner.ncomp(),
            DisorderField::Resampled { inner, .. } => inner.ncomp(),
        }
    }

    pub fn kind(&self) -> GeneratorKind {
        match self {
            DisorderField::Base(g) => g.kind(),
            DisorderField::Shifted { inner, .. } => inner.kind(),
            DisorderField::Rescaled { inner, .. } => inner.kind(),
            DisorderField::Resampled { inner, .. } => inner.kind(),
        }
    }

    /// Point-supported kinds take values in {0, +∞}.
    pub fn is_point_support(&self) -> bool {
        matches!(self.kind(), GeneratorKind::Poisson | GeneratorKind::Rpsg)
    }

    /// Kinds with continuous sample paths (eligible for continuous local
    /// refinement in the heuristic solver).
    pub fn has_continuous_paths(&self) -> bool {
        !self.is_point_support()
    }

    /// `η(v, t)`.
    pub fn eval(&self, v: &[i64], t: &[f64]) -> f64 {
        debug_assert_eq!(t.len(), self.ncomp());
        match self {
            DisorderField::Base(g) => g.eval(v, t),
            DisorderField::Shifted { inner, shift } => {
                let mut s = [0.0f64; MAX_NCOMP];
                shift.get(v, &mut s[..t.len()]);
                let mut tt = [0.0f64; MAX_NCOMP];
                for c in 0..t.len() {
                    tt[c] = t[c] - s[c];
                }
                inner.eval(v, &tt[..t.len()])
            }
            DisorderField::Rescaled { inner, sqrt_lambda } => {
                let mut tt = [0.0f64; MAX_NCOMP];
                for c in 0..t.len() {
                    tt[c] = t[c] * sqrt_lambda;
                }
                inner.eval(v, &tt[..t.len()])
            }
            DisorderField::Resampled { inner, delta, fresh } => {
                if delta.contains(&v.to_vec()) {
                    fresh.eval(v, t)
                } else {
                    inner.eval(v, t)
                }
            }
        }
    }

    /// `η(v, t_i)` for many scalar heights at one vertex (n = 1 only).
    ///
    /// Bit-identical to calling [`eval`](Self::eval) per point; generators
    /// with grid structure fill the batch in one pass.
    pub fn eval_batch_1d(&self, v: &[i64], ts: &[f64], out: &mut [f64]) {
        debug_assert_eq!(self.ncomp(), 1);
        debug_assert_eq!(ts.len(), out.len());
        match self {
            DisorderField::Base(g) => g.eval_batch_1d(v, ts, out),
            DisorderField::Shifted { inner, shift } => {
                let mut s = [0.0f64; 1];
                shift.get(v, &mut s);
                let shifted: Vec<f64> = ts.iter().map(|&t| t - s[0]).collect();
                inner.eval_batch_1d(v, &shifted, out);
            }
            DisorderField::Rescaled { inner, sqrt_lambda } => {
                let scaled: Vec<f64> = ts.iter().map(|&t| t * sqrt_lambda).collect();
                inner.eval_batch_1d(v, &scaled, out);
            }
            DisorderField::Resampled { inner, delta, fresh } => {
                if delta.contains(&v.to_vec()) {
                    fresh.eval_batch_1d(v, ts, out)
                } else {
                    inner.eval_batch_1d(v, ts, out)
                }
            }
        }
    }

    /// Shifted disorder `η^s`. Composition satisfies
    /// `shift(shift(η, s), r) ≡ shift(η, s + r)` pointwise.
    pub fn shifted(&self, s: Surface) -> DisorderField {
        DisorderField::Shifted { inner: Box::new(self.clone()), shift: Box::new(s) }
    }

    /// Height-rescaled disorder `η^λ`.
    pub fn rescaled(&self, lambda: f64) -> Result<DisorderField> {
        if !(lambda > 0.0) {
            return Err(Error::Param(format!("rescale requires λ > 0, got {lambda}")));
        }
        Ok(DisorderField::Rescaled {
            inner: Box::new(self.clone()),
            sqrt_lambda: math::sqrt(lambda),
        })
    }

    /// Resample on `delta × R^n` from a fresh seed; pointwise identical
    /// elsewhere.
    pub fn resampled(&self, delta: BTreeSet<Vertex>, fresh_seed: u64) -> DisorderField {
        let fresh = self.reseeded(fresh_seed);
        DisorderField::Resampled {
            inner: Box::new(self.clone()),
            delta: Box::new(delta),
            fresh: Box::new(fresh),
        }
    }

    /// A structurally identical field driven by a different master seed.
    fn reseeded(&self, seed: u64) -> DisorderField {
        match self {
            DisorderField::Base(g) => DisorderField::Base(g.reseeded(seed)),
            DisorderField::Shifted { inner, shift } => DisorderField::Shifted {
                inner: Box::new(inner.reseeded(seed)),
                shift: shift.clone(),
            },
            DisorderField::Rescaled { inner, sqrt_lambda } => DisorderField::Rescaled {
                inner: Box::new(inner.reseeded(seed)),
                sqrt_lambda: *sqrt_lambda,
            },
            DisorderField::Resampled { inner, delta, fresh } => DisorderField::Resampled {
                inner: Box::new(inner.reseeded(seed ^ 0x9e37)),
                delta: delta.clone(),
                fresh: Box::new(fresh.reseeded(seed ^ 0x79b9)),
            },
        }
    }

    /// True when the field is an unwrapped linear generator, so the exact
    /// closed-form solver applies.
    pub fn linear_slopes_available(&self) -> bool {
        matches!(self, DisorderField::Base(g) if g.kind() == GeneratorKind::Linear)
    }

    /// The slope vector `ζ_v` of an unwrapped linear generator.
    pub fn linear_slope(&self, v: &[i64]) -> Option<Vec<f64>> {
        match self {
            DisorderField::Base(g) if g.kind() == GeneratorKind::Linear => {
                Some(g.linear_slope(v))
            }
            _ => None,
        }
    }

    /// All support points of a point-type disorder at `v` in the half-open
    /// box `[lo_i, hi_i)`, sorted lexicographically. `None` for kinds with
    /// full support.
    pub fn candidates(&self, v: &[i64], lo: &[f64], hi: &[f64]) -> Option<Vec<Vec<f64>>> {
        match self {
            DisorderField::Base(g) => g.candidates(v, lo, hi),
            DisorderField::Shifted { inner, shift } => {
                let n = self.ncomp();
                let mut s = vec![0.0; n];
                shift.get(v, &mut s);
                let ilo: Vec<f64> = (0..n).map(|c| lo[c] - s[c]).collect();
                let ihi: Vec<f64> = (0..n).map(|c| hi[c] - s[c]).collect();
                let mut pts = inner.candidates(v, &ilo, &ihi)?;
                for p in &mut pts {
                    for c in 0..n {
                        p[c] += s[c];
                    }
                }
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                Some(pts)
            }
            DisorderField::Rescaled { inner, sqrt_lambda } => {
                let n = self.ncomp();
                let ilo: Vec<f64> = (0..n).map(|c| lo[c] * sqrt_lambda).collect();
                let ihi: Vec<f64> = (0..n).map(|c| hi[c] * sqrt_lambda).collect();
                let mut pts = inner.candidates(v, &ilo, &ihi)?;
                for p in &mut pts {
                    for c in 0..n {
                        p[c] /= sqrt_lambda;
                    }
                }
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                Some(pts)
            }
            DisorderField::Resampled { inner, delta, fresh } => {
                if delta.contains(&v.to_vec()) {
                    fresh.candidates(v, lo, hi)
                } else {
                    inner.candidates(v, lo, hi)
                }
            }
        }
    }
}
