//! Ground states of d-dimensional harmonic surfaces in (d+n)-dimensional
//! random environments.
//!
//! A surface is a map `φ: Z^d → R^n`, pinned to boundary data `τ` outside a
//! finite box `Λ`, with energy
//!
//! ```text
//! H(φ) = ½ Σ_{u~v, {u,v}∩Λ≠∅} ‖φ_u − φ_v‖²  +  λ Σ_{v∈Λ} η(v, φ_v)
//! ```
//!
//! where `η: Z^d × R^n → R ∪ {+∞}` is a seeded random environment. The crate
//! provides:
//!
//! * [`lattice`] — box domains, surfaces, discrete Laplacian, Dirichlet
//!   inner products and harmonic extension;
//! * [`disorder`] — reproducible environment generators (smoothed white
//!   noise, Poisson points, Brownian paths, linear, periodic, RPSG) with
//!   shift / resample / height-rescale transforms;
//! * [`solvers`] — exact dynamic programming (d = 1), exact min-cut
//!   (n = 1, any d), coordinate-descent local search, the linear-disorder
//!   closed form, and deterministic identity verifiers;
//! * [`greens`] — discrete Green's functions by linear solve and by
//!   random-walk Monte Carlo, potential-kernel values, gambler's-ruin and
//!   bound checks;
//! * [`experiments`] — replica orchestration, exponent fits (ξ, χ), scaling
//!   relation, d = 1 fluctuation sandwich, limit shape, localization
//!   profiles, concentration checks and the smooth shift function π.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only switches float math from `libm` to the host intrinsics.
//! All randomness is counter-based: every draw is a pure function of
//! (seed, stream tag, coordinates), so evaluation order, caching and
//! parallelism cannot change any result.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod disorder;
pub mod error;
pub mod experiments;
pub mod greens;
pub mod lattice;
pub mod math;
pub mod rng;
pub mod solvers;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{BoxDomain, Surface, Vertex};
