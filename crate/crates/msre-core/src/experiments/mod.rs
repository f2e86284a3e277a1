//! Monte Carlo replica orchestration and the statistical checks built on
//! it: exponent estimation (ξ, χ), the scaling relation gap, the d = 1
//! fluctuation sandwich, the limit-shape identity, localization profiles,
//! delocalization fractions, concentration checks and the smooth shift
//! function π.
//!
//! Everything is deterministic given the experiment config: replica
//! (size, index) pairs map to disorder seeds through the keyed counter
//! streams, and reductions are ordered folds. [`replica_task`] exposes the
//! per-replica unit of work so a caller may fan replicas out across
//! threads and merge by index with identical results.

mod checks;
mod fits;
mod shiftpi;

pub use checks::{
    check_concentration, check_d1_sandwich, check_limit_shape_d1, check_scaling_relation,
    delocalization_fraction, localization_profile, ConcentrationReport, FractionReport,
    LimitShapeReport, ProfileReport, SandwichReport, ScalingReport,
};
pub use fits::{estimate_energy_fluct, estimate_transversal, ExponentFit, SizeStat};
pub use shiftpi::{build_shift_pi, ShiftPiReport};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::disorder::{DisorderField, DisorderParams};
use crate::error::{Error, Result};
use crate::lattice::{dirichlet_norm2, BoxDomain};
use crate::math;
use crate::rng::{Key, Stream};
use crate::solvers::{
    default_grid, solve_auto, solve_dp_1d, solve_linear_closed_form, solve_local, solve_mincut,
    EnergyModel, GroundState, HeightGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Auto,
    Dp1d,
    MinCut,
    Local,
    LinearClosedForm,
}

/// Height-grid policy: defaults from the localization envelope, either
/// override pins the value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridPolicy {
    pub window: Option<f64>,
    pub step: Option<f64>,
}

impl GridPolicy {
    pub fn build(&self, domain: &BoxDomain, lambda: f64, ncomp: usize) -> Result<HeightGrid> {
        let auto = default_grid(domain, lambda, ncomp)?;
        let half = (auto.points_per_axis - 1) / 2;
        let window = self.window.unwrap_or(half as f64 * auto.step);
        let step = self.step.unwrap_or(auto.step);
        HeightGrid::symmetric(window, step, ncomp)
    }
}

/// One Monte Carlo experiment: model family, size ladder, replica count.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub d: usize,
    pub ncomp: usize,
    pub disorder: DisorderParams,
    pub lambda: f64,
    /// projection direction e (unit vector in R^n)
    pub direction: Vec<f64>,
    pub sizes: Vec<i64>,
    pub replicas: usize,
    pub master_seed: u64,
    pub solver: SolverChoice,
    pub grid: GridPolicy,
    /// collect the d = 1 boundary-band maxima M_{2^j}
    pub collect_band_maxima: bool,
    /// keep per-replica sorted height norms (profiles, fractions)
    pub collect_norms: bool,
    /// total node budget across all solves (refused up front if exceeded)
    pub budget_nodes: Option<u64>,
    /// drop sizes below this value from fits
    pub fit_floor: i64,
    pub restarts: usize,
    pub sweeps: usize,
}

impl ExperimentConfig {
    pub fn new(d: usize, ncomp: usize, disorder: DisorderParams) -> Self {
        let mut direction = vec![0.0; ncomp];
        direction[0] = 1.0;
        ExperimentConfig {
            d,
            ncomp,
            disorder,
            lambda: 1.0,
            direction,
            sizes: vec![8, 16, 32, 64],
            replicas: 30,
            master_seed: 0,
            solver: SolverChoice::Auto,
            grid: GridPolicy::default(),
            collect_band_maxima: false,
            collect_norms: false,
            budget_nodes: None,
            fit_floor: 0,
            restarts: 3,
            sweeps: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.ncomp == 0 {
            return Err(Error::Config("d and n must be at least 1".into()));
        }
        if self.direction.len() != self.ncomp {
            return Err(Error::Config("direction vector length must equal n".into()));
        }
        let norm: f64 = math::sqrt(self.direction.iter().map(|&x| x * x).sum());
        if math::abs(norm - 1.0) > 1e-12 {
            return Err(Error::Config(format!("direction must be a unit vector, ‖e‖ = {norm}")));
        }
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sizes must be strictly increasing and non-empty".into()));
        }
        if self.replicas == 0 {
            return Err(Error::Config("at least one replica required".into()));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::Config("λ must be positive".into()));
        }
        Ok(())
    }

    /// Upper estimate of total solver nodes (|Λ|·states per replica).
    pub fn estimated_nodes(&self) -> Result<u64> {
        let mut total = 0u64;
        for &l in &self.sizes {
            let domain = BoxDomain::cube(self.d, l);
            let grid = self.grid.build(&domain, self.lambda, self.ncomp)?;
            let per = domain.len() as u64 * grid.states() as u64;
            total = total.saturating_add(per.saturating_mul(self.replicas as u64));
        }
        Ok(total)
    }

    /// Disorder seed for one replica: a pure function of the master seed
    /// and the replica coordinates.
    pub fn replica_seed(&self, size: i64, replica: usize) -> u64 {
        Key::new(self.master_seed, Stream::Replica)
            .absorb(size as u64)
            .absorb(replica as u64)
            .word(0)
    }

    pub fn field_for(&self, seed: u64) -> Result<DisorderField> {
        let mut p = self.disorder.clone();
        p.seed = seed;
        p.ncomp = self.ncomp;
        DisorderField::new(p)
    }

    /// A stable fingerprint of the model family, used to refuse fits from
    /// mismatched configurations.
    pub fn family_fingerprint(&self) -> u64 {
        let key = Key::new(self.master_seed, Stream::Replica)
            .absorb(self.d as u64)
            .absorb(self.ncomp as u64)
            .absorb(self.lambda.to_bits())
            .absorb(self.disorder.kind as u64);
        key.word(0xf17)
    }
}

/// Per-replica statistics extracted from a solved ground state.
#[derive(Debug, Clone)]
pub struct ReplicaResult {
    pub size: i64,
    pub replica: usize,
    pub ge: f64,
    /// |φ₀ · e|
    pub center_abs_e: f64,
    /// ‖φ₀‖
    pub center_norm: f64,
    /// M_{2^j} for j = 0..⌈log₂L⌉ (d = 1 only, when collected)
    pub band_maxima: Vec<f64>,
    /// (r_v, Σ‖φ_v‖, count) per boundary distance
    pub profile: Vec<(i64, f64, u64)>,
    /// ‖∇φ‖²_Λ
    pub grad_norm2: f64,
    /// sorted ‖φ_v‖ over Λ (when collected)
    pub norms: Vec<f64>,
    pub window_saturated: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// Solve one replica and extract its statistics.
pub fn replica_task(config: &ExperimentConfig, size: i64, replica: usize) -> Result<ReplicaResult> {
    let domain = BoxDomain::cube(config.d, size);
    let seed = config.replica_seed(size, replica);
    let field = config.field_for(seed)?;
    let model = EnergyModel::new(domain.clone(), field, config.lambda, Default::default())?;
    let grid = config.grid.build(&domain, config.lambda, config.ncomp)?;
    let gs: GroundState = match config.solver {
        SolverChoice::Auto => solve_auto(&model, &grid)?,
        SolverChoice::Dp1d => solve_dp_1d(&model, &grid)?,
        SolverChoice::MinCut => solve_mincut(&model, &grid)?,
        SolverChoice::Local => solve_local(&model, &grid, config.restarts, config.sweeps)?,
        SolverChoice::LinearClosedForm => solve_linear_closed_form(&model)?,
    };
    extract_stats(config, size, replica, &domain, &gs)
}

fn extract_stats(
    config: &ExperimentConfig,
    size: i64,
    replica: usize,
    domain: &BoxDomain,
    gs: &GroundState,
) -> Result<ReplicaResult> {
    let center = vec![0i64; config.d];
    let center_off = domain.offset(&center).expect("origin is inside the cube");
    let phi0 = gs.surface.at(center_off);
    let center_abs_e = math::abs(dot(phi0, &config.direction));
    let center_norm = norm(phi0);

    // M_k = max_{L−k ≤ |v| ≤ L} |φ_v·e| for k = 2^j; the last j is the
    // first with 2^j ≥ L, where the band is all of Λ_L
    let mut band_maxima = Vec::new();
    if config.collect_band_maxima && config.d == 1 {
        let mut j = 0i64;
        loop {
            let k = 1i64 << j;
            let mut m = 0.0f64;
            for off in 0..domain.len() {
                let v = domain.vertex_at(off)[0];
                if v.abs() >= size - k {
                    m = m.max(math::abs(dot(gs.surface.at(off), &config.direction)));
                }
            }
            band_maxima.push(m);
            if k >= size {
                break;
            }
            j += 1;
        }
    }

    let mut profile_map: alloc::collections::BTreeMap<i64, (f64, u64)> = Default::default();
    let mut norms = Vec::new();
    for off in 0..domain.len() {
        let v = domain.vertex_at(off);
        let r = domain.boundary_distance(&v)?;
        let nn = norm(gs.surface.at(off));
        let entry = profile_map.entry(r).or_insert((0.0, 0));
        entry.0 += nn;
        entry.1 += 1;
        if config.collect_norms {
            norms.push(nn);
        }
    }
    norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let profile: Vec<(i64, f64, u64)> =
        profile_map.into_iter().map(|(r, (s, c))| (r, s, c)).collect();
    let grad_norm2 = dirichlet_norm2(domain, &gs.surface);

    Ok(ReplicaResult {
        size,
        replica,
        ge: gs.energy,
        center_abs_e,
        center_norm,
        band_maxima,
        profile,
        grad_norm2,
        norms,
        window_saturated: gs.window_saturated,
    })
}

/// Run every (size, replica) pair sequentially in index order.
pub fn run_replicas(config: &ExperimentConfig) -> Result<Vec<ReplicaResult>> {
    config.validate()?;
    if let Some(budget) = config.budget_nodes {
        let est = config.estimated_nodes()?;
        if est > budget {
            return Err(Error::Resource(format!(
                "estimated {est} solver nodes exceed the budget of {budget}; refusing before any work"
            )));
        }
    }
    let mut out = Vec::with_capacity(config.sizes.len() * config.replicas);
    for &size in &config.sizes {
        for rep in 0..config.replicas {
            let r = replica_task(config, size, rep).map_err(|e| match e {
                Error::Infeasible(m) => {
                    Error::Infeasible(format!("size {size}, replica {rep}: {m}"))
                }
                other => other,
            })?;
            out.push(r);
        }
    }
    Ok(out)
}
