//! Run configuration: one JSON document drives every subcommand.
//!
//! Schema rules: unknown keys are rejected; every field has a default
//! except `kind`, `d` and `n`; normalization fills the defaults and is
//! idempotent. The normalized config is echoed into every report.

use serde::{Deserialize, Serialize};

use msre_core::disorder::{BumpProfile, DisorderParams, GeneratorKind};
use msre_core::experiments::{ExperimentConfig, GridPolicy, SolverChoice};
use msre_core::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// experiment kind: identity-check, solve, greens, exponents, scaling,
    /// limit-shape, profile, concentration, shiftpi, disorder-dump
    pub kind: String,
    pub d: usize,
    pub n: usize,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub disorder: DisorderBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub stats: StatsBlock,
    #[serde(default)]
    pub greens: GreensBlock,
    #[serde(default)]
    pub dump: DumpBlock,
    #[serde(default)]
    pub domain_l: Option<i64>,
    #[serde(default)]
    pub seed: u64,
    /// total budget in node-seconds (see README for the node-rate model);
    /// exceeded budgets are refused before any work starts
    #[serde(default)]
    pub budget_node_seconds: Option<f64>,
    #[serde(default)]
    pub out_dir: Option<String>,
    /// explicit surface-binary path for `solve` (overrides out_dir naming)
    #[serde(default)]
    pub out_surface: Option<String>,
    /// explicit per-vertex CSV path for `solve`
    #[serde(default)]
    pub out_csv: Option<String>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_lambda() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderBlock {
    #[serde(default = "default_disorder_kind")]
    pub kind: String,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_intensity")]
    pub intensity: f64,
    #[serde(default)]
    pub bump: BumpBlock,
}

fn default_disorder_kind() -> String {
    "white".into()
}

fn default_delta() -> f64 {
    0.25
}

fn default_intensity() -> f64 {
    1.0
}

impl Default for DisorderBlock {
    fn default() -> Self {
        DisorderBlock {
            kind: default_disorder_kind(),
            delta: default_delta(),
            intensity: default_intensity(),
            bump: BumpBlock::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpBlock {
    #[serde(default = "default_profile")]
    pub profile: String,
}

fn default_profile() -> String {
    "tent".into()
}

impl Default for BumpBlock {
    fn default() -> Self {
        BumpBlock { profile: default_profile() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    /// auto | dp | mincut | local | closed-form
    #[serde(default = "default_solver_name")]
    pub name: String,
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
}

fn default_solver_name() -> String {
    "auto".into()
}

fn default_restarts() -> usize {
    3
}

fn default_sweeps() -> usize {
    200
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock {
            name: default_solver_name(),
            window: None,
            step: None,
            restarts: default_restarts(),
            sweeps: default_sweeps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsBlock {
    #[serde(default = "default_sizes")]
    pub sizes: Vec<i64>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub fit_floor: i64,
    #[serde(default = "default_h_ladder")]
    pub h_ladder: Vec<f64>,
    #[serde(default = "default_x_ladder")]
    pub x_ladder: Vec<f64>,
    /// projection direction e; default e₁
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    /// fit ‖φ₀‖ instead of |φ₀·e|
    #[serde(default)]
    pub use_norm: bool,
    /// ε of the shift-function construction
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// instance count for identity checks
    #[serde(default = "default_instances")]
    pub instances: usize,
}

fn default_sizes() -> Vec<i64> {
    vec![8, 16, 32, 64]
}

fn default_replicas() -> usize {
    30
}

fn default_h_ladder() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0]
}

fn default_x_ladder() -> Vec<f64> {
    vec![0.5, 1.0]
}

fn default_epsilon() -> f64 {
    0.95
}

fn default_instances() -> usize {
    1000
}

impl Default for StatsBlock {
    fn default() -> Self {
        StatsBlock {
            sizes: default_sizes(),
            replicas: default_replicas(),
            fit_floor: 0,
            h_ladder: default_h_ladder(),
            x_ladder: default_x_ladder(),
            direction: None,
            use_norm: false,
            epsilon: default_epsilon(),
            instances: default_instances(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreensBlock {
    #[serde(default = "default_greens_l")]
    pub l: i64,
    #[serde(default)]
    pub source: Option<Vec<i64>>,
    #[serde(default)]
    pub target: Option<Vec<i64>>,
    /// exact | mc | bounds
    #[serde(default = "default_greens_mode")]
    pub mode: String,
    #[serde(default = "default_walkers")]
    pub walkers: u64,
    #[serde(default)]
    pub sizes: Option<Vec<i64>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_greens_l() -> i64 {
    8
}

fn default_greens_mode() -> String {
    "exact".into()
}

fn default_walkers() -> u64 {
    20_000
}

fn default_samples() -> usize {
    32
}

impl Default for GreensBlock {
    fn default() -> Self {
        GreensBlock {
            l: default_greens_l(),
            source: None,
            target: None,
            mode: default_greens_mode(),
            walkers: default_walkers(),
            sizes: None,
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpBlock {
    #[serde(default = "default_dump_span")]
    pub vertex_span: i64,
    #[serde(default = "default_dump_lo")]
    pub t_lo: f64,
    #[serde(default = "default_dump_hi")]
    pub t_hi: f64,
    #[serde(default = "default_dump_points")]
    pub t_points: usize,
}

fn default_dump_span() -> i64 {
    4
}

fn default_dump_lo() -> f64 {
    -4.0
}

fn default_dump_hi() -> f64 {
    4.0
}

fn default_dump_points() -> usize {
    65
}

impl Default for DumpBlock {
    fn default() -> Self {
        DumpBlock {
            vertex_span: default_dump_span(),
            t_lo: default_dump_lo(),
            t_hi: default_dump_hi(),
            t_points: default_dump_points(),
        }
    }
}

pub const KINDS: &[&str] = &[
    "identity-check",
    "solve",
    "greens",
    "exponents",
    "scaling",
    "limit-shape",
    "profile",
    "concentration",
    "shiftpi",
    "disorder-dump",
];

impl RunConfig {
    /// Parse a JSON document; parse errors carry line/column, validation
    /// errors name the offending key.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("parse error at line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn minimal(kind: &str, d: usize, n: usize) -> RunConfig {
        let text = format!("{{\"kind\": \"{kind}\", \"d\": {d}, \"n\": {n}}}");
        RunConfig::from_json(&text).expect("minimal config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version mismatch: file has {}, artifact expects {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if !KINDS.contains(&self.kind.as_str()) {
            return Err(Error::Config(format!(
                "unknown kind {:?}; expected one of {KINDS:?}",
                self.kind
            )));
        }
        if self.d == 0 {
            return Err(Error::Config("key d: must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("key n: must be at least 1".into()));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::Config("key lambda: must be positive".into()));
        }
        if self.stats.replicas == 0 {
            return Err(Error::Config("key stats.replicas: must be at least 1".into()));
        }
        if self.stats.sizes.is_empty() || self.stats.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "key stats.sizes: must be non-empty and strictly increasing".into(),
            ));
        }
        self.generator_kind()?;
        self.solver_choice()?;
        if let Some(dir) = &self.stats.direction {
            if dir.len() != self.n {
                return Err(Error::Config("key stats.direction: length must equal n".into()));
            }
        }
        if !(self.stats.epsilon > 0.0 && self.stats.epsilon < 1.0) {
            return Err(Error::Config("key stats.epsilon: must lie in (0,1)".into()));
        }
        Ok(())
    }

    /// The normalized (defaults-filled) JSON document. Idempotent:
    /// `normalize(normalize(c)) == normalize(c)`.
    pub fn normalized_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn generator_kind(&self) -> Result<GeneratorKind> {
        Ok(match self.disorder.kind.as_str() {
            "white" => GeneratorKind::White,
            "poisson" => GeneratorKind::Poisson,
            "brownian" => GeneratorKind::Brownian,
            "linear" => GeneratorKind::Linear,
            "periodic-white" => GeneratorKind::PeriodicWhite,
            "rpsg" => GeneratorKind::Rpsg,
            other => {
                if other == "fbm" || other == "fractional-brownian" {
                    return Err(Error::Config(
                        "key disorder.kind: fractional Brownian disorder with H ≠ 1/2 is not supported".into(),
                    ));
                }
                return Err(Error::Config(format!("key disorder.kind: unknown kind {other:?}")));
            }
        })
    }

    pub fn solver_choice(&self) -> Result<SolverChoice> {
        Ok(match self.solver.name.as_str() {
            "auto" => SolverChoice::Auto,
            "dp" => SolverChoice::Dp1d,
            "mincut" => SolverChoice::MinCut,
            "local" => SolverChoice::Local,
            "closed-form" => SolverChoice::LinearClosedForm,
            other => {
                return Err(Error::Config(format!("key solver.name: unknown solver {other:?}")))
            }
        })
    }

    pub fn bump_profile(&self) -> Result<BumpProfile> {
        match self.disorder.bump.profile.as_str() {
            "tent" => Ok(BumpProfile::Tent),
            other => Err(Error::Config(format!("key disorder.bump.profile: unknown profile {other:?}"))),
        }
    }

    pub fn disorder_params(&self, seed: u64) -> Result<DisorderParams> {
        let mut p = DisorderParams::new(self.generator_kind()?, seed, self.n);
        p.delta = self.disorder.delta;
        p.intensity = self.disorder.intensity;
        p.bump = self.bump_profile()?;
        Ok(p)
    }

    /// Budget in solver nodes: node-seconds × the nominal node rate.
    pub fn budget_nodes(&self) -> Option<u64> {
        const NODES_PER_SECOND: f64 = 1e8;
        self.budget_node_seconds.map(|s| (s * NODES_PER_SECOND).max(0.0) as u64)
    }

    /// Assemble the core experiment config.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(self.d, self.n, self.disorder_params(self.seed)?);
        cfg.lambda = self.lambda;
        if let Some(dir) = &self.stats.direction {
            cfg.direction = dir.clone();
        }
        cfg.sizes = self.stats.sizes.clone();
        cfg.replicas = self.stats.replicas;
        cfg.master_seed = self.seed;
        cfg.solver = self.solver_choice()?;
        cfg.grid = GridPolicy { window: self.solver.window, step: self.solver.step };
        cfg.fit_floor = self.stats.fit_floor;
        cfg.restarts = self.solver.restarts;
        cfg.sweeps = self.solver.sweeps;
        cfg.budget_nodes = self.budget_nodes();
        cfg.validate()?;
        Ok(cfg)
    }
}
