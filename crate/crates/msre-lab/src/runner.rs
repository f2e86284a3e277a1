//! Subcommand drivers: route a validated config to the owning module,
//! assemble the report envelope, and emit CSV / gnuplot artifacts.

use std::path::Path;
use std::time::Instant;

use serde_json::json;

use msre_core::disorder::DisorderField;
use msre_core::experiments::{
    build_shift_pi, check_concentration, check_d1_sandwich, check_limit_shape_d1,
    check_scaling_relation, delocalization_fraction, estimate_energy_fluct, estimate_transversal,
    localization_profile, replica_task, ExperimentConfig, ExponentFit, ReplicaResult,
};
use msre_core::greens::{
    check_green_bounds, exit_time_tail_check, gambler_ruin_check, green_exact, green_mc,
};
use msre_core::lattice::{BoxDomain, Surface};
use msre_core::rng::{Counter, Key, Stream};
use msre_core::solvers::{
    energy, hamiltonian, solve_auto, solve_dp_1d, solve_linear_closed_form, solve_local,
    solve_mincut, verify_main_identity, EnergyModel, Exactness, GroundState, SolverTag,
};
use msre_core::{Error, Result};

use crate::config::RunConfig;
use crate::report::{Assertion, ReportEnvelope};
use crate::surface_io;

pub fn log_enabled(level: &str) -> bool {
    let setting = std::env::var("MSRE_LOG").unwrap_or_else(|_| "error".into());
    let rank = |s: &str| match s {
        "debug" => 2,
        "info" => 1,
        _ => 0,
    };
    rank(level) <= rank(&setting)
}

macro_rules! log_info {
    ($($arg:tt)*) => {
        if crate::runner::log_enabled("info") {
            eprintln!($($arg)*);
        }
    };
}

/// Exit-code contract: 0 all assertions pass, 2 assertion failure,
/// 3 infeasibility or precondition, 4 budget refusal.
pub fn exit_code(outcome: &Result<ReportEnvelope>) -> i32 {
    match outcome {
        Ok(env) => {
            if env.pass {
                0
            } else {
                2
            }
        }
        Err(Error::Resource(_)) => 4,
        Err(_) => 3,
    }
}

/// Run every (size, replica) task across `threads` workers and merge by
/// index; bit-identical to the sequential fold.
pub fn run_replicas_parallel(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<ReplicaResult>> {
    cfg.validate()?;
    if let Some(budget) = cfg.budget_nodes {
        let est = cfg.estimated_nodes()?;
        if est > budget {
            return Err(Error::Resource(format!(
                "estimated {est} solver nodes exceed the budget of {budget}; refusing before any work"
            )));
        }
    }
    let tasks: Vec<(i64, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&l| (0..cfg.replicas).map(move |r| (l, r)))
        .collect();
    let threads = threads.max(1).min(tasks.len().max(1));
    let mut out: Vec<Option<Result<ReplicaResult>>> = (0..tasks.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunks: Vec<&mut [Option<Result<ReplicaResult>>]> =
            chunk_mut(&mut out, tasks.len().div_ceil(threads));
        let mut start = 0usize;
        for chunk in chunks {
            let len = chunk.len();
            let slice = &tasks[start..start + len];
            start += len;
            scope.spawn(move || {
                for (slot, &(l, r)) in chunk.iter_mut().zip(slice) {
                    *slot = Some(replica_task(cfg, l, r));
                }
            });
        }
    });
    out.into_iter().map(|s| s.expect("every task ran")).collect()
}

fn chunk_mut<T>(v: &mut [T], size: usize) -> Vec<&mut [T]> {
    let mut rest = v;
    let mut out = Vec::new();
    while !rest.is_empty() {
        let take = size.min(rest.len());
        let (a, b) = rest.split_at_mut(take);
        out.push(a);
        rest = b;
    }
    out
}

fn thread_count(config: &RunConfig) -> usize {
    config
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn check_budget_simple(config: &RunConfig, estimated_nodes: u64) -> Result<()> {
    if let Some(budget) = config.budget_nodes() {
        if estimated_nodes > budget {
            return Err(Error::Resource(format!(
                "estimated {estimated_nodes} nodes exceed the budget; refusing before any work"
            )));
        }
    }
    Ok(())
}

/// Route a config to its subcommand implementation.
pub fn dispatch(config: &RunConfig) -> Result<ReportEnvelope> {
    config.validate()?;
    let t0 = Instant::now();
    if config.d == 4 {
        eprintln!(
            "advisory: d = 4 runs are generatable but excluded from acceptance \
             (poly-log laws are indistinguishable at desk scale)"
        );
    }
    let out = match config.kind.as_str() {
        "identity-check" => identity_check(config),
        "solve" => solve_one(config),
        "greens" => greens_cmd(config),
        "exponents" => exponents_cmd(config, false),
        "scaling" => exponents_cmd(config, true),
        "limit-shape" => limit_shape_cmd(config),
        "profile" => profile_cmd(config),
        "concentration" => concentration_cmd(config),
        "shiftpi" => shiftpi_cmd(config),
        "disorder-dump" => disorder_dump_cmd(config),
        other => Err(Error::Config(format!("unknown kind {other:?}"))),
    };
    log_info!("{} finished in {:?}", config.kind, t0.elapsed());
    out
}

fn random_surface(domain: &BoxDomain, n: usize, key: Key, scale: f64) -> Surface {
    let mut ctr = Counter::new(key);
    let mut s = Surface::zeros(domain.clone(), n);
    for x in s.interior_mut() {
        *x = scale * ctr.normal();
    }
    s
}

fn identity_check(config: &RunConfig) -> Result<ReportEnvelope> {
    let l = config.domain_l.unwrap_or(4);
    let domain = BoxDomain::cube(config.d, l);
    check_budget_simple(config, (domain.len() * config.stats.instances) as u64)?;
    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    let mut worst = 0.0f64;
    for i in 0..config.stats.instances {
        let params = config.disorder_params(config.seed.wrapping_add(i as u64))?;
        let field = DisorderField::new(params)?;
        let base = Key::new(config.seed, Stream::Test).absorb(i as u64);
        let phi = random_surface(&domain, config.n, base.absorb(1), 2.0);
        let s = random_surface(&domain, config.n, base.absorb(2), 1.5);
        let h = hamiltonian(&domain, &field, config.lambda, &phi);
        let resid = verify_main_identity(&field, config.lambda, &domain, &phi, &s)?;
        worst = worst.max(resid / (1.0 + h.abs()));
    }
    envelope.push(Assertion::le("main-identity-relative-residual", worst, 1e-9));
    envelope.details = json!({"instances": config.stats.instances, "domain_l": l});
    Ok(envelope)
}

fn solver_tag_name(tag: SolverTag) -> &'static str {
    match tag {
        SolverTag::Dp1d => "dp",
        SolverTag::MinCut => "mincut",
        SolverTag::Local => "local",
        SolverTag::LinearClosedForm => "closed-form",
    }
}

fn exactness_name(e: Exactness) -> &'static str {
    match e {
        Exactness::ExactOnGrid => "exact-on-grid",
        Exactness::Exact => "exact",
        Exactness::Heuristic => "heuristic",
    }
}

fn solve_one(config: &RunConfig) -> Result<ReportEnvelope> {
    let l = config.domain_l.unwrap_or(8);
    let domain = BoxDomain::cube(config.d, l);
    let cfg = config.experiment()?;
    let grid = cfg.grid.build(&domain, config.lambda, config.n)?;
    check_budget_simple(config, (domain.len() * grid.states()) as u64)?;
    let field = DisorderField::new(config.disorder_params(config.seed)?)?;
    let model = EnergyModel::new(domain.clone(), field, config.lambda, Default::default())?;
    let gs: GroundState = match config.solver.name.as_str() {
        "auto" => solve_auto(&model, &grid)?,
        "dp" => solve_dp_1d(&model, &grid)?,
        "mincut" => solve_mincut(&model, &grid)?,
        "local" => solve_local(&model, &grid, config.solver.restarts, config.solver.sweeps)?,
        "closed-form" => solve_linear_closed_form(&model)?,
        other => return Err(Error::Config(format!("unknown solver {other:?}"))),
    };
    let recomputed = energy(&model, &gs.surface)?;
    let resid = (gs.energy - recomputed).abs() / (1.0 + recomputed.abs());

    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    envelope.push(Assertion::le("energy-recompute-relative-residual", resid, 1e-9));
    let half = (grid.points_per_axis - 1) / 2;
    envelope.details = json!({
        "solver": solver_tag_name(gs.solver),
        "exactness": exactness_name(gs.exactness),
        "energy": gs.energy,
        "grid": {"window": half as f64 * grid.step, "step": grid.step, "points_per_axis": grid.points_per_axis},
        "iterations": gs.iterations,
        "window_saturated": gs.window_saturated,
        "seed": config.seed,
    });

    let wants_files =
        config.out_dir.is_some() || config.out_surface.is_some() || config.out_csv.is_some();
    if wants_files {
        // per-vertex CSV: v coords, r_v, φ components, site energy
        let mut csv = String::new();
        let mut header: Vec<String> = (0..config.d).map(|i| format!("v{i}")).collect();
        header.push("r_v".into());
        for c in 0..config.n {
            header.push(format!("phi{c}"));
        }
        header.push("site_energy".into());
        csv.push_str(&header.join(","));
        csv.push('\n');
        for off in 0..domain.len() {
            let v = domain.vertex_at(off);
            let rv = domain.boundary_distance(&v)?;
            let mut row: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            row.push(rv.to_string());
            for &x in gs.surface.at(off) {
                row.push(format!("{x}"));
            }
            let site = model.disorder.eval(&v, gs.surface.at(off));
            row.push(format!("{}", config.lambda * site));
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        let mut bin = Vec::new();
        surface_io::write_surface(&mut bin, &gs.surface)?;
        let fallback_dir = config.out_dir.clone().unwrap_or_else(|| ".".into());
        let csv_path = config
            .out_csv
            .clone()
            .unwrap_or_else(|| format!("{fallback_dir}/solve.csv"));
        let bin_path = config
            .out_surface
            .clone()
            .unwrap_or_else(|| format!("{fallback_dir}/surface.msre"));
        for (path, bytes) in [(&csv_path, csv.as_bytes()), (&bin_path, bin.as_slice())] {
            if let Some(parent) = Path::new(path).parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(|e| Error::Config(format!("{e}")))?;
                }
            }
            std::fs::write(path, bytes).map_err(|e| Error::Config(format!("{e}")))?;
            envelope.files.push(crate::report::FileEntry {
                path: path.clone(),
                fnv64: format!("{:016x}", crate::report::fnv64(bytes)),
            });
        }
    }
    Ok(envelope)
}

fn greens_cmd(config: &RunConfig) -> Result<ReportEnvelope> {
    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    let g = &config.greens;
    match g.mode.as_str() {
        "exact" => {
            let domain = BoxDomain::cube(config.d, g.l);
            check_budget_simple(config, domain.len() as u64)?;
            let source = g.source.clone().unwrap_or_else(|| vec![0; config.d]);
            let table = green_exact(&domain, &source)?;
            // residual of the Dirichlet system
            let lap = msre_core::lattice::laplacian(&domain, &table.values);
            let mut resid = 0.0f64;
            for off in 0..domain.len() {
                let want = if domain.vertex_at(off) == source { 1.0 } else { 0.0 };
                resid = resid.max((-lap.at(off)[0] - want).abs());
            }
            envelope.push(Assertion::le("dirichlet-system-residual", resid, 1e-10));
            envelope.details = json!({"l": g.l, "source": source, "diagonal": table.value_at(&source)});
            if let Some(dir) = &config.out_dir {
                let mut csv = String::new();
                let header: Vec<String> =
                    (0..config.d).map(|i| format!("x{i}")).chain(["green".into()]).collect();
                csv.push_str(&header.join(","));
                csv.push('\n');
                for off in 0..domain.len() {
                    let x = domain.vertex_at(off);
                    let mut row: Vec<String> = x.iter().map(|c| c.to_string()).collect();
                    row.push(format!("{}", table.values.at(off)[0]));
                    csv.push_str(&row.join(","));
                    csv.push('\n');
                }
                envelope.write_file(Path::new(dir), "greens.csv", &csv)?;
            }
        }
        "mc" => {
            let domain = BoxDomain::cube(config.d, g.l);
            check_budget_simple(config, g.walkers.saturating_mul(domain.len() as u64))?;
            let source = g.source.clone().unwrap_or_else(|| vec![0; config.d]);
            let target = g.target.clone().unwrap_or_else(|| source.clone());
            let (est, se) = green_mc(&domain, &source, &target, g.walkers, config.seed)?;
            let exact = green_exact(&domain, &source)?.value_at(&target);
            envelope.push(Assertion::le(
                "mc-vs-exact-sigmas",
                (est - exact).abs() / se.max(1e-12),
                3.0,
            ));
            envelope.details =
                json!({"estimate": est, "stderr": se, "exact": exact, "walkers": g.walkers});
        }
        "bounds" => {
            let sizes = g.sizes.clone().unwrap_or_else(|| match config.d {
                1 => vec![8, 32, 128],
                2 => vec![8, 16, 32],
                _ => vec![4, 8, 16],
            });
            check_budget_simple(
                config,
                sizes.iter().map(|&l| BoxDomain::cube(config.d, l).len() as u64).sum::<u64>()
                    * g.samples as u64,
            )?;
            let checks = check_green_bounds(config.d, &sizes, g.samples, config.seed)?;
            for b in &checks {
                envelope.push(Assertion::le(
                    &format!("{}-spread", b.name),
                    if b.stable { 1.0 } else { 2.0 },
                    1.5,
                ));
                if b.name == "d1-diagonal-over-rv" {
                    let hi = b.sups.iter().cloned().fold(0.0f64, f64::max);
                    envelope.push(Assertion::le("d1-diagonal-constant", hi, 2.0 + 1e-9));
                }
            }
            let ruin = gambler_ruin_check(5, 5, 100_000, config.seed)?;
            envelope.push(Assertion::le(
                "gambler-ruin-sigmas",
                (ruin.p_hat - ruin.expected).abs() / ruin.stderr.max(1e-12),
                3.0,
            ));
            let tail = exit_time_tail_check(3, &[16, 64, 256, 1024], 20_000, config.seed)?;
            let monotone = tail.ladder.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
            envelope.push(Assertion::ge(
                "exit-time-tail-monotone",
                monotone as u8 as f64,
                1.0,
            ));
            envelope.details = json!({
                "bounds": checks.iter().map(|b| json!({
                    "name": b.name, "sizes": b.sizes, "sups": b.sups, "skipped": b.skipped
                })).collect::<Vec<_>>(),
                "gambler_ruin": {"p_hat": ruin.p_hat, "expected": ruin.expected, "stderr": ruin.stderr},
                "exit_time_tail": {
                    "ladder": tail.ladder,
                    "fitted_constant": tail.fitted_constant,
                },
            });
        }
        other => return Err(Error::Config(format!("unknown greens mode {other:?}"))),
    }
    Ok(envelope)
}

fn fit_json(f: &ExponentFit) -> serde_json::Value {
    json!({
        "slope": f.slope,
        "stderr": f.slope_stderr,
        "intercept": f.intercept,
        "r_squared": f.r_squared,
        "window": [f.window.0, f.window.1],
        "per_size": f.per_size.iter().map(|s| json!({
            "size": s.size, "value": s.value, "stderr": s.stderr, "replicas": s.replicas
        })).collect::<Vec<_>>(),
    })
}

fn write_per_size_csv(
    envelope: &mut ReportEnvelope,
    config: &RunConfig,
    name: &str,
    xi: &ExponentFit,
    chi: &ExponentFit,
) -> Result<()> {
    if let Some(dir) = &config.out_dir {
        let mut csv = String::from("size,mean_height,height_stderr,std_ge,ge_stderr\n");
        for (a, b) in xi.per_size.iter().zip(&chi.per_size) {
            csv.push_str(&format!("{},{},{},{},{}\n", a.size, a.value, a.stderr, b.value, b.stderr));
        }
        envelope.write_file(Path::new(dir), &format!("{name}.csv"), &csv)?;
        let gp = format!(
            "set logscale xy\nset xlabel 'L'\nset key left top\n\
             plot '{name}.csv' using 1:2 skip 1 with linespoints title 'E|phi_0.e|', \\\n     \
             '{name}.csv' using 1:4 skip 1 with linespoints title 'std(GE)'\n"
        );
        envelope.write_file(Path::new(dir), &format!("{name}.gp"), &gp)?;
    }
    Ok(())
}

fn exponents_cmd(config: &RunConfig, with_scaling: bool) -> Result<ReportEnvelope> {
    let mut cfg = config.experiment()?;
    cfg.collect_band_maxima = config.d == 1;
    let results = run_replicas_parallel(&cfg, thread_count(config))?;
    let xi = estimate_transversal(&cfg, &results, config.stats.use_norm)?;
    let chi = estimate_energy_fluct(&cfg, &results)?;
    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    envelope.details = json!({
        "xi": fit_json(&xi),
        "chi": fit_json(&chi),
    });
    if with_scaling {
        let rel = check_scaling_relation(&xi, &chi, config.d)?;
        envelope.push(Assertion::le(
            "scaling-gap",
            rel.gap.abs(),
            (0.1f64).max(3.0 * rel.combined_stderr),
        ));
        envelope.details["scaling"] = json!({
            "gap": rel.gap,
            "combined_stderr": rel.combined_stderr,
        });
    }
    if config.d == 1 && cfg.collect_band_maxima {
        let sw = check_d1_sandwich(&cfg, &results)?;
        envelope.push(Assertion::le("sandwich-a-spread", sw.a_spread, 2.0));
        envelope.push(Assertion::le("sandwich-b-spread", sw.b_spread, 2.0));
        envelope.details["sandwich"] = json!(sw.per_size.iter().map(|s| json!({
            "size": s.size, "std_ge": s.std_ge,
            "lower_proxy": s.lower_proxy, "upper_proxy": s.upper_proxy,
            "a": s.a, "b": s.b,
        })).collect::<Vec<_>>());
    }
    write_per_size_csv(&mut envelope, config, &config.kind, &xi, &chi)?;
    Ok(envelope)
}

fn limit_shape_cmd(config: &RunConfig) -> Result<ReportEnvelope> {
    let cfg = config.experiment()?;
    let rep = check_limit_shape_d1(&cfg, &config.stats.x_ladder)?;
    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    envelope.push(Assertion::le(
        "per-replica-identity-relative-residual",
        rep.max_identity_residual / rep.identity_scale,
        1e-9,
    ));
    for p in &rep.points {
        if p.x != 0.0 {
            envelope.push(Assertion::le(
                &format!("limit-shape-gap-x-{}", p.x),
                p.gap.abs(),
                p.tolerance,
            ));
        }
    }
    envelope.details = json!({
        "sizes": rep.sizes,
        "points": rep.points.iter().map(|p| json!({
            "x": p.x, "mu_hat": p.mu_hat, "stderr": p.mu_stderr,
            "gap": p.gap, "tolerance": p.tolerance,
        })).collect::<Vec<_>>(),
    });
    if let Some(dir) = &config.out_dir {
        let mut csv = String::from("x,mu_hat,stderr,gap,tolerance\n");
        for p in &rep.points {
            csv.push_str(&format!("{},{},{},{},{}\n", p.x, p.mu_hat, p.mu_stderr, p.gap, p.tolerance));
        }
        envelope.write_file(Path::new(dir), "limit_shape.csv", &csv)?;
    }
    Ok(envelope)
}

fn profile_cmd(config: &RunConfig) -> Result<ReportEnvelope> {
    let mut cfg = config.experiment()?;
    cfg.collect_norms = true;
    let results = run_replicas_parallel(&cfg, thread_count(config))?;
    let prof = localization_profile(&cfg, &results)?;
    let frac = delocalization_fraction(&cfg, &results, &config.stats.h_ladder)?;
    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    envelope.push(Assertion::le("profile-envelope-sup-spread", prof.sup_spread, 1.5));
    if config.d <= 3 {
        envelope.push(Assertion::ge("delocalized-fraction-at-half-median", frac.floor_fraction, 0.05));
    }
    envelope.details = json!({
        "per_size_sup": prof.per_size_sup,
        "empty_bins": prof.empty_bins,
        "floor_h": frac.floor_h,
        "floor_fraction": frac.floor_fraction,
        "fractions": frac.per_h,
    });
    if let Some(dir) = &config.out_dir {
        let mut csv = String::from("size,r,mean_norm,ratio\n");
        for (l, bins) in &prof.per_size {
            for b in bins {
                csv.push_str(&format!("{l},{},{},{}\n", b.r, b.mean_norm, b.ratio));
            }
        }
        envelope.write_file(Path::new(dir), "profile.csv", &csv)?;
        let gp = "set logscale xy\nset xlabel 'r_v'\nplot 'profile.csv' using 2:3 skip 1 with points title 'E|phi_v|'\n";
        envelope.write_file(Path::new(dir), "profile.gp", gp)?;
    }
    Ok(envelope)
}

fn concentration_cmd(config: &RunConfig) -> Result<ReportEnvelope> {
    let cfg = config.experiment()?;
    let results = run_replicas_parallel(&cfg, thread_count(config))?;
    let rep = check_concentration(&cfg, &results)?;
    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    envelope.push(Assertion::le("var-ge-slope-vs-volume", rep.var_slope, 1.1));
    envelope.push(Assertion::le("exceed-2sigma-frequency", rep.exceed_2sigma, 0.10));
    envelope.push(Assertion::le("exceed-3sigma-frequency", rep.exceed_3sigma, 0.02));
    envelope.push(Assertion::le("gradient-density-slope", rep.grad_slope, 0.1));
    envelope.details = json!({
        "var_slope": rep.var_slope,
        "var_slope_stderr": rep.var_slope_stderr,
        "exceed_2sigma": rep.exceed_2sigma,
        "exceed_3sigma": rep.exceed_3sigma,
        "grad_slope": rep.grad_slope,
    });
    if let Some(dir) = &config.out_dir {
        let mut csv = String::from("size,std_ge,mean_grad_density\n");
        for &l in &cfg.sizes {
            let group: Vec<&ReplicaResult> = results.iter().filter(|r| r.size == l).collect();
            let ge: Vec<f64> = group.iter().map(|r| r.ge).collect();
            let vol = ((2 * l + 1) as f64).powi(config.d as i32);
            let grad: Vec<f64> = group.iter().map(|r| r.grad_norm2 / vol).collect();
            csv.push_str(&format!(
                "{l},{},{}\n",
                msre_core::stats::sample_std(&ge),
                msre_core::stats::mean(&grad)
            ));
        }
        envelope.write_file(Path::new(dir), "concentration.csv", &csv)?;
    }
    Ok(envelope)
}

fn shiftpi_cmd(config: &RunConfig) -> Result<ReportEnvelope> {
    let sizes = if config.stats.sizes == vec![8, 16, 32, 64] {
        vec![16, 32, 64]
    } else {
        config.stats.sizes.clone()
    };
    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    let mut laps = Vec::new();
    let mut energies = Vec::new();
    let mut rows = Vec::new();
    for &l in &sizes {
        let (_, rep) = build_shift_pi(l, config.stats.epsilon, config.d)?;
        envelope.push(Assertion::ge(&format!("support-ok-L{l}"), rep.support_ok as u8 as f64, 1.0));
        envelope.push(Assertion::ge(&format!("min-on-inner-L{l}"), rep.min_on_inner, 1.0));
        laps.push(rep.max_laplacian_scaled);
        energies.push(rep.energy_scaled);
        rows.push(json!({
            "l": l, "band_steps": rep.band_steps,
            "max_laplacian_scaled": rep.max_laplacian_scaled,
            "energy_scaled": rep.energy_scaled,
        }));
    }
    let spread = |v: &[f64]| {
        let hi = v.iter().cloned().fold(0.0f64, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        if lo > 0.0 {
            hi / lo
        } else {
            f64::INFINITY
        }
    };
    envelope.push(Assertion::le("laplacian-constant-spread", spread(&laps), 1.5));
    envelope.push(Assertion::le("energy-constant-spread", spread(&energies), 1.5));
    envelope.details = json!({"sizes": sizes, "rows": rows});
    if let Some(dir) = &config.out_dir {
        let mut csv = String::from("l,band_steps,max_laplacian_scaled,energy_scaled\n");
        for r in rows.iter() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                r["l"], r["band_steps"], r["max_laplacian_scaled"], r["energy_scaled"]
            ));
        }
        envelope.write_file(Path::new(dir), "shiftpi.csv", &csv)?;
    }
    Ok(envelope)
}

fn disorder_dump_cmd(config: &RunConfig) -> Result<ReportEnvelope> {
    let field = DisorderField::new(config.disorder_params(config.seed)?)?;
    let span = config.dump.vertex_span;
    let domain = BoxDomain::cube(config.d, span);
    if domain.len() > 100_000 {
        return Err(Error::Resource("dump span too large".into()));
    }
    check_budget_simple(config, (domain.len() * config.dump.t_points) as u64)?;
    let mut csv = String::new();
    let mut header: Vec<String> = (0..config.d).map(|i| format!("v{i}")).collect();
    for c in 0..config.n {
        header.push(format!("t{c}"));
    }
    header.push("value".into());
    csv.push_str(&header.join(","));
    csv.push('\n');
    let m = config.dump.t_points.max(2);
    for off in 0..domain.len() {
        let v = domain.vertex_at(off);
        for i in 0..m {
            let t0 = config.dump.t_lo
                + (config.dump.t_hi - config.dump.t_lo) * i as f64 / (m - 1) as f64;
            let mut t = vec![0.0; config.n];
            t[0] = t0;
            let val = field.eval(&v, &t);
            let mut row: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            for &tc in &t {
                row.push(format!("{tc}"));
            }
            row.push(format!("{val}"));
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
    }
    let mut envelope = ReportEnvelope::new(&config.kind, &config.normalized_json());
    envelope.details = json!({"rows": domain.len() * m});
    if let Some(dir) = &config.out_dir {
        envelope.write_file(Path::new(dir), "disorder.csv", &csv)?;
    } else {
        print!("{csv}");
    }
    Ok(envelope)
}
