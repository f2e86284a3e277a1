//! Qualitative localization checks that cross the solver and experiment
//! layers: heights stay bounded in high dimension, grow in low dimension.

use msre_core::disorder::{DisorderParams, GeneratorKind};
use msre_core::experiments::{run_replicas, ExperimentConfig, GridPolicy, SolverChoice};
use msre_core::stats::{mean, ols_line};

/// d = 5 is in the localized phase: the center height shows no growth
/// across sizes (log–log slope ≤ 0.1). Exact min-cut at smoke scale.
#[test]
fn d5_center_height_does_not_grow() {
    let mut cfg = ExperimentConfig::new(5, 1, DisorderParams::new(GeneratorKind::White, 0, 1));
    cfg.sizes = vec![2, 3];
    cfg.replicas = 4;
    cfg.solver = SolverChoice::MinCut;
    // heights are O(1) here; a coarse 7-point window keeps the min-cut
    // graphs inside smoke-test budgets
    cfg.grid = GridPolicy { window: Some(4.0), step: Some(4.0 / 3.0) };
    let results = run_replicas(&cfg).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &l in &cfg.sizes {
        let vals: Vec<f64> = results
            .iter()
            .filter(|r| r.size == l)
            .map(|r| r.center_norm.max(1e-6))
            .collect();
        xs.push((l as f64).ln());
        ys.push(mean(&vals).max(1e-6).ln());
    }
    let fit = ols_line(&xs, &ys, &vec![0.0; xs.len()]).unwrap();
    assert!(fit.slope <= 0.1, "d=5 center height grows: slope {}", fit.slope);
}

/// d = 1 by contrast delocalizes visibly over one doubling.
#[test]
fn d1_center_height_grows() {
    let mut cfg = ExperimentConfig::new(1, 1, DisorderParams::new(GeneratorKind::White, 3, 1));
    cfg.sizes = vec![16, 64];
    cfg.replicas = 40;
    let results = run_replicas(&cfg).unwrap();
    let small: Vec<f64> =
        results.iter().filter(|r| r.size == 16).map(|r| r.center_norm).collect();
    let large: Vec<f64> =
        results.iter().filter(|r| r.size == 64).map(|r| r.center_norm).collect();
    assert!(
        mean(&large) > 1.3 * mean(&small),
        "expected growth: {} vs {}",
        mean(&large),
        mean(&small)
    );
}
