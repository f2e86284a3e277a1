//! End-to-end CLI behavior: exit codes, report determinism, file
//! manifests, config fuzz.

use std::path::PathBuf;
use std::process::Command;

use msre_lab::config::RunConfig;

fn msre() -> Command {
    Command::new(env!("CARGO_BIN_EXE_msre"))
}

fn write_config(dir: &std::path::Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

fn tmpdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("msre-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn identity_check_defaults_pass_with_exit_zero() {
    let out = msre().args(["identity-check", "--d", "1", "--n", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["kind"], "identity-check");
    assert_eq!(report["pass"], true);
    let name = report["assertions"][0]["name"].as_str().unwrap();
    assert!(name.contains("residual"));
}

#[test]
fn zero_budget_refuses_with_exit_four() {
    let dir = tmpdir("budget");
    let cfg = write_config(
        &dir,
        r#"{"kind": "exponents", "d": 1, "n": 1, "budget_node_seconds": 0.0}"#,
    );
    let out = msre().args(["exponents", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn single_size_scaling_run_exits_three() {
    let dir = tmpdir("singlesize");
    let cfg = write_config(
        &dir,
        r#"{"kind": "scaling", "d": 1, "n": 1, "stats": {"sizes": [16], "replicas": 30}}"#,
    );
    let out = msre().args(["scaling", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("two sizes"), "{err}");
}

#[test]
fn invalid_config_key_exits_three_naming_the_key() {
    let dir = tmpdir("badkey");
    let cfg = write_config(&dir, r#"{"kind": "solve", "d": 1, "n": 1, "wrongkey": true}"#);
    let out = msre().args(["solve", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wrongkey"));
}

#[test]
fn reports_are_byte_identical_across_reruns() {
    let dir = tmpdir("determinism");
    let cfg = write_config(
        &dir,
        r#"{"kind": "exponents", "d": 1, "n": 1,
            "stats": {"sizes": [8, 16], "replicas": 30}, "seed": 42}"#,
    );
    let run = || {
        let out = msre().args(["exponents", "--config", cfg.to_str().unwrap()]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn solve_writes_manifested_files() {
    let dir = tmpdir("solve");
    let outdir = dir.join("out");
    let cfg = write_config(
        &dir,
        r#"{"kind": "solve", "d": 1, "n": 1, "domain_l": 6, "seed": 5}"#,
    );
    let out = msre()
        .args([
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            outdir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(outdir.join("report.json")).unwrap())
            .unwrap();
    let files = report["files"].as_array().unwrap();
    assert!(files.iter().any(|f| f["path"].as_str().unwrap().ends_with("solve.csv")));
    assert!(files.iter().any(|f| f["path"].as_str().unwrap().ends_with("surface.msre")));
    // manifest hashes match the bytes on disk
    for f in files {
        let path = outdir.join(f["path"].as_str().unwrap());
        let bytes = std::fs::read(&path).unwrap();
        let hash = format!("{:016x}", msre_lab::report::fnv64(&bytes));
        assert_eq!(hash, f["fnv64"].as_str().unwrap(), "hash mismatch for {path:?}");
    }
    // the binary surface parses back
    let bin = std::fs::read(outdir.join("surface.msre")).unwrap();
    let surf = msre_lab::surface_io::read_surface(&mut bin.as_slice()).unwrap();
    assert_eq!(surf.domain().dim(), 1);
}

#[test]
fn solve_honors_explicit_out_and_csv_flags() {
    let dir = tmpdir("solveflags");
    let cfg = write_config(&dir, r#"{"kind": "solve", "d": 1, "n": 1, "domain_l": 4}"#);
    let bin_path = dir.join("phi.msre");
    let csv_path = dir.join("phi.csv");
    let out = msre()
        .args([
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            bin_path.to_str().unwrap(),
            "--csv",
            csv_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(bin_path.exists());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("v0,r_v,phi0,site_energy"));
    assert_eq!(csv.lines().count(), 1 + 9);
}

#[test]
fn disorder_dump_emits_csv_rows() {
    let dir = tmpdir("dump");
    let outdir = dir.join("out");
    let cfg = write_config(
        &dir,
        r#"{"kind": "disorder-dump", "d": 1, "n": 1,
            "dump": {"vertex_span": 2, "t_lo": -1.0, "t_hi": 1.0, "t_points": 9}}"#,
    );
    let out = msre()
        .args([
            "disorder-dump",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            outdir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(outdir.join("disorder.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "v0,t0,value");
    assert_eq!(csv.lines().count(), 1 + 5 * 9);
}

#[test]
fn greens_flags_override_config() {
    let out = msre()
        .args(["greens", "--d", "1", "--L", "3", "--mode", "exact", "--source", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["details"]["l"], 3);
}

#[test]
fn fuzzed_configs_normalize_idempotently() {
    // 50 fuzzed configs assembled from optional fragments
    let kinds = ["identity-check", "solve", "exponents", "scaling", "shiftpi"];
    let fragments = [
        r#""lambda": 2.5"#,
        r#""seed": 99"#,
        r#""disorder": {"kind": "linear"}"#,
        r#""disorder": {"kind": "poisson", "intensity": 2.0}"#,
        r#""solver": {"name": "dp"}"#,
        r#""solver": {"sweeps": 17}"#,
        r#""stats": {"sizes": [4, 9, 11]}"#,
        r#""stats": {"replicas": 31, "use_norm": true}"#,
        r#""domain_l": 5"#,
        r#""threads": 2"#,
    ];
    for i in 0..50usize {
        let kind = kinds[i % kinds.len()];
        let mut parts = vec![
            format!(r#""kind": "{kind}""#),
            format!(r#""d": {}"#, 1 + i % 3),
            format!(r#""n": {}"#, 1 + (i / 3) % 2),
        ];
        for (j, frag) in fragments.iter().enumerate() {
            if (i >> j) & 1 == 1 {
                parts.push((*frag).into());
            }
        }
        let text = format!("{{{}}}", parts.join(", "));
        let once = match RunConfig::from_json(&text) {
            Ok(c) => c,
            Err(_) => continue, // some combinations are legitimately invalid
        };
        let twice = RunConfig::from_json(&once.normalized_json()).unwrap();
        assert_eq!(once, twice, "normalization not idempotent for {text}");
        assert_eq!(once.normalized_json(), twice.normalized_json());
    }
}

#[test]
fn parallel_replica_map_matches_sequential_fold() {
    use msre_core::disorder::{DisorderParams, GeneratorKind};
    use msre_core::experiments::{run_replicas, ExperimentConfig};
    let mut cfg = ExperimentConfig::new(1, 1, DisorderParams::new(GeneratorKind::White, 0, 1));
    cfg.sizes = vec![6, 10];
    cfg.replicas = 8;
    cfg.collect_band_maxima = true;
    let seq = run_replicas(&cfg).unwrap();
    let par = msre_lab::runner::run_replicas_parallel(&cfg, 3).unwrap();
    assert_eq!(seq.len(), par.len());
    for (a, b) in seq.iter().zip(&par) {
        assert_eq!((a.size, a.replica), (b.size, b.replica));
        assert_eq!(a.ge.to_bits(), b.ge.to_bits());
        assert_eq!(a.center_abs_e.to_bits(), b.center_abs_e.to_bits());
        assert_eq!(a.grad_norm2.to_bits(), b.grad_norm2.to_bits());
        assert_eq!(a.band_maxima.len(), b.band_maxima.len());
        for (x, y) in a.band_maxima.iter().zip(&b.band_maxima) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
