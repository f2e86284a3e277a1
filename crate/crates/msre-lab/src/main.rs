//! msre — harmonic minimal surfaces in random environments, at the desk.
//!
//! ```text
//! msre <subcommand> [--config FILE] [flags]
//!
//! subcommands:
//!   identity-check   deterministic main-identity residuals
//!   solve            one ground-state solve (surface binary + CSV)
//!   greens           Green's functions: --mode exact|mc|bounds
//!   exponents        ξ̂ and χ̂ fits over a size ladder
//!   scaling          exponents plus the χ = 2ξ + d − 2 gap check
//!   limit-shape      d = 1 tilted-boundary limit shape
//!   profile          localization profile and delocalization fractions
//!   concentration    ground-energy concentration checks
//!   shiftpi          the smooth shift function π and its constants
//!   disorder-dump    CSV dump of one disorder field
//!
//! global flags:
//!   --config FILE    JSON run config (defaults filled; d, n, kind required)
//!   --out-dir DIR    write report.json, CSVs and plot scripts here
//!   --seed N         override the config seed
//!   --threads N      worker threads for replica maps
//!   --budget-node-seconds X   refuse runs estimated beyond the budget
//!   --d N --n N      dimensions when no config file is given
//!   --L N            box/domain size for greens and solve
//!   --source a,b,…   greens source vertex
//!   --mode M         greens mode: exact | mc | bounds
//!   --out FILE       solve: surface binary path
//!   --csv FILE       solve: per-vertex CSV path
//!
//! exit codes: 0 pass, 2 assertion failure, 3 infeasible/precondition,
//! 4 budget refusal. MSRE_LOG ∈ {error, info, debug} gates stderr logging.
//! ```

use std::path::Path;
use std::process::ExitCode;

use msre_lab::config::RunConfig;
use msre_lab::runner;

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(3)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        eprintln!("usage: msre <subcommand> [--config FILE] [flags]; see README");
        return ExitCode::from(if args.is_empty() { 3 } else { 0 });
    }
    let kind = args[0].clone();
    let mut config_path: Option<String> = None;
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut i = 1;
    while i < args.len() {
        let flag = args[i].clone();
        let want_value = |f: &str| {
            matches!(
                f,
                "--config"
                    | "--out-dir"
                    | "--seed"
                    | "--threads"
                    | "--budget-node-seconds"
                    | "--d"
                    | "--n"
                    | "--L"
                    | "--source"
                    | "--mode"
                    | "--lambda"
                    | "--out"
                    | "--csv"
            )
        };
        if !want_value(&flag) {
            return fail(&format!("unknown flag {flag}"));
        }
        if i + 1 >= args.len() {
            return fail(&format!("flag {flag} needs a value"));
        }
        let value = args[i + 1].clone();
        i += 2;
        if flag == "--config" {
            config_path = Some(value);
        } else {
            overrides.push((flag, value));
        }
    }

    let mut json = match &config_path {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => return fail(&format!("cannot read config {p}: {e}")),
        },
        None => format!("{{\"kind\": \"{kind}\", \"d\": 1, \"n\": 1}}"),
    };

    // apply flag overrides on top of the parsed document
    let mut parsed: serde_json::Value = match serde_json::from_str(&json) {
        Ok(v) => v,
        Err(e) => return fail(&format!("parse error at line {}, column {}: {e}", e.line(), e.column())),
    };
    parsed["kind"] = serde_json::Value::String(kind.clone());
    for (flag, value) in &overrides {
        match flag.as_str() {
            "--out-dir" => parsed["out_dir"] = serde_json::Value::String(value.clone()),
            "--seed" => match value.parse::<u64>() {
                Ok(v) => parsed["seed"] = serde_json::json!(v),
                Err(_) => return fail("--seed expects an unsigned integer"),
            },
            "--threads" => match value.parse::<usize>() {
                Ok(v) => parsed["threads"] = serde_json::json!(v),
                Err(_) => return fail("--threads expects an integer"),
            },
            "--budget-node-seconds" => match value.parse::<f64>() {
                Ok(v) => parsed["budget_node_seconds"] = serde_json::json!(v),
                Err(_) => return fail("--budget-node-seconds expects a number"),
            },
            "--d" => match value.parse::<usize>() {
                Ok(v) => parsed["d"] = serde_json::json!(v),
                Err(_) => return fail("--d expects an integer"),
            },
            "--n" => match value.parse::<usize>() {
                Ok(v) => parsed["n"] = serde_json::json!(v),
                Err(_) => return fail("--n expects an integer"),
            },
            "--lambda" => match value.parse::<f64>() {
                Ok(v) => parsed["lambda"] = serde_json::json!(v),
                Err(_) => return fail("--lambda expects a number"),
            },
            "--L" => match value.parse::<i64>() {
                Ok(v) => {
                    parsed["domain_l"] = serde_json::json!(v);
                    parsed["greens"]["l"] = serde_json::json!(v);
                }
                Err(_) => return fail("--L expects an integer"),
            },
            "--source" => {
                let coords: std::result::Result<Vec<i64>, _> =
                    value.split(',').map(|c| c.trim().parse::<i64>()).collect();
                match coords {
                    Ok(v) => parsed["greens"]["source"] = serde_json::json!(v),
                    Err(_) => return fail("--source expects comma-separated integers"),
                }
            }
            "--mode" => parsed["greens"]["mode"] = serde_json::Value::String(value.clone()),
            "--out" => parsed["out_surface"] = serde_json::Value::String(value.clone()),
            "--csv" => parsed["out_csv"] = serde_json::Value::String(value.clone()),
            _ => unreachable!(),
        }
    }
    json = parsed.to_string();

    let config = match RunConfig::from_json(&json) {
        Ok(c) => c,
        Err(e) => return fail(&format!("{e}")),
    };

    let outcome = runner::dispatch(&config);
    let code = runner::exit_code(&outcome);
    match outcome {
        Ok(envelope) => {
            let text = envelope.to_json();
            if let Some(dir) = &config.out_dir {
                if let Err(e) = std::fs::create_dir_all(dir)
                    .map_err(|e| e.to_string())
                    .and_then(|_| {
                        std::fs::write(Path::new(dir).join("report.json"), &text)
                            .map_err(|e| e.to_string())
                    })
                {
                    return fail(&format!("cannot write report: {e}"));
                }
            }
            println!("{text}");
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
