//! Report envelopes: the one JSON document every subcommand emits.
//!
//! Reports are pure functions of (config, computed values): field order is
//! fixed by the struct, floats print in shortest round-trip form, and
//! wall-clock time goes to the log rather than the report, so re-running
//! with the same config and seed reproduces the bytes exactly. Every file
//! a run writes is listed in the manifest with a content hash.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use msre_core::{Error, Result};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// "<=" when value must stay below threshold, ">=" above
    pub direction: String,
    pub pass: bool,
}

impl Assertion {
    pub fn le(name: &str, value: f64, threshold: f64) -> Assertion {
        Assertion {
            name: name.into(),
            value,
            threshold,
            direction: "<=".into(),
            pass: value <= threshold,
        }
    }

    pub fn ge(name: &str, value: f64, threshold: f64) -> Assertion {
        Assertion {
            name: name.into(),
            value,
            threshold,
            direction: ">=".into(),
            pass: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub fnv64: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub artifact_version: String,
    pub kind: String,
    /// normalized config echo: re-running it reproduces the assertions
    pub config: serde_json::Value,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
    /// free-form numeric details (per-size tables etc.)
    pub details: serde_json::Value,
    pub files: Vec<FileEntry>,
}

impl ReportEnvelope {
    pub fn new(kind: &str, config_json: &str) -> ReportEnvelope {
        ReportEnvelope {
            artifact_version: ARTIFACT_VERSION.into(),
            kind: kind.into(),
            config: serde_json::from_str(config_json).expect("normalized config is valid JSON"),
            assertions: Vec::new(),
            pass: true,
            details: serde_json::Value::Null,
            files: Vec::new(),
        }
    }

    pub fn push(&mut self, a: Assertion) {
        self.pass &= a.pass;
        self.assertions.push(a);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Register and write one output file under `out_dir`.
    pub fn write_file(&mut self, out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
        fs::create_dir_all(out_dir)
            .map_err(|e| Error::Config(format!("cannot create output directory: {e}")))?;
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::Config(format!("cannot write {name}: {e}")))?;
        self.files.push(FileEntry { path: name.into(), fnv64: format!("{:016x}", fnv64(contents.as_bytes())) });
        Ok(path)
    }
}

/// FNV-1a, 64-bit: stable content fingerprints for the file manifest.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
