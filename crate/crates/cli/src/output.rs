//! Summaries, CSV files and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use ofdma_maxmin::AllocationMatrixF64;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// `x` with `digits` significant digits, keeping trailing zeros.
pub fn sig(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_infinite() && x > 0.0 { "∞".into() } else { format!("{x}") };
    }
    let decimals = (digits - 1 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Summary number: four significant digits, trailing zeros dropped.
pub fn short(x: f64) -> String {
    let s = sig(x, 4);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn join_short(xs: &[f64]) -> String {
    xs.iter().map(|x| short(*x)).collect::<Vec<_>>().join(",")
}

pub fn allocation_csv(a: &AllocationMatrixF64) -> String {
    let mut out = format!("# allocation {} {}\n", a.n_users(), a.n_bins());
    for row in a.rows() {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn user_rates_csv(rates: &[f64], weights: Option<&[f64]>) -> String {
    let mut out = String::from("# user (1-based); achieved rate in bit/s/Hz; weighted rate (empty if unweighted)\nuser,rate,weighted_rate\n");
    for (n, r) in rates.iter().enumerate() {
        let weighted = weights.map(|w| (w[n] * r).to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{r},{weighted}", n + 1);
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    /// SHA-256 of the input file followed by the effective options.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub timestamp: String,
    /// SHA-256 of every other file in the bundle.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, input: &[u8], options: &str, seed: Option<u64>) -> Self {
        let mut hashed = input.to_vec();
        hashed.extend_from_slice(options.as_bytes());
        Self {
            command: command.to_string(),
            config_hash: sha256_hex(&hashed),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs: BTreeMap::new(),
        }
    }
}

/// Writes every file of an output set, plus `manifest.json`. Each file goes
/// to a temporary path in `dir` first and is renamed into place, so an
/// interrupted run never leaves a half-written file.
pub fn write_bundle(dir: &Path, files: &[(&str, String)], mut manifest: Manifest) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    manifest.outputs = files
        .iter()
        .map(|(name, body)| (name.to_string(), sha256_hex(body.as_bytes())))
        .collect();
    let manifest = serde_json::to_string_pretty(&manifest)? + "\n";
    let mut staged = Vec::new();
    for (name, body) in files.iter().map(|(n, b)| (*n, b.as_str())).chain([("manifest.json", manifest.as_str())]) {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(body.as_bytes())?;
        tmp.as_file().sync_all()?;
        staged.push((name, tmp));
    }
    for (name, tmp) in staged {
        let target = dir.join(name);
        tmp.persist(&target).with_context(|| format!("cannot write {}", target.display()))?;
    }
    Ok(())
}
