//! Channel files and list-valued flags.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use ofdma_maxmin::{compute_rate_matrix, ChannelRealizationF64, RateMatrixF64};
use serde::Deserialize;

/// A matrix field of the JSON channel triple: one value for every entry, one
/// row shared by every user, or a full `N x K` matrix.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Field {
    Scalar(f64),
    Row(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl Field {
    fn expand(self, n_users: usize, n_bins: usize) -> Vec<Vec<f64>> {
        match self {
            Field::Scalar(x) => vec![vec![x; n_bins]; n_users],
            Field::Row(row) => vec![row; n_users],
            Field::Matrix(m) => m,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    gains: Vec<Vec<f64>>,
    mask: Field,
    noise: Field,
}

/// Reads a rate matrix from either a `# rates N K` CSV file or a JSON
/// channel triple (`gains`, `mask`, `noise`).
pub fn read_channel(path: &Path) -> Result<(RateMatrixF64, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let rates = if text.trim_start().starts_with('{') {
        parse_channel_json(text)
    } else {
        parse_rates_csv(text)
    }
    .with_context(|| format!("invalid channel file {}", path.display()))?;
    Ok((rates, bytes))
}

pub fn parse_channel_json(text: &str) -> Result<RateMatrixF64> {
    let ch: ChannelJson = serde_json::from_str(text)?;
    let n_users = ch.gains.len();
    let n_bins = ch.gains.first().map_or(0, Vec::len);
    let real = ChannelRealizationF64::new(
        ch.gains,
        ch.mask.expand(n_users, n_bins),
        ch.noise.expand(n_users, n_bins),
    )?;
    Ok(compute_rate_matrix(&real))
}

pub fn parse_rates_csv(text: &str) -> Result<RateMatrixF64> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().context("empty file")?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let (n_users, n_bins) = match dims.as_slice() {
        ["#", "rates", n, k] => (
            n.parse::<usize>().context("bad user count in header")?,
            k.parse::<usize>().context("bad bin count in header")?,
        ),
        _ => bail!("first line must be `# rates N K`, found `{header}`"),
    };
    let mut rows = Vec::with_capacity(n_users);
    for (i, line) in lines.filter(|l| !l.starts_with('#')).enumerate() {
        let row = parse_list(line).with_context(|| format!("row {}", i + 1))?;
        ensure!(row.len() == n_bins, "row {} has {} values, expected {n_bins}", i + 1, row.len());
        rows.push(row);
    }
    ensure!(rows.len() == n_users, "found {} rows, header says {n_users}", rows.len());
    Ok(RateMatrixF64::from_rows(rows)?)
}

/// Parses `1,1.25,...`.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>().with_context(|| format!("`{v}` is not a number"))
        })
        .collect()
}

/// Parses voice floors given as `user=rate` pairs with 1-based users,
/// e.g. `2=36` or `1=10,3=5`.
pub fn parse_floors(specs: &[String], n_users: usize) -> Result<Vec<Option<f64>>> {
    let mut floors = vec![None; n_users];
    for spec in specs.iter().flat_map(|s| s.split(',')) {
        let (user, rate) = spec
            .split_once('=')
            .with_context(|| format!("`{spec}` is not of the form user=rate"))?;
        let user: usize = user.trim().parse().with_context(|| format!("bad user in `{spec}`"))?;
        let rate: f64 = rate.trim().parse().with_context(|| format!("bad rate in `{spec}`"))?;
        ensure!((1..=n_users).contains(&user), "user {user} is outside 1..={n_users}");
        ensure!(floors[user - 1].is_none(), "user {user} has two floors");
        floors[user - 1] = Some(rate);
    }
    Ok(floors)
}
