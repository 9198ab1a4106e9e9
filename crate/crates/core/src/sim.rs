//! Monte Carlo harness over i.i.d. Rayleigh-fading channels.
//!
//! Users are organized in groups that share an SNR and a service class. For
//! each sweep point (a value of `gamma` when there are two data groups) the
//! harness draws `n_trials` channel realizations, solves the allocation, and
//! records group rate totals. From those it derives per-point averages,
//! histograms and outage quantiles.
//!
//! Random numbers come from ChaCha8 with one stream per
//! `(sweep point, trial, service class, group ordinal within the class)`, so
//! adding or removing voice groups leaves the data-group draws unchanged and
//! trials can run in any order.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxmin::{solve_maxmin, WeightVector};
use crate::rates::{compute_rate_matrix, snr_db_to_linear, ChannelRealization, RateMatrix};
use crate::services::{solve_mixed, MixedStatus, ServiceClass, ServiceProfile};

pub const SCHEMA_VERSION: u32 = 1;
pub const RNG_NAME: &str = "ChaCha8Rng";

fn default_bins() -> usize {
    64
}

fn default_trials() -> usize {
    10_000
}

fn default_hist_bins() -> usize {
    40
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupKind {
    /// Fixed-rate group; every member needs at least `r_min`.
    Voice { r_min: f64 },
    /// Flexible-rate group. The weight is only read when the sweep does not
    /// assign `(gamma, 1 - gamma)` to exactly two data groups.
    Data {
        #[serde(default)]
        weight: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub size: usize,
    pub snr_db: f64,
    #[serde(flatten)]
    pub kind: GroupKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub schema_version: u32,
    #[serde(default = "default_bins")]
    pub n_bins: usize,
    pub groups: Vec<GroupSpec>,
    #[serde(default)]
    pub gamma_grid: Vec<f64>,
    #[serde(default = "default_trials")]
    pub n_trials: usize,
    #[serde(default)]
    pub outage_probs: Vec<f64>,
    pub rng_seed: u64,
    #[serde(default = "default_hist_bins")]
    pub hist_bins: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.n_bins == 0 || self.n_trials == 0 || self.hist_bins == 0 {
            return fail("n_bins, n_trials and hist_bins must be positive".into());
        }
        if self.n_trials > u32::MAX as usize || self.gamma_grid.len() > u16::MAX as usize {
            return fail("too many trials or sweep points for the stream layout".into());
        }
        if self.groups.is_empty() {
            return fail("at least one group is required".into());
        }
        for (i, g) in self.groups.iter().enumerate() {
            if g.size == 0 {
                return fail(format!("group {i} is empty"));
            }
            if !g.snr_db.is_finite() {
                return fail(format!("group {i} has a non-finite SNR"));
            }
            match g.kind {
                GroupKind::Voice { r_min } if !(r_min.is_finite() && r_min >= 0.0) => {
                    return fail(format!("group {i} needs a finite r_min >= 0"));
                }
                GroupKind::Data { weight: Some(w) } if !(w.is_finite() && w > 0.0) => {
                    return fail(format!("group {i} needs a positive weight"));
                }
                _ => {}
            }
        }
        if self.data_groups().is_empty() {
            return fail("at least one data group is required".into());
        }
        if let Some(g) = self.gamma_grid.iter().find(|g| !(**g > 0.0 && **g < 1.0)) {
            return fail(format!("gamma {g} is not strictly inside (0, 1)"));
        }
        if let Some(p) = self.outage_probs.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return fail(format!("outage probability {p} is not strictly inside (0, 1)"));
        }
        if !self.sweeps_gamma() {
            for &g in &self.data_groups() {
                if !matches!(self.groups[g].kind, GroupKind::Data { weight: Some(_) }) {
                    return fail(format!(
                        "data group {g} needs a weight unless two data groups sweep gamma"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn n_users(&self) -> usize {
        self.groups.iter().map(|g| g.size).sum()
    }

    pub fn data_groups(&self) -> Vec<usize> {
        self.group_indices(|k| matches!(k, GroupKind::Data { .. }))
    }

    pub fn voice_groups(&self) -> Vec<usize> {
        self.group_indices(|k| matches!(k, GroupKind::Voice { .. }))
    }

    fn group_indices(&self, pred: impl Fn(&GroupKind) -> bool) -> Vec<usize> {
        (0..self.groups.len()).filter(|&i| pred(&self.groups[i].kind)).collect()
    }

    /// True when exactly two data groups get weights `(gamma, 1 - gamma)` from the grid.
    pub fn sweeps_gamma(&self) -> bool {
        self.data_groups().len() == 2 && !self.gamma_grid.is_empty()
    }

    /// Sweep points: the gamma grid, or a single point with configured weights.
    pub fn sweep_points(&self) -> Vec<Option<f64>> {
        if self.sweeps_gamma() {
            self.gamma_grid.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }

    /// Weight of every group at a sweep point (voice groups get `None`).
    pub fn group_weights(&self, gamma: Option<f64>) -> Vec<Option<f64>> {
        let data = self.data_groups();
        self.groups
            .iter()
            .enumerate()
            .map(|(i, g)| match (g.kind, gamma) {
                (GroupKind::Voice { .. }, _) => None,
                (GroupKind::Data { .. }, Some(gm)) => {
                    Some(if i == data[0] { gm } else { 1.0 - gm })
                }
                (GroupKind::Data { weight }, None) => weight,
            })
            .collect()
    }

    /// Group of each user, in user order.
    fn user_groups(&self) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(i, g)| std::iter::repeat_n(i, g.size))
            .collect()
    }

    /// Slope `total_a / total_b` that equal weighted rates force between two
    /// data groups: each member gets `c / weight`.
    pub fn expected_ratio(&self, gamma: Option<f64>, a: usize, b: usize) -> f64 {
        let w = self.group_weights(gamma);
        let (wa, wb) = (w[a].unwrap_or(f64::NAN), w[b].unwrap_or(f64::NAN));
        (self.groups[a].size as f64 / wa) / (self.groups[b].size as f64 / wb)
    }
}

/// Draws `size x n_bins` exponential(1) power gains, i.e. `|h|^2` of a
/// unit-variance Rayleigh channel.
fn draw_gains<R: Rng + ?Sized>(rng: &mut R, size: usize, n_bins: usize) -> Vec<Vec<f64>> {
    (0..size)
        .map(|_| (0..n_bins).map(|_| rng.sample::<f64, _>(Exp1)).collect())
        .collect()
}

fn realization(cfg: &SimConfig, gains: Vec<Vec<f64>>) -> ChannelRealization<f64> {
    let mask: Vec<Vec<f64>> = cfg
        .groups
        .iter()
        .flat_map(|g| std::iter::repeat_n(vec![snr_db_to_linear(g.snr_db); cfg.n_bins], g.size))
        .collect();
    let noise = vec![vec![1.0; cfg.n_bins]; gains.len()];
    ChannelRealization::new(gains, mask, noise).expect("generated channel is well formed")
}

/// Draws one channel for every user from a single generator, group by group.
/// The group SNR is folded into the mask with unit noise.
pub fn draw_channel<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> ChannelRealization<f64> {
    let gains = cfg
        .groups
        .iter()
        .flat_map(|g| draw_gains(rng, g.size, cfg.n_bins))
        .collect();
    realization(cfg, gains)
}

/// Generator for one group in one trial.
pub fn group_rng(seed: u64, point: usize, trial: usize, voice: bool, ordinal: usize) -> ChaCha8Rng {
    let stream = ((point as u64) << 48)
        | ((trial as u64 & 0xffff_ffff) << 16)
        | (u64::from(voice) << 15)
        | (ordinal as u64 & 0x7fff);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Channel for one trial with each group drawn from its own stream.
pub fn draw_trial_channel(cfg: &SimConfig, point: usize, trial: usize) -> ChannelRealization<f64> {
    let (mut n_voice, mut n_data) = (0, 0);
    let mut gains = Vec::with_capacity(cfg.n_users());
    for g in &cfg.groups {
        let (voice, ordinal) = match g.kind {
            GroupKind::Voice { .. } => {
                n_voice += 1;
                (true, n_voice - 1)
            }
            GroupKind::Data { .. } => {
                n_data += 1;
                (false, n_data - 1)
            }
        };
        let mut rng = group_rng(cfg.rng_seed, point, trial, voice, ordinal);
        gains.extend(draw_gains(&mut rng, g.size, cfg.n_bins));
    }
    realization(cfg, gains)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub gamma: Option<f64>,
    /// Rate total of every group, in config order.
    pub group_totals: Vec<f64>,
    pub user_rates: Vec<f64>,
    pub c: f64,
    /// False when the voice floors could not be met; data totals are then zero.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub group: usize,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutagePoint {
    pub gamma: Option<f64>,
    pub p: f64,
    /// Per data group, in config order.
    pub quantiles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutageSummary {
    pub data_groups: Vec<usize>,
    pub points: Vec<OutagePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub gamma: Option<f64>,
    pub trials: Vec<TrialRecord>,
    /// Mean total of every group.
    pub averages: Vec<f64>,
    /// One histogram per data group.
    pub histograms: Vec<Histogram>,
    pub outage_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub config: SimConfig,
    pub points: Vec<SweepPoint>,
    pub outage: OutageSummary,
}

/// Two data groups and no voice group; every trial solves the weighted max-min problem.
pub fn run_case1(cfg: &SimConfig) -> Result<SimOutput> {
    cfg.validate()?;
    if !cfg.voice_groups().is_empty() || cfg.data_groups().len() != 2 {
        return Err(Error::Config(
            "case 1 needs exactly two data groups and no voice group".into(),
        ));
    }
    run(cfg, |r, _, weights| {
        let w = WeightVector::new(weights.iter().map(|w| w.expect("data user")).collect())?;
        let res = solve_maxmin(r, &w)?;
        Ok((res.user_rates, res.c, true))
    })
}

/// One or more voice groups plus data groups; every trial runs the mixed
/// allocation and voice-infeasible trials count as outages for every data group.
pub fn run_case2(cfg: &SimConfig) -> Result<SimOutput> {
    cfg.validate()?;
    if cfg.voice_groups().is_empty() {
        return Err(Error::Config("case 2 needs a voice group".into()));
    }
    run(cfg, |r, groups, weights| {
        let classes = groups
            .iter()
            .zip(weights)
            .map(|(g, w)| match (cfg.groups[*g].kind, w) {
                (GroupKind::Voice { r_min }, _) => ServiceClass::Voice { r_min },
                (GroupKind::Data { .. }, w) => ServiceClass::Data {
                    weight: w.expect("data user"),
                },
            })
            .collect();
        let res = solve_mixed(r, &ServiceProfile::new(classes)?)?;
        let feasible = res.status == MixedStatus::Feasible;
        Ok((res.user_rates, res.c, feasible))
    })
}

/// Dispatches to [`run_case2`] when a voice group is configured, else [`run_case1`].
pub fn run_config(cfg: &SimConfig) -> Result<SimOutput> {
    if cfg.voice_groups().is_empty() {
        run_case1(cfg)
    } else {
        run_case2(cfg)
    }
}

type TrialSolver<'a> =
    dyn Fn(&RateMatrix<f64>, &[usize], &[Option<f64>]) -> Result<(Vec<f64>, f64, bool)> + Sync + 'a;

fn run(
    cfg: &SimConfig,
    solve: impl Fn(&RateMatrix<f64>, &[usize], &[Option<f64>]) -> Result<(Vec<f64>, f64, bool)> + Sync,
) -> Result<SimOutput> {
    let solve: &TrialSolver<'_> = &solve;
    let user_groups = cfg.user_groups();
    let data_groups = cfg.data_groups();
    let mut points = Vec::new();
    let mut outage = OutageSummary {
        data_groups: data_groups.clone(),
        points: Vec::new(),
    };
    for (pi, gamma) in cfg.sweep_points().into_iter().enumerate() {
        let gw = cfg.group_weights(gamma);
        let user_weights: Vec<Option<f64>> = user_groups.iter().map(|g| gw[*g]).collect();
        let trials = (0..cfg.n_trials)
            .into_par_iter()
            .map(|t| {
                let r = compute_rate_matrix(&draw_trial_channel(cfg, pi, t));
                let (user_rates, c, feasible) = solve(&r, &user_groups, &user_weights)?;
                let mut group_totals = vec![0.0; cfg.groups.len()];
                for (rate, g) in user_rates.iter().zip(&user_groups) {
                    group_totals[*g] += *rate;
                }
                Ok(TrialRecord {
                    trial: t,
                    gamma,
                    group_totals,
                    user_rates,
                    c,
                    feasible,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        log::info!("sweep point {pi} ({gamma:?}): {} trials", trials.len());

        let n = trials.len() as f64;
        let averages = (0..cfg.groups.len())
            .map(|g| trials.iter().map(|t| t.group_totals[g]).sum::<f64>() / n)
            .collect();
        let histograms = data_groups
            .iter()
            .map(|&g| {
                let values: Vec<f64> = trials.iter().map(|t| t.group_totals[g]).collect();
                histogram(g, &values, cfg.hist_bins)
            })
            .collect();
        let outage_fraction = trials.iter().filter(|t| !t.feasible).count() as f64 / n;

        let sorted: Vec<Vec<f64>> = data_groups
            .iter()
            .map(|&g| {
                let mut v: Vec<f64> = trials
                    .iter()
                    .map(|t| if t.feasible { t.group_totals[g] } else { 0.0 })
                    .collect();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        for &p in &cfg.outage_probs {
            outage.points.push(OutagePoint {
                gamma,
                p,
                quantiles: sorted.iter().map(|v| outage_quantile(v, p)).collect(),
            });
        }
        points.push(SweepPoint {
            gamma,
            trials,
            averages,
            histograms,
            outage_fraction,
        });
    }
    Ok(SimOutput {
        config: cfg.clone(),
        points,
        outage,
    })
}

/// Rate level `r*` such that a fraction `p` of the samples lies strictly below
/// it (for distinct samples): the `floor(p n)`-th order statistic.
pub fn outage_quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let idx = ((p * sorted.len() as f64).floor() as usize).min(sorted.len() - 1);
    sorted[idx]
}

/// Equal-width histogram over the sample range.
pub fn histogram(group: usize, values: &[f64], n_bins: usize) -> Histogram {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || !(hi > lo) {
        let at = if values.is_empty() { 0.0 } else { lo };
        return Histogram {
            group,
            edges: vec![at, at],
            counts: vec![values.len()],
        };
    }
    let width = (hi - lo) / n_bins as f64;
    let edges = (0..=n_bins)
        .map(|i| if i == n_bins { hi } else { lo + width * i as f64 })
        .collect();
    let mut counts = vec![0; n_bins];
    for v in values {
        let i = (((v - lo) / width) as usize).min(n_bins - 1);
        counts[i] += 1;
    }
    Histogram {
        group,
        edges,
        counts,
    }
}

fn fmt_gamma(g: Option<f64>) -> String {
    g.map(|g| g.to_string()).unwrap_or_default()
}

impl SimOutput {
    fn meta(&self) -> String {
        format!(
            "rng={RNG_NAME} seed={} streams=(point,trial,class,group) n_bins={} n_trials={}",
            self.config.rng_seed, self.config.n_bins, self.config.n_trials
        )
    }

    fn group_labels(&self) -> Vec<String> {
        (1..=self.config.groups.len()).map(|g| format!("g{g}_total")).collect()
    }

    /// One row per trial: `trial,gamma,g1_total,...,c,feasible`.
    pub fn trials_csv(&self) -> String {
        let labels = self.group_labels().join(",");
        let mut out = format!(
            "# trial index; gamma of the sweep point (empty if none); rate total per group in config order; weighted max-min value c; feasible=0 when voice floors failed; {}\n",
            self.meta()
        );
        let _ = writeln!(out, "trial,gamma,{labels},c,feasible");
        for p in &self.points {
            for t in &p.trials {
                let _ = write!(out, "{},{}", t.trial, fmt_gamma(t.gamma));
                for v in &t.group_totals {
                    let _ = write!(out, ",{v}");
                }
                let _ = writeln!(out, ",{},{}", t.c, u8::from(t.feasible));
            }
        }
        out
    }

    /// One row per (gamma, p): `gamma,p,q_g<i>...` for each data group.
    pub fn outage_csv(&self) -> String {
        let labels: Vec<String> = self
            .outage
            .data_groups
            .iter()
            .map(|g| format!("q_g{}", g + 1))
            .collect();
        let mut out = format!(
            "# gamma; outage probability p; per data group the rate r* with a fraction p of trials below it (voice-infeasible trials count as 0); {}\n",
            self.meta()
        );
        let _ = writeln!(out, "gamma,p,{}", labels.join(","));
        for pt in &self.outage.points {
            let _ = write!(out, "{},{}", fmt_gamma(pt.gamma), pt.p);
            for q in &pt.quantiles {
                let _ = write!(out, ",{q}");
            }
            out.push('\n');
        }
        out
    }

    /// One row per histogram bin: `gamma,group,bin_lo,bin_hi,count`.
    pub fn hist_csv(&self) -> String {
        let mut out = format!(
            "# gamma; data group (1-based); bin edges [bin_lo, bin_hi); trials in bin (last bin closed); {}\n",
            self.meta()
        );
        out.push_str("gamma,group,bin_lo,bin_hi,count\n");
        for p in &self.points {
            for h in &p.histograms {
                for (i, count) in h.counts.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{count}",
                        fmt_gamma(p.gamma),
                        h.group + 1,
                        h.edges[i],
                        h.edges[i + 1]
                    );
                }
            }
        }
        out
    }

    /// One row per sweep point: `gamma,g1_mean,...,outage_fraction`.
    pub fn averages_csv(&self) -> String {
        let labels: Vec<String> = (1..=self.config.groups.len())
            .map(|g| format!("g{g}_mean"))
            .collect();
        let mut out = format!(
            "# gamma; mean rate total per group over all trials; fraction of voice-infeasible trials; {}\n",
            self.meta()
        );
        let _ = writeln!(out, "gamma,{},outage_fraction", labels.join(","));
        for p in &self.points {
            let _ = write!(out, "{}", fmt_gamma(p.gamma));
            for a in &p.averages {
                let _ = write!(out, ",{a}");
            }
            let _ = writeln!(out, ",{}", p.outage_fraction);
        }
        out
    }
}
