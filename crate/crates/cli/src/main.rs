//! `ofdma-maxmin`: command-line front end to the allocation solvers and the simulator.
//!
//! Exit codes: 0 success, 2 input error, 3 solver failure or infeasible.

mod input;
mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ofdma_maxmin::maxmin::solve_maxmin_with;
use ofdma_maxmin::sim::run_config;
use ofdma_maxmin::{
    check_feasibility, solve_mixed, solve_two_user, Error, MixedStatus, RateMatrixF64, ServiceClass,
    ServiceProfileF64, SimConfig, SolverOptions, TwoUserInstanceF64, WeightVectorF64,
};

use output::{join_short, short, sig, Manifest};

#[derive(Parser)]
#[command(name = "ofdma-maxmin", version, about = "Weighted max-min fair OFDMA subcarrier allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted max-min allocation for N users.
    Solve {
        #[command(flatten)]
        channel: ChannelArg,
        /// One weight per user (default: all ones).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        weights: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutArg,
        /// Also write the final simplex tableau (needs --out-dir).
        #[arg(long, requires = "out_dir")]
        dump_tableau: bool,
    },
    /// Sort-and-threshold algorithm for exactly two users.
    TwoUser {
        #[command(flatten)]
        channel: ChannelArg,
        /// Weight of user 2 relative to user 1.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        gamma: f64,
    },
    /// Tests whether a rate vector is achievable.
    Feasible {
        #[command(flatten)]
        channel: ChannelArg,
        /// One desired rate per user.
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        desired: Vec<f64>,
    },
    /// Voice users with rate floors, remaining users share the rest max-min fairly.
    Mixed {
        #[command(flatten)]
        channel: ChannelArg,
        /// Voice floor as user=rate with 1-based users, e.g. `2=36`; repeatable.
        #[arg(long, required = true)]
        rmin: Vec<String>,
        /// One weight per user; entries of voice users are ignored (default: all ones).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        weights: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Monte-Carlo sweep from a JSON config; writes trials, outage, histogram and average CSVs.
    Simulate {
        config: PathBuf,
        /// Override the config's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's trial count per sweep point.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct ChannelArg {
    /// Rate CSV (`# rates N K` header) or JSON channel file (gains, mask, noise).
    channel: PathBuf,
}

#[derive(Args)]
struct OutArg {
    /// Directory for the CSV results and manifest; nothing is written without it.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
    /// The answer is a valid "no"; the summary has already been printed.
    Infeasible,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IterationLimit(_) | Error::SingularBasis(_) | Error::Solver(_) => {
                Failure::Solver(e.into())
            }
            _ => Failure::Input(e.into()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("MAXMIN_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { channel, weights, out, dump_tableau } => {
            cmd_solve(&channel.channel, weights, out.out_dir.as_deref(), dump_tableau)
        }
        Command::TwoUser { channel, gamma } => cmd_two_user(&channel.channel, gamma),
        Command::Feasible { channel, desired } => cmd_feasible(&channel.channel, &desired),
        Command::Mixed { channel, rmin, weights, out } => {
            cmd_mixed(&channel.channel, &rmin, weights, out.out_dir.as_deref())
        }
        Command::Simulate { config, seed, trials, out_dir } => cmd_simulate(&config, seed, trials, &out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Infeasible) => ExitCode::from(3),
    }
}

fn weights_for(r: &RateMatrixF64, weights: Option<Vec<f64>>) -> Result<WeightVectorF64, Failure> {
    let w = weights.unwrap_or_else(|| vec![1.0; r.n_users()]);
    if w.len() != r.n_users() {
        return Err(anyhow!("{} weights given for {} users", w.len(), r.n_users()).into());
    }
    Ok(WeightVectorF64::new(w)?)
}

fn cmd_solve(path: &Path, weights: Option<Vec<f64>>, out_dir: Option<&Path>, dump_tableau: bool) -> CmdResult {
    let (r, bytes) = input::read_channel(path)?;
    let w = weights_for(&r, weights)?;
    let opts = SolverOptions { keep_tableau: dump_tableau, ..SolverOptions::default() };
    let (res, sol) = solve_maxmin_with(&r, &w, &opts)?;
    for warning in &res.warnings {
        log::warn!("{warning:?}");
    }
    println!("c={}", short(res.c));
    println!("rates={}", join_short(&res.user_rates));
    if let Some(dir) = out_dir {
        let mut files = vec![
            ("allocation.csv", output::allocation_csv(&res.allocation)),
            ("user_rates.csv", output::user_rates_csv(&res.user_rates, Some(w.as_slice()))),
        ];
        if let Some(t) = &sol.tableau {
            files.push(("tableau.csv", t.to_csv()));
        }
        let options = format!("weights={:?}", w.as_slice());
        output::write_bundle(dir, &files, Manifest::new("solve", &bytes, &options, None))?;
    }
    Ok(())
}

fn cmd_two_user(path: &Path, gamma: f64) -> CmdResult {
    let (r, _) = input::read_channel(path)?;
    if r.n_users() != 2 {
        return Err(anyhow!("two-user needs exactly 2 users, file has {}", r.n_users()).into());
    }
    let inst = TwoUserInstanceF64::new(r.row(0).to_vec(), r.row(1).to_vec(), gamma)?;
    let sol = solve_two_user(&inst)?;
    let mut table = String::from("k\tR1\tR2\tL\tA\tB\tGamma\n");
    for (pos, &bin) in sol.permutation.iter().enumerate() {
        let th = &sol.thresholds;
        let _ = writeln!(
            table,
            "{}\t{}\t{}\t{:.2}\t{}\t{}\t{}",
            pos + 1,
            short(inst.r1()[bin]),
            short(inst.r2()[bin]),
            sol.ratios[pos],
            short(th.a[pos]),
            short(th.b[pos]),
            sig(th.gamma_k[pos], 3)
        );
    }
    print!("{table}");
    let order: Vec<String> = sol.permutation.iter().map(|b| (b + 1).to_string()).collect();
    println!("order={}", order.join(","));
    println!("k_min={}", sol.k_min);
    if let Some(bin) = sol.split_bin() {
        println!("split_bin={} alpha_split={}", bin + 1, short(sol.alpha_split));
    }
    println!("c={}", short(sol.c));
    println!("rates={}", join_short(&[sol.rate1, sol.rate2]));
    Ok(())
}

fn cmd_feasible(path: &Path, desired: &[f64]) -> CmdResult {
    let (r, _) = input::read_channel(path)?;
    let f = check_feasibility(&r, desired)?;
    if f.feasible {
        println!("feasible c={:.3}", f.c);
        Ok(())
    } else {
        println!("infeasible c={:.3}", f.c);
        Err(Failure::Infeasible)
    }
}

fn cmd_mixed(path: &Path, rmin: &[String], weights: Option<Vec<f64>>, out_dir: Option<&Path>) -> CmdResult {
    let (r, bytes) = input::read_channel(path)?;
    let floors = input::parse_floors(rmin, r.n_users())?;
    let w = weights.unwrap_or_else(|| vec![1.0; r.n_users()]);
    if w.len() != r.n_users() {
        return Err(anyhow!("{} weights given for {} users", w.len(), r.n_users()).into());
    }
    let classes = floors
        .iter()
        .zip(&w)
        .map(|(floor, weight)| match floor {
            Some(r_min) => ServiceClass::Voice { r_min: *r_min },
            None => ServiceClass::Data { weight: *weight },
        })
        .collect();
    let profile = ServiceProfileF64::new(classes)?;
    let res = solve_mixed(&r, &profile)?;
    if res.status == MixedStatus::VoiceInfeasible {
        println!("status=voice-infeasible margin={:.3}", res.voice_margin);
        return Err(Failure::Infeasible);
    }
    println!("status=feasible");
    println!("c={}", short(res.c));
    println!("rates={}", join_short(&res.user_rates));
    if let Some(dir) = out_dir {
        let files = [
            ("allocation.csv", output::allocation_csv(&res.allocation)),
            ("user_rates.csv", output::user_rates_csv(&res.user_rates, None)),
        ];
        let options = format!("floors={floors:?} weights={w:?}");
        output::write_bundle(dir, &files, Manifest::new("mixed", &bytes, &options, None))?;
    }
    Ok(())
}

fn cmd_simulate(path: &Path, seed: Option<u64>, trials: Option<usize>, out_dir: &Path) -> CmdResult {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut cfg: SimConfig =
        serde_json::from_slice(&bytes).with_context(|| format!("invalid config {}", path.display()))?;
    if let Some(seed) = seed {
        cfg.rng_seed = seed;
    }
    if let Some(trials) = trials {
        cfg.n_trials = trials;
    }
    cfg.validate()?;
    log::info!("simulating {} trials x {} points", cfg.n_trials, cfg.sweep_points().len());
    let out = run_config(&cfg)?;
    for p in &out.points {
        let gamma = p.gamma.map_or_else(|| "-".into(), |g| g.to_string());
        println!(
            "gamma={gamma} means={} outage={}",
            join_short(&p.averages),
            short(p.outage_fraction)
        );
    }
    let files = [
        ("trials.csv", out.trials_csv()),
        ("outage.csv", out.outage_csv()),
        ("hist.csv", out.hist_csv()),
        ("averages.csv", out.averages_csv()),
    ];
    let options = format!("seed={} trials={}", cfg.rng_seed, cfg.n_trials);
    output::write_bundle(out_dir, &files, Manifest::new("simulate", &bytes, &options, Some(cfg.rng_seed)))?;
    Ok(())
}
