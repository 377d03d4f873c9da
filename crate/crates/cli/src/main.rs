//! `drsim`: run, sweep and plot simulations from the command line.
//!
//! Results go to CSV (stdout when `--out` is omitted); `plot` turns a sweep
//! CSV into an SVG chart. Exit codes: 0 success, 2 invalid parameters or
//! input, 3 runtime abort, 4 I/O failure.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drsim_core::plot::{self, Series};
use drsim_core::sim::{self, parse_values, in_pool};
use drsim_core::{table, Error, ProtocolParams, Result, RunOptions, SweepConfig, SweepParam};

use config::ConfigFile;

#[derive(Parser, Debug)]
#[command(name = "drsim", version, about = "Monte Carlo simulation of secret-key distillation over a dummy random generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one configuration and write a single result row.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run one configuration per value of a swept parameter.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to vary: n, k, K, L or PA.
        #[arg(long)]
        param: Option<String>,
        /// Values as `start:end:step` (inclusive) or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
    },
    /// Render a sweep CSV as a dual-axis SVG chart.
    Plot {
        /// Sweep results written by `drsim sweep`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated series on the left axis.
        #[arg(long, default_value = "epsilon,epsilon_prime")]
        left: String,
        /// Comma-separated series on the right (CL) axis.
        #[arg(long, default_value = "CL")]
        right: String,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// `key = value` file with defaults; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Length of the shared vectors (even).
    #[arg(long)]
    n: Option<usize>,
    /// Degradation divisor (> 1).
    #[arg(long)]
    k: Option<f64>,
    /// Gauge multiplier: bin width is K / (2·sqrt(n·k)).
    #[arg(long = "K")]
    gauge_k: Option<f64>,
    /// Repetition-code length.
    #[arg(long = "L")]
    code_len: Option<usize>,
    /// Protocol rounds per run.
    #[arg(long = "R")]
    rounds: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Privacy-amplification group size (1 disables hashing).
    #[arg(long)]
    pa: Option<usize>,
    /// Disable centering of V_B within the sampling comb.
    #[arg(long)]
    no_border_fix: bool,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Record wall-clock time per run (makes output non-reproducible).
    #[arg(long)]
    walltime: bool,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_SEED: u64 = 42;

struct Resolved {
    params: ProtocolParams,
    seed: u64,
    threads: Option<usize>,
    options: RunOptions,
    config: ConfigFile,
}

impl CommonArgs {
    fn resolve(&self) -> Result<Resolved> {
        let config = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let base = ProtocolParams::default();
        let border_fix = if self.no_border_fix { false } else { config.flag("border_fix")?.unwrap_or(base.border_fix) };
        let params = ProtocolParams {
            n: pick(self.n, config.get("n")?, base.n),
            k: pick(self.k, config.get("k")?, base.k),
            gauge_k: pick(self.gauge_k, config.get("K")?, base.gauge_k),
            code_len: pick(self.code_len, config.get("L")?, base.code_len),
            pa: pick(self.pa, config.get("pa")?, base.pa),
            border_fix,
            rounds: pick(self.rounds, config.get("R")?, base.rounds),
        };
        Ok(Resolved {
            params,
            seed: pick(self.seed, config.get("seed")?, DEFAULT_SEED),
            threads: self.threads.or(config.get("threads")?),
            options: RunOptions { record_walltime: self.walltime },
            config,
        })
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn write_csv(out: Option<&Path>, rows: &[sim::ResultRow]) -> Result<()> {
    match out {
        Some(path) => table::emit_csv(path, rows),
        None => {
            let text = table::to_csv_string(rows)?;
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_series(list: &str) -> Result<Vec<Series>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse()).collect()
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common } => {
            let r = common.resolve()?;
            log::info!("run {:?} seed {}", r.params, r.seed);
            let row = in_pool(r.threads, || sim::run_simulation_with(&r.params, r.seed, r.options))??;
            write_csv(common.out.as_deref(), &[row])
        }
        Command::Sweep { common, param, values } => {
            let r = common.resolve()?;
            let param: SweepParam = param
                .as_deref()
                .or(r.config.raw("param"))
                .ok_or_else(|| Error::InvalidParams("sweep needs --param".into()))?
                .parse()?;
            let values = parse_values(
                values
                    .as_deref()
                    .or(r.config.raw("values"))
                    .ok_or_else(|| Error::InvalidParams("sweep needs --values".into()))?,
            )?;
            let cfg = SweepConfig { base: r.params, param, values, seed: r.seed, options: r.options };
            cfg.expand()?;
            log::info!("sweep {} over {:?} seed {}", cfg.param, cfg.values, cfg.seed);
            let rows = in_pool(r.threads, || sim::sweep(&cfg))??;
            write_csv(common.out.as_deref(), &rows)
        }
        Command::Plot { input, out, left, right } => {
            let rows = table::read_csv(&input)?;
            plot::emit_plot(&out, &rows, &parse_series(&left)?, &parse_series(&right)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("drsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
