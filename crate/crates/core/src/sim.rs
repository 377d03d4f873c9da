//! Full runs (R rounds → blocks → optional hashing → metrics) and parameter sweeps.
//!
//! Every random draw is keyed by `(seed, stream path)`, so results do not
//! depend on the rayon pool size or on scheduling.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::distillation::{self, BlockOutcome, DigitStreams, TallyCounts};
use crate::error::{Error, Result};
use crate::metrics::RunMetrics;
use crate::params::ProtocolParams;
use crate::protocol::run_round_seeded;
use crate::seed::{self, domain};

/// One line of results.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub params: ProtocolParams,
    pub seed: u64,
    pub metrics: RunMetrics,
    /// Rounds redrawn because `|i|` or `|j|` exceeded `n/2`.
    pub resamples: u64,
    /// Only recorded on request, since it breaks byte-level reproducibility.
    pub walltime_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub record_walltime: bool,
}

/// Runs all rounds and returns the per-round digits and the total redraw count.
pub fn collect_digits(params: &ProtocolParams, seed: u64) -> Result<(DigitStreams, u64)> {
    let rounds: Vec<(u8, u8, [u8; 3], u32)> = (0..params.rounds as u64)
        .into_par_iter()
        .map(|r| {
            run_round_seeded(params, seed, r, None)
                .map(|(t, retries)| (t.digit_a, t.digit_b, t.digit_e(), retries))
        })
        .collect::<Result<_>>()?;
    let mut streams = DigitStreams::with_capacity(rounds.len());
    let mut resamples = 0u64;
    for (a, b, e, retries) in rounds {
        streams.push(a, b, e);
        resamples += u64::from(retries);
    }
    Ok((streams, resamples))
}

/// Hashes the accepted blocks' bits (after the flip conventions) in groups of
/// `pa`, with keys shared by all streams, and tallies agreement on the output.
pub fn amplified_agreement(outcomes: &[BlockOutcome], pa: usize, seed: u64) -> Result<TallyCounts> {
    let accepted: Vec<&BlockOutcome> = outcomes.iter().filter(|o| o.accepted).collect();
    let distilled = distillation::tally(outcomes);
    let count = accepted.len() as u64;
    let flip_b = u8::from(2 * distilled.ab_disagree > count);
    let flip_e = distilled.eb_agree.map(|agree| u8::from(2 * agree < count));

    let a: Vec<u8> = accepted.iter().map(|o| o.e_a).collect();
    let b: Vec<u8> = accepted.iter().map(|o| o.e_b ^ flip_b).collect();
    let e: [Vec<u8>; 3] =
        std::array::from_fn(|s| accepted.iter().map(|o| o.e_e[s] ^ flip_e[s]).collect());

    let mut rng = seed::rng_for(seed, &[domain::HASH]);
    let keys = distillation::draw_hash_keys(a.len(), pa, &mut rng)?;
    let ha = distillation::amplify_with_keys(&a, pa, &keys)?;
    let hb = distillation::amplify_with_keys(&b, pa, &keys)?;
    let he = [
        distillation::amplify_with_keys(&e[0], pa, &keys)?,
        distillation::amplify_with_keys(&e[1], pa, &keys)?,
        distillation::amplify_with_keys(&e[2], pa, &keys)?,
    ];
    let hashed: Vec<BlockOutcome> = (0..ha.len())
        .map(|t| BlockOutcome {
            accepted: true,
            e_a: ha[t],
            e_b: hb[t],
            e_e: [he[0][t], he[1][t], he[2][t]],
        })
        .collect();
    Ok(distillation::tally(&hashed))
}

pub fn run_simulation(params: &ProtocolParams, seed: u64) -> Result<ResultRow> {
    run_simulation_with(params, seed, RunOptions::default())
}

pub fn run_simulation_with(params: &ProtocolParams, seed: u64, opts: RunOptions) -> Result<ResultRow> {
    params.check()?;
    let start = Instant::now();
    let (streams, resamples) = collect_digits(params, seed)?;
    let outcomes = distillation::distill(&streams, params.code_len, seed)?;
    let distilled = distillation::tally(&outcomes);
    let agreement = if params.pa > 1 {
        amplified_agreement(&outcomes, params.pa, seed)?
    } else {
        distilled
    };
    let metrics = RunMetrics::compute(&distilled, &agreement, params.n, params.code_len, params.pa);
    Ok(ResultRow {
        params: params.clone(),
        seed,
        metrics,
        resamples,
        walltime_s: opts.record_walltime.then(|| start.elapsed().as_secs_f64()),
    })
}

/// Runs `f` on a dedicated pool of `threads` workers (rayon's default when `None`).
pub fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::invalid("--threads must be >= 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    N,
    /// Degradation divisor `k`.
    Divisor,
    /// Gauge multiplier `K`.
    Gauge,
    CodeLen,
    Pa,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] =
        [SweepParam::N, SweepParam::Divisor, SweepParam::Gauge, SweepParam::CodeLen, SweepParam::Pa];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::N => "n",
            SweepParam::Divisor => "k",
            SweepParam::Gauge => "K",
            SweepParam::CodeLen => "L",
            SweepParam::Pa => "PA",
        }
    }

    fn is_integral(self) -> bool {
        matches!(self, SweepParam::N | SweepParam::CodeLen | SweepParam::Pa)
    }

    pub fn get(self, p: &ProtocolParams) -> f64 {
        match self {
            SweepParam::N => p.n as f64,
            SweepParam::Divisor => p.k,
            SweepParam::Gauge => p.gauge_k,
            SweepParam::CodeLen => p.code_len as f64,
            SweepParam::Pa => p.pa as f64,
        }
    }

    /// `base` with this parameter set to `value`.
    pub fn apply(self, base: &ProtocolParams, value: f64) -> Result<ProtocolParams> {
        let mut p = base.clone();
        let as_count = || {
            if value.fract() == 0.0 && value >= 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::invalid(format!("{} must be a whole number, got {value}", self.name())))
            }
        };
        match self {
            SweepParam::N => p.n = as_count()?,
            SweepParam::Divisor => p.k = value,
            SweepParam::Gauge => p.gauge_k = value,
            SweepParam::CodeLen => p.code_len = as_count()?,
            SweepParam::Pa => p.pa = as_count()?,
        }
        p.validate()?;
        Ok(p)
    }

    pub fn format_value(self, value: f64) -> String {
        if self.is_integral() {
            format!("{}", value as u64)
        } else {
            format!("{value}")
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepParam::N),
            "k" => Ok(SweepParam::Divisor),
            "K" => Ok(SweepParam::Gauge),
            "L" => Ok(SweepParam::CodeLen),
            "PA" | "pa" => Ok(SweepParam::Pa),
            other => Err(Error::invalid(format!("unknown sweep parameter `{other}` (n, k, K, L, PA)"))),
        }
    }
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_values(list: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::invalid(format!("bad number `{s}` in `{list}`")))
    };
    let parts: Vec<&str> = list.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 || stop < start {
                return Err(Error::invalid(format!("bad range `{list}`")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 100_000 {
                return Err(Error::invalid(format!("range `{list}` has too many values")));
            }
            // Multiply rather than accumulate so 0.1 steps do not drift.
            Ok((0..count).map(|t| start + t as f64 * step).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(Error::invalid(format!("bad value list `{list}`"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: ProtocolParams,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub seed: u64,
    pub options: RunOptions,
}

impl SweepConfig {
    /// Checks the value list and returns the parameter set for every value.
    pub fn expand(&self) -> Result<Vec<ProtocolParams>> {
        if self.values.is_empty() {
            return Err(Error::invalid("sweep needs at least one value"));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("sweep values must be strictly increasing"));
        }
        self.values.iter().map(|&v| self.param.apply(&self.base, v)).collect()
    }

    /// Seed of the run at position `index`.
    pub fn run_seed(&self, index: usize) -> u64 {
        seed::derive(self.seed, &[domain::SWEEP, index as u64])
    }
}

/// One run per value, rows in sweep order.
pub fn sweep(config: &SweepConfig) -> Result<Vec<ResultRow>> {
    let runs = config.expand()?;
    runs.par_iter()
        .enumerate()
        .map(|(idx, params)| {
            run_simulation_with(params, config.run_seed(idx), config.options).map_err(|e| Error::Sweep {
                param: config.param.name().to_string(),
                value: config.param.format_value(config.values[idx]),
                source: Box::new(e),
            })
        })
        .collect()
}
