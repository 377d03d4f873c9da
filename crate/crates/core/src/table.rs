//! CSV result files.
//!
//! One header line, then one line per [`ResultRow`], columns in [`COLUMNS`]
//! order. Real values are written in scientific notation with nine
//! significant digits; undefined values are `NA`. `border_fix` is `1` or `0`.

use std::io::{Read, Write};
use std::path::Path;

use crate::adversary::StrategyId;
use crate::error::{Error, Result};
use crate::metrics::RunMetrics;
use crate::params::ProtocolParams;
use crate::sim::ResultRow;

pub const COLUMNS: [&str; 27] = [
    "n",
    "k",
    "K",
    "L",
    "PA",
    "border_fix",
    "R",
    "seed",
    "epsilon",
    "epsilon_prime",
    "eps_prime_w0",
    "eps_prime_w1",
    "eps_prime_w2",
    "eps_prime_vs_eA",
    "D",
    "CL",
    "CL_w0",
    "CL_w1",
    "CL_w2",
    "best_eps_prime",
    "best_CL",
    "blocks_total",
    "blocks_accepted",
    "resamples",
    "stderr_epsilon",
    "stderr_eps_prime",
    "walltime_s",
];

pub const NA: &str = "NA";

/// Scientific notation, nine significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.8e}")
}

fn opt_real(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), format_real)
}

fn opt_id(v: Option<StrategyId>) -> String {
    v.map_or_else(|| NA.to_string(), |s| s.name().to_string())
}

fn record(row: &ResultRow) -> Vec<String> {
    let p = &row.params;
    let m = &row.metrics;
    vec![
        p.n.to_string(),
        format_real(p.k),
        format_real(p.gauge_k),
        p.code_len.to_string(),
        p.pa.to_string(),
        u8::from(p.border_fix).to_string(),
        p.rounds.to_string(),
        row.seed.to_string(),
        opt_real(m.epsilon),
        opt_real(m.epsilon_prime),
        opt_real(m.eps_prime_per_strategy[0]),
        opt_real(m.eps_prime_per_strategy[1]),
        opt_real(m.eps_prime_per_strategy[2]),
        opt_real(m.eps_prime_vs_a),
        opt_real(m.discard),
        opt_real(m.cl),
        opt_real(m.cl_per_strategy[0]),
        opt_real(m.cl_per_strategy[1]),
        opt_real(m.cl_per_strategy[2]),
        opt_id(m.best_eps_prime),
        opt_id(m.best_cl),
        m.blocks_total.to_string(),
        m.blocks_accepted.to_string(),
        row.resamples.to_string(),
        opt_real(m.stderr_epsilon),
        opt_real(m.stderr_eps_prime),
        opt_real(row.walltime_s),
    ]
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write_rows<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS).map_err(csv_err)?;
    for row in rows {
        w.write_record(record(row)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

pub fn to_csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

/// Writes `rows` to `path`.
pub fn emit_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let text = to_csv_string(rows)?;
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

struct Fields<'a> {
    rec: &'a csv::StringRecord,
    line: u64,
}

impl Fields<'_> {
    fn raw(&self, col: usize) -> &str {
        self.rec.get(col).unwrap_or_default()
    }

    fn bad(&self, col: usize) -> Error {
        Error::Format(format!("line {}: bad {} value `{}`", self.line, COLUMNS[col], self.raw(col)))
    }

    fn parse<T: std::str::FromStr>(&self, col: usize) -> Result<T> {
        self.raw(col).parse().map_err(|_| self.bad(col))
    }

    fn opt_real(&self, col: usize) -> Result<Option<f64>> {
        match self.raw(col) {
            NA => Ok(None),
            _ => self.parse(col).map(Some),
        }
    }

    fn opt_id(&self, col: usize) -> Result<Option<StrategyId>> {
        match self.raw(col) {
            NA => Ok(None),
            s => s.parse().map(Some).map_err(|_| self.bad(col)),
        }
    }
}

fn parse_row(rec: &csv::StringRecord, line: u64) -> Result<ResultRow> {
    if rec.len() != COLUMNS.len() {
        return Err(Error::Format(format!("line {line}: {} fields, expected {}", rec.len(), COLUMNS.len())));
    }
    let f = Fields { rec, line };
    let border_fix = match f.raw(5) {
        "1" => true,
        "0" => false,
        _ => return Err(f.bad(5)),
    };
    let params = ProtocolParams {
        n: f.parse(0)?,
        k: f.parse(1)?,
        gauge_k: f.parse(2)?,
        code_len: f.parse(3)?,
        pa: f.parse(4)?,
        border_fix,
        rounds: f.parse(6)?,
    };
    let metrics = RunMetrics {
        epsilon: f.opt_real(8)?,
        epsilon_prime: f.opt_real(9)?,
        eps_prime_per_strategy: [f.opt_real(10)?, f.opt_real(11)?, f.opt_real(12)?],
        eps_prime_vs_a: f.opt_real(13)?,
        discard: f.opt_real(14)?,
        cl: f.opt_real(15)?,
        cl_per_strategy: [f.opt_real(16)?, f.opt_real(17)?, f.opt_real(18)?],
        best_eps_prime: f.opt_id(19)?,
        best_cl: f.opt_id(20)?,
        blocks_total: f.parse(21)?,
        blocks_accepted: f.parse(22)?,
        stderr_epsilon: f.opt_real(24)?,
        stderr_eps_prime: f.opt_real(25)?,
        stderr_discard: None,
    };
    Ok(ResultRow {
        params,
        seed: f.parse(7)?,
        metrics,
        resamples: f.parse(23)?,
        walltime_s: f.opt_real(26)?,
    })
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Format("header does not match the result schema".into()));
    }
    r.records()
        .enumerate()
        .map(|(idx, rec)| parse_row(&rec.map_err(csv_err)?, idx as u64 + 2))
        .collect()
}

/// Reads rows written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    read_rows(std::io::BufReader::new(file))
}
