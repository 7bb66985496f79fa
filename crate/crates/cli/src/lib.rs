//! Library side of the `corr-are` command: configuration, the five
//! commands and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod verify;

use std::io::Write;
use std::path::PathBuf;

use corr_are::are_bounds::{Anchor, Pair};
use corr_are::stats_mc::{Statistic, MIN_N, MIN_REPS};
use serde::Serialize;
use thiserror::Error;

pub use commands::{cmd_bounds, cmd_mc, cmd_reduce, cmd_table, BoundsRow, McRow, ReduceRow, TableRow};
pub use verify::{cmd_verify, VerifyRow, VERIFY_MIN_GRID};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Compute(#[from] corr_are::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Table,
    Bounds,
    Verify,
    Mc,
    Reduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairChoice {
    All,
    One(Pair),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// `None` is the command default: all pairs, or R,T for `reduce`.
    pub pair: Option<PairChoice>,
    /// `None` selects both anchors.
    pub anchor: Option<Anchor>,
    pub grid: usize,
    pub tol: f64,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub rho: Vec<f64>,
    pub stats: Vec<Statistic>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub const DEFAULT_GRID: usize = 999;
    pub const DEFAULT_TOL: f64 = 1e-12;
    pub const DEFAULT_N: usize = 1000;
    pub const DEFAULT_REPS: usize = 4000;
    pub const DEFAULT_SEED: u64 = 42;
    pub const DEFAULT_RHO: [f64; 3] = [0.0, 0.5, 0.9];

    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            pair: None,
            anchor: None,
            grid: Self::DEFAULT_GRID,
            tol: Self::DEFAULT_TOL,
            n: Self::DEFAULT_N,
            reps: Self::DEFAULT_REPS,
            seed: Self::DEFAULT_SEED,
            rho: Self::DEFAULT_RHO.to_vec(),
            stats: Statistic::ALL.to_vec(),
            threads: None,
            out: None,
            format: Format::Csv,
        }
    }

    pub fn pairs(&self) -> Vec<Pair> {
        match self.pair {
            Some(PairChoice::One(p)) => vec![p],
            Some(PairChoice::All) | None => Pair::ALL.to_vec(),
        }
    }

    pub fn anchors(&self) -> Vec<Anchor> {
        self.anchor.map_or(Anchor::BOTH.to_vec(), |a| vec![a])
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.grid < 2 {
            return usage(format!("--grid must be at least 2, got {}", self.grid));
        }
        if !(self.tol > 0.0) {
            return usage(format!("--tol must be positive, got {}", self.tol));
        }
        if self.threads == Some(0) {
            return usage("--threads must be at least 1");
        }
        match self.command {
            Command::Verify if self.grid < VERIFY_MIN_GRID => usage(format!(
                "--grid {} is too coarse for verification; use at least {VERIFY_MIN_GRID}",
                self.grid
            )),
            Command::Reduce if self.grid < 3 => usage("--grid must be at least 3 for reduce"),
            Command::Reduce if self.pair.is_some_and(|p| p != PairChoice::One(Pair::RT)) => usage(
                "reduce supports only the RT pair; the derivative chains for TS and RS \
                 depend on multipliers that are not available",
            ),
            Command::Mc => {
                if self.reps < MIN_REPS {
                    return usage(format!("--reps must be at least {MIN_REPS}, got {}", self.reps));
                }
                if self.n < MIN_N {
                    return usage(format!("--n must be at least {MIN_N}, got {}", self.n));
                }
                if self.rho.is_empty() || self.stats.is_empty() {
                    return usage("--rho and --stat need at least one value");
                }
                if let Some(r) = self.rho.iter().find(|r| !(r.abs() < 1.0)) {
                    return usage(format!("--rho values must satisfy |rho| < 1, got {r}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A flat output row. `FIELDS` lists the serialized field names in order,
/// so the CSV header is present even when there are no rows.
pub trait Record: Serialize {
    const FIELDS: &'static [&'static str];
}

/// Writes records as CSV (header always present, LF endings) or as a JSON
/// array with the same fields.
pub fn write_records<T: Record, W: Write>(rows: &[T], format: Format, out: W) -> CliResult<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .has_headers(false)
                .from_writer(out);
            w.write_record(T::FIELDS)?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Outcome of a command: `passed` is false only for a failing verification,
/// whose `summary` holds one `check: status` line per invariant.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub passed: bool,
    pub summary: Vec<String>,
}

fn render<T: Record>(rows: &[T], cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_records(rows, cfg.format, &mut buf)?;
    Ok(buf)
}

fn execute(cfg: &RunConfig) -> CliResult<(Vec<u8>, Outcome)> {
    let ok = Outcome {
        passed: true,
        summary: Vec::new(),
    };
    match cfg.command {
        Command::Table => Ok((render(&cmd_table(cfg)?, cfg)?, ok)),
        Command::Bounds => Ok((render(&cmd_bounds(cfg)?, cfg)?, ok)),
        Command::Mc => Ok((render(&cmd_mc(cfg)?, cfg)?, ok)),
        Command::Reduce => Ok((render(&cmd_reduce(cfg)?, cfg)?, ok)),
        Command::Verify => {
            let rows = cmd_verify(cfg)?;
            let outcome = Outcome {
                passed: rows.iter().all(|r| r.pass),
                summary: rows.iter().map(|r| format!("{}: {}", r.check, r.status)).collect(),
            };
            Ok((render(&rows, cfg)?, outcome))
        }
    }
}

/// Runs the configured command, writing its records to `out`.
pub fn run<W: Write>(cfg: &RunConfig, mut out: W) -> CliResult<Outcome> {
    cfg.validate()?;
    let (bytes, outcome) = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(std::io::Error::other)?
            .install(|| execute(cfg))?,
        None => execute(cfg)?,
    };
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(outcome)
}

/// [`run`] writing to `cfg.out` or stdout.
pub fn run_to_destination(cfg: &RunConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    match &cfg.out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            let mut buf = std::io::BufWriter::new(file);
            let outcome = run(cfg, &mut buf)?;
            buf.flush()?;
            Ok(outcome)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            run(cfg, &mut lock)
        }
    }
}
