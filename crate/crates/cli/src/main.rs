use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corr_are::are_bounds::{Anchor, Pair};
use corr_are::stats_mc::Statistic;
use corr_are_cli::{run_to_destination, Command, Format, PairChoice, RunConfig};

/// Efficiencies of Pearson's R, Spearman's S and Kendall's T under
/// bivariate normality: tables, bounds, verification and Monte Carlo.
#[derive(Debug, Parser)]
#[command(name = "corr-are", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// The three efficiencies on an interior grid of (0, 1).
    Table,
    /// Quadratic bound coefficients and crossover roots.
    Bounds,
    /// Run the invariant suites; exit 1 on any failure.
    Verify,
    /// Monte Carlo moments of R, S, T.
    Mc,
    /// Derivative-chain diagnostics for the RT pair.
    Reduce,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PairArg {
    Rt,
    Ts,
    Rs,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AnchorArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StatArg {
    R,
    S,
    T,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Opts {
    #[arg(long, global = true, value_enum, ignore_case = true)]
    pair: Option<PairArg>,
    #[arg(long, global = true, value_enum)]
    anchor: Option<AnchorArg>,
    /// Number of interior grid points.
    #[arg(long, global = true, default_value_t = RunConfig::DEFAULT_GRID)]
    grid: usize,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = RunConfig::DEFAULT_TOL)]
    tol: f64,
    /// Monte Carlo sample size.
    #[arg(long, global = true, default_value_t = RunConfig::DEFAULT_N)]
    n: usize,
    /// Monte Carlo replicates.
    #[arg(long, global = true, default_value_t = RunConfig::DEFAULT_REPS)]
    reps: usize,
    #[arg(long, global = true, default_value_t = RunConfig::DEFAULT_SEED)]
    seed: u64,
    /// Comma-separated correlations (default 0,0.5,0.9).
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    rho: Option<Vec<f64>>,
    /// Comma-separated statistics (default r,s,t).
    #[arg(long, global = true, value_enum, value_delimiter = ',', ignore_case = true)]
    stat: Option<Vec<StatArg>>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: FormatArg,
}

fn config(cli: Cli) -> RunConfig {
    let command = match cli.command {
        Cmd::Table => Command::Table,
        Cmd::Bounds => Command::Bounds,
        Cmd::Verify => Command::Verify,
        Cmd::Mc => Command::Mc,
        Cmd::Reduce => Command::Reduce,
    };
    let o = cli.opts;
    let mut cfg = RunConfig::new(command);
    cfg.pair = o.pair.map(|p| match p {
        PairArg::Rt => PairChoice::One(Pair::RT),
        PairArg::Ts => PairChoice::One(Pair::TS),
        PairArg::Rs => PairChoice::One(Pair::RS),
        PairArg::All => PairChoice::All,
    });
    cfg.anchor = match o.anchor {
        Some(AnchorArg::Zero) => Some(Anchor::Zero),
        Some(AnchorArg::One) => Some(Anchor::One),
        Some(AnchorArg::Both) | None => None,
    };
    cfg.grid = o.grid;
    cfg.tol = o.tol;
    cfg.n = o.n;
    cfg.reps = o.reps;
    cfg.seed = o.seed;
    if let Some(rho) = o.rho {
        cfg.rho = rho;
    }
    if let Some(stats) = o.stat {
        cfg.stats = stats
            .into_iter()
            .map(|s| match s {
                StatArg::R => Statistic::R,
                StatArg::S => Statistic::S,
                StatArg::T => Statistic::T,
            })
            .collect();
    }
    cfg.threads = o.threads;
    cfg.out = o.out;
    cfg.format = match o.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    cfg
}

fn main() -> ExitCode {
    let cfg = config(Cli::parse());
    match run_to_destination(&cfg) {
        Ok(outcome) => {
            for line in &outcome.summary {
                eprintln!("{line}");
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
