use corr_are::are_bounds::{
    are_with_tol, crossover, q_limits, quad_bounds, Pair, Side,
};
use corr_are::corrmath::Rho;
use corr_are::jet::Real;
use corr_are::reduction::{build_chain_rt, classify_monotone, classify_sign, Pattern, RtChain};
use corr_are::stats_mc::mc_moments;
use serde::Serialize;

use crate::{CliResult, Record, RunConfig};

/// Interior grid `j/(grid + 1)`, j = 1..=grid.
pub(crate) fn interior_grid(grid: usize) -> Vec<f64> {
    (1..=grid).map(|j| j as f64 / (grid + 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub x: f64,
    pub are_rt: f64,
    pub are_ts: f64,
    pub are_rs: f64,
}

impl Record for TableRow {
    const FIELDS: &'static [&'static str] = &["x", "are_rt", "are_ts", "are_rs"];
}

/// The three efficiencies on the interior grid.
pub fn cmd_table(cfg: &RunConfig) -> CliResult<Vec<TableRow>> {
    interior_grid(cfg.grid)
        .into_iter()
        .map(|x| {
            Ok(TableRow {
                x,
                are_rt: are_with_tol(Pair::RT, x, cfg.tol)?,
                are_ts: are_with_tol(Pair::TS, x, cfg.tol)?,
                are_rs: are_with_tol(Pair::RS, x, cfg.tol)?,
            })
        })
        .collect()
}

/// Quadratic bound records (`kind = quad`) and crossover roots
/// (`kind = crossover`). Unused columns are empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub kind: &'static str,
    pub pair: &'static str,
    pub anchor: Option<u8>,
    pub side: Option<&'static str>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub q_low: Option<f64>,
    pub q_high: Option<f64>,
    pub root: Option<f64>,
}

impl Record for BoundsRow {
    const FIELDS: &'static [&'static str] =
        &["kind", "pair", "anchor", "side", "b", "c", "q_low", "q_high", "root"];
}

pub fn cmd_bounds(cfg: &RunConfig) -> CliResult<Vec<BoundsRow>> {
    let mut rows = Vec::new();
    for pair in cfg.pairs() {
        for anchor in cfg.anchors() {
            let (lower, _) = quad_bounds(pair, anchor);
            let (q_low, q_high) = q_limits(pair, anchor);
            rows.push(BoundsRow {
                kind: "quad",
                pair: pair.label(),
                anchor: Some(anchor.value() as u8),
                side: None,
                b: Some(lower.b),
                c: Some(lower.c),
                q_low: Some(q_low),
                q_high: Some(q_high),
                root: None,
            });
        }
        for (side, label) in [(Side::Lower, "L"), (Side::Upper, "U")] {
            rows.push(BoundsRow {
                kind: "crossover",
                pair: pair.label(),
                anchor: None,
                side: Some(label),
                b: None,
                c: None,
                q_low: None,
                q_high: None,
                root: Some(crossover(pair, side)?),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRow {
    pub stat: &'static str,
    pub rho: f64,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub mean_hat: f64,
    pub mu_ref: f64,
    pub var_hat_scaled: f64,
    pub sigma2_ref: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub cdf_sup_dist: f64,
}

impl Record for McRow {
    const FIELDS: &'static [&'static str] = &[
        "stat",
        "rho",
        "n",
        "reps",
        "seed",
        "mean_hat",
        "mu_ref",
        "var_hat_scaled",
        "sigma2_ref",
        "se_mean",
        "se_var",
        "cdf_sup_dist",
    ];
}

/// One Monte Carlo report per (stat, rho), stats outermost.
pub fn cmd_mc(cfg: &RunConfig) -> CliResult<Vec<McRow>> {
    let mut rows = Vec::new();
    for &stat in &cfg.stats {
        for &r in &cfg.rho {
            let rep = mc_moments(stat, Rho::new(r)?, cfg.n, cfg.reps, cfg.seed)?;
            rows.push(McRow {
                stat: rep.stat.label(),
                rho: rep.rho,
                n: rep.n,
                reps: rep.reps,
                seed: rep.seed,
                mean_hat: rep.mean_hat,
                mu_ref: rep.mu_ref,
                var_hat_scaled: rep.var_hat_scaled,
                sigma2_ref: rep.sigma2_ref,
                se_mean: rep.se_mean,
                se_var: rep.se_var,
                cdf_sup_dist: rep.cdf_sup_dist,
            });
        }
    }
    Ok(rows)
}

/// Sign patterns of f_i and g_i and the monotonicity pattern of r_i for one
/// chain node. Breakpoints are `;`-separated. `rho_tilde_at_0` is empty
/// where g_i' vanishes at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReduceRow {
    pub pair: &'static str,
    pub anchor: u8,
    pub node: usize,
    pub f_pattern: String,
    pub f_breaks: String,
    pub g_pattern: String,
    pub g_breaks: String,
    pub r_pattern: String,
    pub r_turns: String,
    pub min_abs_f: f64,
    pub min_abs_g: f64,
    pub min_abs_dr: f64,
    pub rho_tilde_at_0: Option<f64>,
}

impl Record for ReduceRow {
    const FIELDS: &'static [&'static str] = &[
        "pair",
        "anchor",
        "node",
        "f_pattern",
        "f_breaks",
        "g_pattern",
        "g_breaks",
        "r_pattern",
        "r_turns",
        "min_abs_f",
        "min_abs_g",
        "min_abs_dr",
        "rho_tilde_at_0",
    ];
}

fn join_breaks(p: &Pattern) -> String {
    p.breakpoints
        .iter()
        .map(|b| format!("{b:.10}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub(crate) fn node_patterns(
    chain: &RtChain,
    node: usize,
    grid: usize,
) -> corr_are::Result<(Pattern, Pattern, Pattern)> {
    let f = classify_sign(|x| chain.node(node, x).f_value(), 0.0, 1.0, grid)?;
    let g = classify_sign(|x| chain.node(node, x).g_value(), 0.0, 1.0, grid)?;
    let r = classify_monotone(|x| chain.ratio_jet(node, x.value(), 1), 0.0, 1.0, grid)?;
    Ok((f, g, r))
}

/// Chain diagnostics for the R,T pair.
pub fn cmd_reduce(cfg: &RunConfig) -> CliResult<Vec<ReduceRow>> {
    let mut rows = Vec::new();
    for anchor in cfg.anchors() {
        let chain = build_chain_rt(anchor);
        for node in 0..corr_are::reduction::NODE_COUNT {
            let (f, g, r) = node_patterns(&chain, node, cfg.grid)?;
            rows.push(ReduceRow {
                pair: Pair::RT.label(),
                anchor: anchor.value() as u8,
                node,
                f_pattern: f.symbols.clone(),
                f_breaks: join_breaks(&f),
                g_pattern: g.symbols.clone(),
                g_breaks: join_breaks(&g),
                r_pattern: r.symbols.clone(),
                r_turns: join_breaks(&r),
                min_abs_f: f.min_abs,
                min_abs_g: g.min_abs,
                min_abs_dr: r.min_abs,
                rho_tilde_at_0: chain.rho_tilde(node, 0.0).ok(),
            });
        }
    }
    Ok(rows)
}
