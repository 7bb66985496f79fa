use std::f64::consts::PI;

use corr_are::are_bounds::{
    are_from_moments, are_with_tol, endpoint_constants, envelope, q, q_limits,
    quartic_bounds_rs, Anchor, Pair, Q_GUARD,
};
use corr_are::corrmath::Rho;
use corr_are::reduction::{build_chain_rt, classify_sign, NODE_COUNT};
use corr_are::stats_mc::{
    kendall_t, kendall_t_brute, sample_bivariate_normal, spearman_kernel, spearman_ustat_identity,
};
use serde::Serialize;

use crate::commands::interior_grid;
use crate::{CliResult, Record, RunConfig};

/// Coarsest grid accepted by `verify`; sign refinement needs a fine scan.
pub const VERIFY_MIN_GRID: usize = 99;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub check: String,
    pub status: &'static str,
    /// Smallest slack of the check; positive when it holds strictly.
    pub worst_margin: Option<f64>,
    pub detail: String,
    #[serde(skip)]
    pub pass: bool,
}

impl Record for VerifyRow {
    const FIELDS: &'static [&'static str] = &["check", "status", "worst_margin", "detail"];
}

type Outcome = corr_are::Result<(bool, f64)>;

fn row(check: String, outcome: Outcome) -> VerifyRow {
    let (pass, margin, detail) = match outcome {
        Ok((pass, m)) => (pass, Some(m), String::new()),
        Err(e) => (false, None, e.to_string()),
    };
    VerifyRow {
        check,
        status: if pass { "pass" } else { "fail" },
        worst_margin: margin,
        detail,
        pass,
    }
}

fn strictly_positive(margin: f64) -> (bool, f64) {
    (margin > 0.0, margin)
}

fn endpoints(pair: Pair) -> Outcome {
    let (s3, s5) = (3f64.sqrt(), 5f64.sqrt());
    let (at0, at1) = match pair {
        Pair::RT => (PI * PI / 9.0, 2.0 * PI * s3 / 9.0),
        Pair::TS => (1.0, 9.0 * s3 * (11.0 * s5 - 15.0) / (40.0 * PI)),
        Pair::RS => (PI * PI / 9.0, 3.0 * (11.0 * s5 - 15.0) / 20.0),
    };
    let e = endpoint_constants(pair);
    let err = (e.are_at_0 - at0).abs().max((e.are_at_1 - at1).abs());
    Ok(strictly_positive(1e-9 - err))
}

fn are_monotone(pair: Pair, xs: &[f64], tol: f64) -> Outcome {
    let mut prev = are_with_tol(pair, 0.0, tol)?;
    let mut margin = f64::INFINITY;
    for &x in xs {
        let v = are_with_tol(pair, x, tol)?;
        margin = margin.min(v - prev);
        prev = v;
    }
    Ok(strictly_positive(margin))
}

fn consistency(pair: Pair, xs: &[f64], tol: f64) -> Outcome {
    let mut worst = 0.0f64;
    for &x in xs {
        worst = worst.max((are_with_tol(pair, x, tol)? - are_from_moments(pair, x)?).abs());
    }
    Ok(strictly_positive(1e-10 - worst))
}

fn sandwich(pair: Pair, xs: &[f64], tol: f64) -> Outcome {
    let mut margin = f64::INFINITY;
    for &x in xs {
        let v = are_with_tol(pair, x, tol)?;
        let (l, u) = envelope(pair, x);
        margin = margin.min(v - l).min(u - v);
    }
    Ok(strictly_positive(margin))
}

fn guarded(xs: &[f64], a: Anchor) -> impl Iterator<Item = f64> + '_ {
    xs.iter().copied().filter(move |x| (x - a.value()).abs() >= Q_GUARD)
}

fn q_monotone(pair: Pair, a: Anchor, xs: &[f64]) -> Outcome {
    let mut margin = f64::INFINITY;
    let mut prev: Option<f64> = None;
    for x in guarded(xs, a) {
        let v = q(pair, a, x)?;
        if let Some(p) = prev {
            margin = margin.min(v - p);
        }
        prev = Some(v);
    }
    Ok(strictly_positive(margin))
}

fn q_range(pair: Pair, a: Anchor, xs: &[f64]) -> Outcome {
    let (lo, hi) = q_limits(pair, a);
    let mut margin = f64::INFINITY;
    for x in guarded(xs, a) {
        let v = q(pair, a, x)?;
        margin = margin.min(v - lo).min(hi - v);
    }
    Ok(strictly_positive(margin))
}

/// Richardson extrapolation of q toward its anchor along steps 2^−k·10^−2.
fn q_limit_extrapolated(pair: Pair, a: Anchor) -> corr_are::Result<f64> {
    let step = match a {
        Anchor::Zero => 2,
        Anchor::One => 1,
    };
    let mut t = (0..5)
        .map(|k| {
            let h = 1e-2 / 2f64.powi(k);
            q(pair, a, if a == Anchor::Zero { h } else { 1.0 - h })
        })
        .collect::<corr_are::Result<Vec<f64>>>()?;
    let mut pow = step;
    while t.len() > 1 {
        let f = 2f64.powi(pow);
        t = t.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
        pow += step;
    }
    Ok(t[0])
}

fn q_limit(pair: Pair, a: Anchor) -> Outcome {
    let (lo, hi) = q_limits(pair, a);
    let near = if a == Anchor::Zero { lo } else { hi };
    Ok(strictly_positive(1e-4 - (near - q_limit_extrapolated(pair, a)?).abs()))
}

fn factorization(xs: &[f64], tol: f64) -> Outcome {
    let mut worst = 0.0f64;
    for &x in xs {
        let prod = are_with_tol(Pair::RT, x, tol)? * are_with_tol(Pair::TS, x, tol)?;
        worst = worst.max((are_with_tol(Pair::RS, x, tol)? - prod).abs());
    }
    Ok(strictly_positive(1e-10 - worst))
}

fn quartic(xs: &[f64], tol: f64) -> Outcome {
    let mut margin = f64::INFINITY;
    for &x in xs {
        let v = are_with_tol(Pair::RS, x, tol)?;
        let (l, u) = envelope(Pair::RS, x);
        let (lq, uq) = quartic_bounds_rs(x)?;
        margin = margin.min(lq - l).min(v - lq).min(uq - v).min(u - uq);
    }
    Ok(strictly_positive(margin))
}

fn end_state(a: Anchor, xs: &[f64]) -> Outcome {
    let chain = build_chain_rt(a);
    let mut margin = f64::INFINITY;
    for &x in xs {
        let n4 = chain.node(4, x);
        margin = margin
            .min(-n4.f_value())
            .min(-n4.g_value())
            .min(n4.ratio().coeff(1));
    }
    Ok(strictly_positive(margin))
}

fn rho_tilde_signs(a: Anchor) -> Outcome {
    let chain = build_chain_rt(a);
    let mut agree = true;
    let mut margin = f64::INFINITY;
    for i in 0..NODE_COUNT {
        for x in interior_grid(99) {
            let rt = chain.rho_tilde(i, x)?;
            let dr = chain.ratio_jet(i, x, 1).coeff(1);
            agree &= rt.signum() == dr.signum();
            margin = margin.min(rt.abs());
        }
    }
    Ok((agree, if agree { margin } else { -margin }))
}

fn proof_trace(a: Anchor, grid: usize) -> Outcome {
    let chain = build_chain_rt(a);
    let sign = |i: usize, use_f: bool| {
        classify_sign(
            |x| {
                let n = chain.node(i, x);
                if use_f {
                    n.f_value()
                } else {
                    n.g_value()
                }
            },
            0.0,
            1.0,
            grid,
        )
    };
    let mut ok = true;
    let mut margin = f64::INFINITY;
    let mut need = |cond: bool, m: f64| {
        ok &= cond;
        margin = margin.min(m);
    };
    match a {
        Anchor::Zero => {
            for (i, at) in [(2, 0.41), (1, 0.71)] {
                let (f, g) = (sign(i, true)?, sign(i, false)?);
                need(f.symbols == "+−" && g.symbols == "+−", f.min_abs.min(g.min_abs));
                let (x_root, y_root) = (g.breakpoints[0], f.breakpoints[0]);
                need(x_root < at && at < y_root, (at - x_root).min(y_root - at));
                let n = chain.node(i, at);
                need(n.g_value() < 0.0 && n.f_value() > 0.0, (-n.g_value()).min(n.f_value()));
            }
            let g0 = sign(0, false)?;
            need(g0.symbols == "+", g0.min_abs);
        }
        Anchor::One => {
            let n3 = chain.node(3, 0.6);
            need(n3.g_value() < 0.0 && n3.f_value() > 0.0, (-n3.g_value()).min(n3.f_value()));
            let g2 = sign(2, false)?;
            need(g2.symbols == "+", g2.min_abs);
            let f2 = sign(2, true)?;
            need(f2.breakpoints.len() == 1, f2.min_abs);
            let g1 = sign(1, false)?;
            need(g1.symbols == "−", g1.min_abs);
            let g0 = sign(0, false)?;
            need(g0.symbols == "+", g0.min_abs);
            let rt = chain.rho_tilde(2, 0.0)?;
            need(rt > 0.0, rt);
        }
    }
    Ok((ok, margin))
}

fn kendall_paths() -> Outcome {
    let rho = Rho::new(0.6)?;
    let mut equal = true;
    for seed in 0..50u64 {
        let n = 2 + (seed as usize * 97) % 499;
        let s = sample_bivariate_normal(n, rho, 1000 + seed)?;
        equal &= kendall_t(&s)? == kendall_t_brute(&s)?;
    }
    Ok((equal, 0.0))
}

fn spearman_identity() -> Outcome {
    let rho = Rho::new(0.5)?;
    let mut worst = 0.0f64;
    let mut kernel_ok = true;
    for seed in 0..25u64 {
        let n = 3 + seed as usize % 23;
        let s = sample_bivariate_normal(n, rho, 2000 + seed)?;
        let (direct, ustat) = spearman_ustat_identity(&s)?;
        worst = worst.max((direct.value - ustat).abs());
        let v: Vec<(f64, f64)> = s.pairs().collect();
        let low = (n as f64 - 1.0) / (n as f64 + 1.0);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let h = spearman_kernel(n, v[i], v[j], v[k]).abs();
                    kernel_ok &= (h - 1.0).abs() < 1e-12 || (h - low).abs() < 1e-12;
                }
            }
        }
    }
    let margin = 1e-12 - worst;
    Ok((kernel_ok && margin > 0.0, margin))
}

/// Runs every invariant suite restricted to the selected pairs and anchors.
pub fn cmd_verify(cfg: &RunConfig) -> CliResult<Vec<VerifyRow>> {
    let xs = interior_grid(cfg.grid);
    let tol = cfg.tol;
    let pairs = cfg.pairs();
    let anchors = cfg.anchors();
    let mut rows = Vec::new();
    for &p in &pairs {
        rows.push(row(format!("corollary.endpoints.{p}"), endpoints(p)));
        rows.push(row(format!("are.monotone.{p}"), are_monotone(p, &xs, tol)));
        rows.push(row(format!("are.consistency.{p}"), consistency(p, &xs, tol)));
        rows.push(row(format!("bounds.sandwich.{p}"), sandwich(p, &xs, tol)));
        for &a in &anchors {
            rows.push(row(format!("theorem1.q_monotone.{p}.{a}"), q_monotone(p, a, &xs)));
            rows.push(row(format!("theorem1.q_range.{p}.{a}"), q_range(p, a, &xs)));
            rows.push(row(format!("theorem1.q_limit.{p}.{a}"), q_limit(p, a)));
        }
    }
    if pairs.len() == Pair::ALL.len() {
        rows.push(row("bounds.factorization".to_string(), factorization(&xs, tol)));
    }
    if pairs.contains(&Pair::RS) {
        rows.push(row("bounds.quartic.RS".to_string(), quartic(&xs, tol)));
    }
    if pairs.contains(&Pair::RT) {
        for &a in &anchors {
            rows.push(row(format!("reduction.end_state.RT.{a}"), end_state(a, &xs)));
            rows.push(row(format!("reduction.rho_tilde.RT.{a}"), rho_tilde_signs(a)));
            rows.push(row(format!("reduction.proof_trace.RT.{a}"), proof_trace(a, cfg.grid)));
        }
    }
    rows.push(row("stats.kendall_fast_vs_brute".to_string(), kendall_paths()));
    rows.push(row("stats.spearman_ustat".to_string(), spearman_identity()));
    Ok(rows)
}
