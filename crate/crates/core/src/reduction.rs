//! Derivative chain for the R,T efficiency and numeric sign classification.
//!
//! With `f, g` the R,T numerator and denominator and `b, c` the value and
//! slope of the efficiency at the anchor `a`, the chain starts from
//!
//! ```text
//! f0 = f − b·g − c·(x − a)·g,    g0 = (x − a)²·g,    r0 = f0/g0 = q_a
//! ```
//!
//! and continues with `f_i = a_i·f'_{i−1}`, `g_i = a_i·g'_{i−1}` for the
//! positive multipliers
//!
//! ```text
//! a1 = √(4 − x²)
//! a2 = √(4 − x²)/(2 − x²)
//! a3 = (2 − x²)²/(50 − 29x² + 9x⁴)
//! a4 = (50 − 29x² + 9x⁴)²/(2 − x²)
//! ```
//!
//! All derivatives come from Taylor jets, so node `i` evaluated from an
//! order-K seed carries order K − i.

use rayon::prelude::*;

use crate::are_bounds::{endpoint_constants, Anchor, Pair};
use crate::corrmath::arcsin_defect;
use crate::error::{domain, Error, Result};
use crate::jet::{Jet, Real};
use crate::roots::bisect;

/// Seed order for chain evaluation; node 4 keeps two coefficients beyond
/// its value.
pub const JET_ORDER: usize = 6;
pub const NODE_COUNT: usize = 5;
/// Grid values smaller than this are not assigned a sign.
pub const SIGN_FLOOR: f64 = 1e-12;
/// Bracket width for refined sign changes.
pub const BREAK_TOL: f64 = 1e-10;

/// `a_i(x)` for i = 1..=4.
pub fn multiplier<T: Real>(i: usize, x: &T) -> T {
    let x2 = x.square();
    let two_minus = x2.rsub(2.0);
    let quartic = x2.square() * 9.0 - x2.clone() * 29.0 + 50.0;
    match i {
        1 => x2.rsub(4.0).sqrt(),
        2 => x2.rsub(4.0).sqrt() / two_minus,
        3 => two_minus.square() / quartic,
        4 => quartic.square() / two_minus,
        _ => panic!("chain multipliers are indexed 1..=4, got {i}"),
    }
}

/// Value of one chain node at a point, as jets in the offset from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainNode {
    pub index: usize,
    pub f: Jet,
    pub g: Jet,
}

impl ChainNode {
    pub fn f_value(&self) -> f64 {
        self.f.value()
    }

    pub fn g_value(&self) -> f64 {
        self.g.value()
    }

    pub fn r_value(&self) -> f64 {
        self.f.value() / self.g.value()
    }

    /// Jet of `r_i = f_i/g_i`.
    pub fn ratio(&self) -> Jet {
        self.f.clone() / self.g.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtChain {
    pub anchor: Anchor,
    pub b: f64,
    pub c: f64,
}

/// The chain for the R,T pair at anchor `a`, using the endpoint value and
/// slope of the efficiency there.
pub fn build_chain_rt(anchor: Anchor) -> RtChain {
    let k = endpoint_constants(Pair::RT);
    let (b, c) = match anchor {
        Anchor::Zero => (k.are_at_0, 0.0),
        Anchor::One => (k.are_at_1, k.dare_at_1),
    };
    RtChain { anchor, b, c }
}

impl RtChain {
    /// Nodes 0..=4 at `x0 ∈ [0, 1]` from a seed of order `order ≥ 4`.
    pub fn nodes_with_order(&self, x0: f64, order: usize) -> Vec<ChainNode> {
        assert!(order + 1 >= NODE_COUNT, "seed order too low for the chain");
        let x = Jet::variable(x0, order);
        let f = arcsin_defect(&x);
        let g = x.rsub(1.0) * (x.clone() + 1.0) * 9.0;
        let t = x.clone() - self.anchor.value();
        let f0 = f - g.clone() * self.b - t.clone() * g.clone() * self.c;
        let g0 = t.square() * g;
        let mut nodes = vec![ChainNode {
            index: 0,
            f: f0,
            g: g0,
        }];
        for i in 1..NODE_COUNT {
            let prev = &nodes[i - 1];
            let df = prev.f.differentiate();
            let dg = prev.g.differentiate();
            let a = multiplier(i, &x.truncate(df.order()));
            nodes.push(ChainNode {
                index: i,
                f: a.clone() * df,
                g: a * dg,
            });
        }
        nodes
    }

    pub fn nodes(&self, x0: f64) -> Vec<ChainNode> {
        self.nodes_with_order(x0, JET_ORDER)
    }

    pub fn node(&self, i: usize, x0: f64) -> ChainNode {
        assert!(i < NODE_COUNT, "chain nodes are indexed 0..=4, got {i}");
        self.nodes(x0).swap_remove(i)
    }

    /// Jet of `r_i` at `x0` with the given order.
    pub fn ratio_jet(&self, i: usize, x0: f64, order: usize) -> Jet {
        let seed = (order + i).max(NODE_COUNT - 1);
        self.nodes_with_order(x0, seed)
            .swap_remove(i)
            .ratio()
            .truncate(order)
    }

    /// `ρ̃_i = sign(g_i')·(r_{i+1}·g_i − f_i)`, using `r_{i+1} = f_i'/g_i'`.
    /// Its sign is the sign of `r_i'`.
    pub fn rho_tilde(&self, i: usize, x0: f64) -> Result<f64> {
        if i >= NODE_COUNT {
            return domain(format!("chain nodes are indexed 0..=4, got {i}"));
        }
        let node = self.node(i, x0);
        let (f, df) = (node.f.value(), node.f.coeff(1));
        let (g, dg) = (node.g.value(), node.g.coeff(1));
        if dg == 0.0 || !dg.is_finite() {
            return domain(format!("g_{i}' vanishes at x = {x0}"));
        }
        Ok(dg.signum() * (df / dg * g - f))
    }
}

/// Sign or monotonicity pattern over an interval.
///
/// `symbols` lists one character per maximal run (`+`/`−` for signs,
/// `↗`/`↘` for monotonicity); `breakpoints` are the refined changes between
/// runs. `min_abs` is the smallest |h| (or |h'|) seen on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub symbols: String,
    pub breakpoints: Vec<f64>,
    pub min_abs: f64,
}

pub type SignPattern = Pattern;
pub type MonotonePattern = Pattern;

fn scan<H>(h: H, lo: f64, hi: f64, grid: usize, symbols: [char; 2]) -> Result<Pattern>
where
    H: Fn(f64) -> f64 + Sync,
{
    if grid < 3 {
        return domain(format!("sign scans need at least 3 grid points, got {grid}"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return domain(format!("scan interval must satisfy lo < hi, got ({lo}, {hi})"));
    }
    let step = (hi - lo) / (grid + 1) as f64;
    let xs: Vec<f64> = (1..=grid).map(|j| lo + step * j as f64).collect();
    let values: Vec<f64> = xs.par_iter().map(|&x| h(x)).collect();

    let mut min_abs = f64::INFINITY;
    for (&x, &v) in xs.iter().zip(&values) {
        if !(v.abs() >= SIGN_FLOOR) {
            return Err(Error::Indeterminate { x, value: v.abs() });
        }
        min_abs = min_abs.min(v.abs());
    }

    let symbol = |v: f64| if v > 0.0 { symbols[0] } else { symbols[1] };
    let mut out = String::new();
    out.push(symbol(values[0]));
    let mut breakpoints = Vec::new();
    for j in 1..grid {
        if values[j].signum() != values[j - 1].signum() {
            breakpoints.push(bisect(&h, xs[j - 1], xs[j], BREAK_TOL)?);
            out.push(symbol(values[j]));
        }
    }
    Ok(Pattern {
        symbols: out,
        breakpoints,
        min_abs,
    })
}

/// Sign pattern of `h` on `grid` interior points `lo + (hi − lo)·j/(grid + 1)`.
pub fn classify_sign<H>(h: H, lo: f64, hi: f64, grid: usize) -> Result<SignPattern>
where
    H: Fn(f64) -> f64 + Sync,
{
    scan(h, lo, hi, grid, ['+', '−'])
}

/// Monotonicity pattern of `h` from the sign of its jet derivative. `h`
/// receives the identity jet of order 1 at each grid point.
pub fn classify_monotone<H>(h: H, lo: f64, hi: f64, grid: usize) -> Result<MonotonePattern>
where
    H: Fn(&Jet) -> Jet + Sync,
{
    scan(
        |x| h(&Jet::variable(x, 1)).coeff(1),
        lo,
        hi,
        grid,
        ['↗', '↘'],
    )
}
