//! Pairwise asymptotic relative efficiencies and their quadratic bounds.
//!
//! Each efficiency is handled in the factored form `are = f / g` with
//!
//! | pair | f                         | g                                        |
//! |------|---------------------------|------------------------------------------|
//! | R,T  | π² − 36·asin²(x/2)        | 9(1 − x²)                                |
//! | T,S  | σ_S²(x)                   | 4(1 − x²)(π² − 36·asin²(x/2)) / (π²(4 − x²)) |
//! | R,S  | σ_S²(x)                   | 36(1 − x²)² / (π²(4 − x²))               |
//!
//! f and g are analytic on a neighbourhood of [0, 1]. At x = 1 both vanish
//! (to first order for R,T and to second order for the pairs involving S),
//! so the expansion of `are` about either anchor is obtained exactly by
//! dividing Taylor jets of f and g after removing the common zero. The
//! endpoint values `are(a)`, `are'(a)` and the one-sided limits of `q_a` are
//! read off those expansions.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use std::f64::consts::PI;

use crate::corrmath::{self, arcsin_defect, dsigma2_s, sigma2_s_unit, Rho};
use crate::error::{domain, Error, Result};
use crate::jet::{Jet, Real};
use crate::quadrature::DEFAULT_ABS_TOL;
use crate::roots::bisect;

/// Half-width of the window around an anchor where `q` returns its
/// one-sided limit instead of the cancelling difference quotient.
pub const Q_GUARD: f64 = 1e-4;

/// Search window and tolerance for crossover roots.
const CROSSOVER_EDGE: f64 = 1e-6;
const CROSSOVER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pair {
    RT,
    TS,
    RS,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::RT, Pair::TS, Pair::RS];

    pub fn label(self) -> &'static str {
        match self {
            Pair::RT => "RT",
            Pair::TS => "TS",
            Pair::RS => "RS",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Order of the common zero of f and g at x = 1.
    fn zero_order_at_one(self) -> usize {
        match self {
            Pair::RT => 1,
            Pair::TS | Pair::RS => 2,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Pair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RT" => Ok(Pair::RT),
            "TS" => Ok(Pair::TS),
            "RS" => Ok(Pair::RS),
            _ => domain(format!("unknown pair '{s}', expected RT, TS or RS")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anchor {
    Zero,
    One,
}

impl Anchor {
    pub const BOTH: [Anchor; 2] = [Anchor::Zero, Anchor::One];

    pub fn value(self) -> f64 {
        match self {
            Anchor::Zero => 0.0,
            Anchor::One => 1.0,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Anchor::Zero => "0",
            Anchor::One => "1",
        })
    }
}

fn check_open_unit(x: f64) -> Result<f64> {
    if x.is_finite() && x.abs() < 1.0 {
        Ok(x.abs())
    } else {
        domain(format!("efficiency argument must satisfy |x| < 1, got {x}"))
    }
}

fn g_of<T: Real>(pair: Pair, x: &T) -> T {
    let one_minus_sq = x.rsub(1.0) * (x.clone() + 1.0);
    match pair {
        Pair::RT => one_minus_sq * 9.0,
        Pair::TS => {
            one_minus_sq * arcsin_defect(x) * 4.0 / (x.square().rsub(4.0) * (PI * PI))
        }
        Pair::RS => one_minus_sq.square() * 36.0 / (x.square().rsub(4.0) * (PI * PI)),
    }
}

fn f_value(pair: Pair, x: f64, abs_tol: f64) -> Result<f64> {
    match pair {
        Pair::RT => Ok(arcsin_defect(&x)),
        Pair::TS | Pair::RS => sigma2_s_unit(x, abs_tol),
    }
}

/// Jet of the numerator f at `x0` ∈ [0, 1].
pub fn f_jet(pair: Pair, x0: f64, order: usize) -> Result<Jet> {
    match pair {
        Pair::RT => Ok(arcsin_defect(&Jet::variable(x0, order))),
        Pair::TS | Pair::RS => {
            let value = sigma2_s_unit(x0, DEFAULT_ABS_TOL)?;
            if order == 0 {
                return Ok(Jet::constant(value, 0));
            }
            Ok(dsigma2_s(&Jet::variable(x0, order - 1)).integrate(value))
        }
    }
}

/// Jet of the denominator g at `x0` ∈ [0, 1].
pub fn g_jet(pair: Pair, x0: f64, order: usize) -> Jet {
    g_of(pair, &Jet::variable(x0, order))
}

/// Efficiency of the pair's first statistic relative to its second, as f/g
/// at |x|. `x = 0` returns the limiting constant.
pub fn are(pair: Pair, x: f64) -> Result<f64> {
    are_with_tol(pair, x, DEFAULT_ABS_TOL)
}

/// [`are`] with an explicit absolute tolerance for the σ_S² quadrature.
pub fn are_with_tol(pair: Pair, x: f64, abs_tol: f64) -> Result<f64> {
    let x = check_open_unit(x)?;
    if !(abs_tol > 0.0) {
        return domain(format!("abs_tol must be positive, got {abs_tol}"));
    }
    Ok(f_value(pair, x, abs_tol)? / g_of(pair, &x))
}

/// The same efficiency assembled from the asymptotic moments:
/// σ²₂/σ²₁ · (μ₁'/μ₂')².
pub fn are_from_moments(pair: Pair, x: f64) -> Result<f64> {
    let rho = Rho::new(check_open_unit(x)?)?;
    let r = corrmath::moments_r(rho);
    let t = corrmath::moments_t(rho);
    let (first, second) = match pair {
        Pair::RT => (r, t),
        Pair::TS => (t, corrmath::moments_s(rho, DEFAULT_ABS_TOL)?),
        Pair::RS => (r, corrmath::moments_s(rho, DEFAULT_ABS_TOL)?),
    };
    let slope = first.dmu / second.dmu;
    Ok(second.sigma2 / first.sigma2 * slope * slope)
}

/// d(are)/dx by the quotient rule on the f/g jets; odd in x.
pub fn dare(pair: Pair, x: f64) -> Result<f64> {
    let ax = check_open_unit(x)?;
    let r = f_jet(pair, ax, 1)? / g_jet(pair, ax, 1);
    Ok(if x < 0.0 { -r.coeff(1) } else { r.coeff(1) })
}

/// Taylor coefficients of `are` about the anchor, up to `order`. About 1
/// this is the one-sided expansion in powers of (x − 1).
pub fn endpoint_series(pair: Pair, anchor: Anchor, order: usize) -> Result<Vec<f64>> {
    let ratio = match anchor {
        Anchor::Zero => f_jet(pair, 0.0, order)? / g_jet(pair, 0.0, order),
        Anchor::One => {
            let m = pair.zero_order_at_one();
            let f = f_jet(pair, 1.0, order + m)?;
            let g = g_jet(pair, 1.0, order + m);
            f.shift_down(m) / g.shift_down(m)
        }
    };
    Ok(ratio.coeffs().to_vec())
}

/// Leading Taylor coefficients of f and g at x = 1 that vanish analytically.
/// Exposed so the zero structure can be checked.
pub fn vanishing_coefficients_at_one(pair: Pair) -> Result<Vec<(f64, f64)>> {
    let m = pair.zero_order_at_one();
    let f = f_jet(pair, 1.0, m)?;
    let g = g_jet(pair, 1.0, m);
    Ok((0..m).map(|k| (f.coeff(k), g.coeff(k))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PairConstants {
    b: [f64; 2],
    c: [f64; 2],
    /// q_a(0+) per anchor.
    q_low: [f64; 2],
    /// q_a(1−) per anchor.
    q_high: [f64; 2],
}

fn compute_constants(pair: Pair) -> PairConstants {
    let at0 = endpoint_series(pair, Anchor::Zero, 2).expect("expansion at 0 is finite");
    let at1 = endpoint_series(pair, Anchor::One, 2).expect("expansion at 1 is finite");
    let (b0, q00) = (at0[0], at0[2]);
    let (b1, c1, q11) = (at1[0], at1[1], at1[2]);
    PairConstants {
        b: [b0, b1],
        // even function
        c: [0.0, c1],
        q_low: [q00, b0 - b1 + c1],
        q_high: [b1 - b0, q11],
    }
}

fn constants(pair: Pair) -> &'static PairConstants {
    static CONSTANTS: OnceLock<[PairConstants; 3]> = OnceLock::new();
    &CONSTANTS.get_or_init(|| Pair::ALL.map(compute_constants))[pair.index()]
}

/// are(0), are(1−) and are'(1−) for a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointConstants {
    pub are_at_0: f64,
    pub are_at_1: f64,
    pub dare_at_1: f64,
}

pub fn endpoint_constants(pair: Pair) -> EndpointConstants {
    let k = constants(pair);
    EndpointConstants {
        are_at_0: k.b[0],
        are_at_1: k.b[1],
        dare_at_1: k.c[1],
    }
}

/// One-sided limits `(q_a(0+), q_a(1−))`.
pub fn q_limits(pair: Pair, anchor: Anchor) -> (f64, f64) {
    let k = constants(pair);
    (k.q_low[anchor.index()], k.q_high[anchor.index()])
}

/// `q_a(x) = (are(x) − are(a) − are'(a)(x − a)) / (x − a)²` for x ∈ (0, 1).
/// Within [`Q_GUARD`] of the anchor the one-sided limit is returned.
pub fn q(pair: Pair, anchor: Anchor, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("q is defined on (0, 1), got {x}"));
    }
    let a = anchor.value();
    let k = constants(pair);
    let i = anchor.index();
    if (x - a).abs() < Q_GUARD {
        return Ok(match anchor {
            Anchor::Zero => k.q_low[i],
            Anchor::One => k.q_high[i],
        });
    }
    let t = x - a;
    Ok((are(pair, x)? - k.b[i] - k.c[i] * t) / (t * t))
}

/// `q_a` on the closed interval, with the one-sided limits at 0 and 1.
pub fn q_closed(pair: Pair, anchor: Anchor, x: f64) -> Result<f64> {
    let (low, high) = q_limits(pair, anchor);
    if x == 0.0 {
        Ok(low)
    } else if x == 1.0 {
        Ok(high)
    } else {
        q(pair, anchor, x)
    }
}

/// `b + c(|x| − a) + q(|x| − a)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCoeffs {
    pub anchor: Anchor,
    pub b: f64,
    pub c: f64,
    pub q: f64,
}

impl QuadCoeffs {
    pub fn eval(&self, x: f64) -> f64 {
        let t = x.abs() - self.anchor.value();
        self.b + t * (self.c + t * self.q)
    }

    /// Coefficients of `1, |x|, x²` after expanding around 0.
    pub fn expanded(&self) -> [f64; 3] {
        let a = self.anchor.value();
        [
            self.b - self.c * a + self.q * a * a,
            self.c - 2.0 * self.q * a,
            self.q,
        ]
    }
}

/// Quadratic bounds `(L_a, U_a)` anchored at `a`, using `q_a(0+)` and `q_a(1−)`.
pub fn quad_bounds(pair: Pair, anchor: Anchor) -> (QuadCoeffs, QuadCoeffs) {
    let k = constants(pair);
    let i = anchor.index();
    let make = |q| QuadCoeffs {
        anchor,
        b: k.b[i],
        c: k.c[i],
        q,
    };
    (make(k.q_low[i]), make(k.q_high[i]))
}

/// `L(x) = max_a L_a(x)` and `U(x) = min_a U_a(x)`.
pub fn envelope(pair: Pair, x: f64) -> (f64, f64) {
    let (l0, u0) = quad_bounds(pair, Anchor::Zero);
    let (l1, u1) = quad_bounds(pair, Anchor::One);
    (l0.eval(x).max(l1.eval(x)), u0.eval(x).min(u1.eval(x)))
}

/// Piecewise quadratic bounds for one anchor over a partition of [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseQuad {
    pub anchor: Anchor,
    pub breaks: Vec<f64>,
    /// `(lower, upper)` per cell `(breaks[i], breaks[i + 1]]`.
    pub cells: Vec<(QuadCoeffs, QuadCoeffs)>,
}

impl PiecewiseQuad {
    pub fn cell_of(&self, x: f64) -> usize {
        let ax = x.abs();
        let idx = self.breaks.partition_point(|&b| b < ax);
        idx.saturating_sub(1).min(self.cells.len() - 1)
    }

    pub fn lower(&self, x: f64) -> f64 {
        self.cells[self.cell_of(x)].0.eval(x)
    }

    pub fn upper(&self, x: f64) -> f64 {
        self.cells[self.cell_of(x)].1.eval(x)
    }
}

fn check_partition(partition: &[f64]) -> Result<()> {
    let bad = |m: &str| Err(Error::BadPartition(m.to_string()));
    if partition.len() < 2 {
        return bad("need at least the two endpoints 0 and 1");
    }
    if partition[0] != 0.0 || partition[partition.len() - 1] != 1.0 {
        return bad("partition must start at 0 and end at 1");
    }
    if partition.windows(2).any(|w| !(w[0] < w[1])) {
        return bad("partition must be strictly increasing");
    }
    Ok(())
}

/// Piecewise bounds from `q_a(x_{i−1}+) < q_a(x) < q_a(x_i−)` on each cell.
pub fn partition_bounds(pair: Pair, anchor: Anchor, partition: &[f64]) -> Result<PiecewiseQuad> {
    check_partition(partition)?;
    let k = constants(pair);
    let i = anchor.index();
    let qs = partition
        .iter()
        .map(|&x| q_closed(pair, anchor, x))
        .collect::<Result<Vec<_>>>()?;
    let make = |q| QuadCoeffs {
        anchor,
        b: k.b[i],
        c: k.c[i],
        q,
    };
    let cells = qs.windows(2).map(|w| (make(w[0]), make(w[1]))).collect();
    Ok(PiecewiseQuad {
        anchor,
        breaks: partition.to_vec(),
        cells,
    })
}

/// Both anchors' piecewise bounds on a common partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionEnvelope {
    pub by_anchor: [PiecewiseQuad; 2],
}

impl PartitionEnvelope {
    pub fn new(pair: Pair, partition: &[f64]) -> Result<Self> {
        Ok(PartitionEnvelope {
            by_anchor: [
                partition_bounds(pair, Anchor::Zero, partition)?,
                partition_bounds(pair, Anchor::One, partition)?,
            ],
        })
    }

    pub fn lower(&self, x: f64) -> f64 {
        self.by_anchor[0].lower(x).max(self.by_anchor[1].lower(x))
    }

    pub fn upper(&self, x: f64) -> f64 {
        self.by_anchor[0].upper(x).min(self.by_anchor[1].upper(x))
    }
}

/// Quartic bounds on are_RS from the products of the R,T and T,S quadratic
/// bounds: `(max_a L_RT;a·L_TS;a, min_a U_RT;a·U_TS;a)`.
pub fn quartic_bounds_rs(x: f64) -> Result<(f64, f64)> {
    check_open_unit(x)?;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for anchor in Anchor::BOTH {
        let (l_rt, u_rt) = quad_bounds(Pair::RT, anchor);
        let (l_ts, u_ts) = quad_bounds(Pair::TS, anchor);
        lower = lower.max(l_rt.eval(x) * l_ts.eval(x));
        upper = upper.min(u_rt.eval(x) * u_ts.eval(x));
    }
    Ok((lower, upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "L",
            Side::Upper => "U",
        })
    }
}

/// Root in (0, 1) of `L_0 − L_1` (or `U_0 − U_1`).
pub fn crossover(pair: Pair, side: Side) -> Result<f64> {
    let (l0, u0) = quad_bounds(pair, Anchor::Zero);
    let (l1, u1) = quad_bounds(pair, Anchor::One);
    let (p0, p1) = match side {
        Side::Lower => (l0, l1),
        Side::Upper => (u0, u1),
    };
    bisect(
        |x| p0.eval(x) - p1.eval(x),
        CROSSOVER_EDGE,
        1.0 - CROSSOVER_EDGE,
        CROSSOVER_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn values_at_zero() {
        assert_relative_eq!(are(Pair::RT, 0.0).unwrap(), PI * PI / 9.0, max_relative = 1e-15);
        assert_relative_eq!(are(Pair::TS, 0.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn rt_at_half_matches_closed_form() {
        let expected = (PI * PI - 36.0 * 0.25f64.asin().powi(2)) / 6.75;
        assert_relative_eq!(are(Pair::RT, 0.5).unwrap(), expected, max_relative = 1e-14);
        assert_eq!(are(Pair::RT, -0.5).unwrap(), are(Pair::RT, 0.5).unwrap());
    }

    #[test]
    fn domain_is_open() {
        for p in Pair::ALL {
            assert!(are(p, 1.0).is_err());
            assert!(dare(p, -1.0).is_err());
        }
        assert!(q(Pair::RT, Anchor::Zero, 0.0).is_err());
        assert!(q(Pair::RT, Anchor::Zero, 1.0).is_err());
        assert!(quartic_bounds_rs(1.0).is_err());
    }

    #[test]
    fn zero_coefficient_of_one_sided_expansion_matches_derivative_formula() {
        // c = (f''g' − f'g'')/(2g'²) at 1 for R,T
        let f = f_jet(Pair::RT, 1.0, 3).unwrap();
        let g = g_jet(Pair::RT, 1.0, 3);
        let c = (f.derivative(2) * g.derivative(1) - f.derivative(1) * g.derivative(2))
            / (2.0 * g.derivative(1).powi(2));
        assert_relative_eq!(endpoint_constants(Pair::RT).dare_at_1, c, max_relative = 1e-13);
        let closed = 2.0 / 3.0 - 2.0 * PI * 3f64.sqrt() / 27.0;
        assert_relative_eq!(c, closed, max_relative = 1e-13);
    }

    #[test]
    fn vanishing_coefficients_vanish() {
        for p in Pair::ALL {
            for (f, g) in vanishing_coefficients_at_one(p).unwrap() {
                assert!(f.abs() < 1e-12, "{p}: f coefficient {f}");
                assert!(g.abs() < 1e-12, "{p}: g coefficient {g}");
            }
        }
    }

    #[test]
    fn anchor_zero_has_zero_slope() {
        for p in Pair::ALL {
            let s = endpoint_series(p, Anchor::Zero, 3).unwrap();
            assert!(s[1].abs() < 1e-15 && s[3].abs() < 1e-13, "{p}: {s:?}");
        }
    }

    #[test]
    fn q_guard_returns_limits() {
        let (low, high) = q_limits(Pair::TS, Anchor::One);
        assert_eq!(q(Pair::TS, Anchor::One, 1.0 - 0.5 * Q_GUARD).unwrap(), high);
        assert_eq!(q_closed(Pair::TS, Anchor::One, 0.0).unwrap(), low);
    }

    #[test]
    fn expanded_coefficients_reassemble() {
        let (l1, _) = quad_bounds(Pair::RS, Anchor::One);
        let [k0, k1, k2] = l1.expanded();
        for &x in &[0.1, 0.4, -0.8] {
            let ax: f64 = f64::abs(x);
            assert_abs_diff_eq!(l1.eval(x), k0 + k1 * ax + k2 * ax * ax, epsilon = 1e-14);
        }
    }

    #[test]
    fn trivial_partition_is_plain_bounds() {
        for p in Pair::ALL {
            for a in Anchor::BOTH {
                let pw = partition_bounds(p, a, &[0.0, 1.0]).unwrap();
                assert_eq!(pw.cells, vec![quad_bounds(p, a)]);
            }
        }
    }

    #[test]
    fn bad_partitions() {
        for bad in [&[0.0][..], &[0.1, 1.0], &[0.0, 0.5, 0.5, 1.0], &[0.0, 0.9]] {
            assert!(matches!(
                partition_bounds(Pair::RT, Anchor::Zero, bad),
                Err(Error::BadPartition(_))
            ));
        }
    }

    #[test]
    fn quartic_bounds_near_zero_and_symmetry() {
        let (lo, up) = quartic_bounds_rs(1e-6).unwrap();
        assert_abs_diff_eq!(lo, PI * PI / 9.0, epsilon = 1e-10);
        assert_abs_diff_eq!(up, PI * PI / 9.0, epsilon = 1e-10);
        assert_eq!(quartic_bounds_rs(-0.5).unwrap(), quartic_bounds_rs(0.5).unwrap());
    }
}
