//! Asymptotic means and variances of Pearson's R, Spearman's S and
//! Kendall's T under a bivariate normal population with correlation ρ.
//!
//! Means are odd in ρ and variances are even; every routine evaluates at |ρ|
//! and restores the sign through these parity rules. Derivatives are
//! analytic. For σ_S² the four integral terms differentiate by the
//! fundamental theorem of calculus, so dσ_S²/dρ is an elementary function
//! (see [`dsigma2_s`]).

use std::f64::consts::{FRAC_PI_3, PI, SQRT_2};

use crate::error::{domain, Result};
use crate::jet::Real;
use crate::quadrature::{integrate, Integral};

/// Correlation coordinate with |ρ| ≤ [`Rho::MAX_ABS`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rho(f64);

impl Rho {
    pub const MAX_ABS: f64 = 1.0 - 1e-12;

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value.abs() <= Self::MAX_ABS {
            Ok(Rho(value))
        } else {
            domain(format!(
                "correlation must satisfy |rho| <= 1 - 1e-12, got {value}"
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }
}

impl TryFrom<f64> for Rho {
    type Error = crate::error::Error;
    fn try_from(v: f64) -> Result<Self> {
        Rho::new(v)
    }
}

/// Asymptotic mean and variance of a statistic, with their ρ-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mu: f64,
    pub dmu: f64,
    pub sigma2: f64,
    pub dsigma2: f64,
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `π/6 − asin(x/2)` for x ∈ [0, 1], written as a single arcsine so that it
/// keeps full relative precision as x → 1.
pub(crate) fn half_arcsin_gap<T: Real>(x: &T) -> T {
    let num = x.rsub(1.0) * (x.clone() + 1.0);
    let den = x.square().rsub(4.0).sqrt() + x.clone() * 3f64.sqrt();
    (num / den).asin()
}

/// `π² − 36·asin²(x/2)` for x ∈ [0, 1]; vanishes to first order at x = 1.
pub(crate) fn arcsin_defect<T: Real>(x: &T) -> T {
    let gap = half_arcsin_gap(x);
    gap.clone() * gap.rsub(FRAC_PI_3) * 36.0
}

pub fn moments_r(rho: Rho) -> MomentSet {
    let r = rho.value();
    let w = (1.0 - r) * (1.0 + r);
    MomentSet {
        mu: r,
        dmu: 1.0,
        sigma2: w * w,
        dsigma2: -4.0 * r * w,
    }
}

pub fn moments_t(rho: Rho) -> MomentSet {
    let r = rho.value();
    let x = r.abs();
    let w = (1.0 - r) * (1.0 + r);
    let half = (0.5 * r).asin();
    MomentSet {
        mu: 2.0 / PI * r.asin(),
        dmu: 2.0 / (PI * w.sqrt()),
        // 4/9 − (16/π²)·asin²(ρ/2)
        sigma2: 4.0 / (9.0 * PI * PI) * arcsin_defect(&x),
        dsigma2: -16.0 / (PI * PI) * half / (1.0 - 0.25 * r * r).sqrt(),
    }
}

/// The k-th integrand (k = 1..4) of the Spearman variance integrals, for
/// u ∈ [0, 1].
pub fn isin_integrand(k: usize, u: f64) -> Result<f64> {
    if !(1..=4).contains(&k) {
        return domain(format!("integrand index must be in 1..=4, got {k}"));
    }
    if !(0.0..=1.0).contains(&u) {
        return domain(format!("integrand argument must lie in [0, 1], got {u}"));
    }
    Ok(integrand(k, &u))
}

pub(crate) fn integrand<T: Real>(k: usize, u: &T) -> T {
    let u2 = u.square();
    let arg = match k {
        1 => u2.clone() * u.clone() / (u2.rsub(2.0) * 4.0),
        2 => u.clone() / (u2.rsub(3.0) * 2.0),
        3 => {
            let q = u2.square() - u2.clone() * 6.0 + 8.0;
            u.clone() * u2.rsub(4.0) / (q.sqrt() * (2.0 * SQRT_2))
        }
        4 => {
            let q = u2.square() - u2.clone() * 7.0 + 12.0;
            u.clone() * u2.rsub(4.0) / (q.sqrt() * 2.0)
        }
        _ => unreachable!("integrand index checked by callers"),
    };
    arg.asin() / u2.rsub(4.0).sqrt()
}

const INTEGRAL_WEIGHTS: [f64; 4] = [1.0, 2.0, 2.0, 4.0];

/// `I_k(x) = ∫_0^x integrand_k(u) du` for x ∈ [0, 1].
pub fn i_integral(k: usize, x: f64, abs_tol: f64) -> Result<Integral> {
    if !(1..=4).contains(&k) {
        return domain(format!("integral index must be in 1..=4, got {k}"));
    }
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("integral upper limit must lie in [0, 1], got {x}"));
    }
    integrate(|u| integrand(k, &u), 0.0, x, abs_tol)
}

/// Derivative of σ_S² at x ∈ [0, 1]:
/// −(648/π²)·asin(x/2)/√(4−x²) + (72/π²)·Σ w_k·integrand_k(x).
pub(crate) fn dsigma2_s<T: Real>(x: &T) -> T {
    let lead = (x.clone() * 0.5).asin() / x.square().rsub(4.0).sqrt() * (-648.0 / (PI * PI));
    let sum = (1..=4)
        .map(|k| integrand(k, x) * INTEGRAL_WEIGHTS[k - 1])
        .reduce(|a, b| a + b)
        .expect("four integrands");
    lead + sum * (72.0 / (PI * PI))
}

/// σ_S²(x) for x ∈ [0, 1] evaluated term by term: the arcsine term plus the
/// four quadratures.
pub fn sigma2_s_direct(x: f64, abs_tol: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("sigma2_s_direct expects x in [0, 1], got {x}"));
    }
    let tol = abs_tol / 9.0;
    let mut sum = 0.0;
    for k in 1..=4 {
        sum += INTEGRAL_WEIGHTS[k - 1] * i_integral(k, x, tol)?.value;
    }
    let half = (0.5 * x).asin();
    Ok(1.0 - 324.0 / (PI * PI) * half * half + 72.0 / (PI * PI) * sum)
}

/// σ_S²(x) = −∫_x^1 (dσ_S²/du) du, using σ_S²(1) = 0. Near x = 1 both the
/// integrand and the result vanish, so this keeps relative precision where
/// the term-by-term form cancels catastrophically.
pub fn sigma2_s_tail(x: f64, abs_tol: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("sigma2_s_tail expects x in [0, 1], got {x}"));
    }
    Ok(-integrate(|u| dsigma2_s(&u), x, 1.0, abs_tol)?.value)
}

/// Switch point between the direct and tail evaluations of σ_S².
const TAIL_FROM: f64 = 0.5;

/// σ_S²(x) for x ∈ [0, 1].
pub(crate) fn sigma2_s_unit(x: f64, abs_tol: f64) -> Result<f64> {
    if x > TAIL_FROM {
        sigma2_s_tail(x, abs_tol)
    } else {
        sigma2_s_direct(x, abs_tol)
    }
}

pub fn moments_s(rho: Rho, abs_tol: f64) -> Result<MomentSet> {
    if !(abs_tol > 0.0) {
        return domain(format!("abs_tol must be positive, got {abs_tol}"));
    }
    let r = rho.value();
    let x = r.abs();
    Ok(MomentSet {
        mu: 6.0 / PI * (0.5 * r).asin(),
        dmu: 6.0 / (PI * (4.0 - r * r).sqrt()),
        sigma2: sigma2_s_unit(x, abs_tol)?,
        dsigma2: sign(r) * dsigma2_s(&x),
    })
}

/// Exact finite-sample mean of S:
/// ((n−2)/(n+1))·(6/π)·asin(ρ/2) + 3·μ_T(ρ)/(n+1).
pub fn mu_s_finite_n(rho: Rho, n: usize) -> Result<f64> {
    if n < 2 {
        return domain(format!("sample size must be at least 2, got {n}"));
    }
    let r = rho.value();
    let n = n as f64;
    let mu_s = 6.0 / PI * (0.5 * r).asin();
    let mu_t = 2.0 / PI * r.asin();
    Ok((n - 2.0) / (n + 1.0) * mu_s + 3.0 * mu_t / (n + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn rho(v: f64) -> Rho {
        Rho::new(v).unwrap()
    }

    #[test]
    fn rho_rejects_endpoints() {
        assert!(Rho::new(1.0).is_err());
        assert!(Rho::new(-1.0).is_err());
        assert!(Rho::new(f64::NAN).is_err());
        assert!(Rho::new(1.0 - 1e-12).is_ok());
    }

    #[test]
    fn pearson_moments() {
        let m = moments_r(rho(0.0));
        assert_eq!((m.mu, m.sigma2), (0.0, 1.0));
        assert_abs_diff_eq!(moments_r(rho(0.5)).sigma2, 0.5625, epsilon = 1e-15);
        assert_eq!(moments_r(rho(-0.5)).sigma2, moments_r(rho(0.5)).sigma2);
    }

    #[test]
    fn kendall_moments() {
        assert_abs_diff_eq!(moments_t(rho(0.5)).mu, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(moments_t(rho(0.0)).sigma2, 4.0 / 9.0, epsilon = 1e-15);
        assert!(moments_t(rho(Rho::MAX_ABS)).sigma2.abs() < 1e-10);
        // agrees with the textbook form away from 1
        let r: f64 = 0.7;
        let textbook = 4.0 / 9.0 - 16.0 / (PI * PI) * (0.5 * r).asin().powi(2);
        assert_relative_eq!(moments_t(rho(r)).sigma2, textbook, max_relative = 1e-13);
    }

    #[test]
    fn integrand_endpoint_values() {
        for k in 1..=4 {
            assert_eq!(isin_integrand(k, 0.0).unwrap(), 0.0);
        }
        let expected = 0.25f64.asin() / 3f64.sqrt();
        assert_relative_eq!(isin_integrand(1, 1.0).unwrap(), expected, max_relative = 1e-15);
        assert_relative_eq!(isin_integrand(2, 1.0).unwrap(), expected, max_relative = 1e-15);
        assert!(isin_integrand(1, 1.5).is_err());
        assert!(isin_integrand(5, 0.5).is_err());
    }

    #[test]
    fn spearman_at_zero() {
        let m = moments_s(rho(0.0), 1e-12).unwrap();
        assert_eq!(m.mu, 0.0);
        assert_abs_diff_eq!(m.sigma2, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn spearman_routes_agree_on_overlap() {
        for &x in &[0.2, 0.5, 0.7, 0.9, 0.99] {
            let a = sigma2_s_direct(x, 1e-13).unwrap();
            let b = sigma2_s_tail(x, 1e-13).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn spearman_variance_vanishes_at_one() {
        assert_abs_diff_eq!(sigma2_s_direct(1.0, 1e-13).unwrap(), 0.0, epsilon = 1e-12);
        let near = moments_s(rho(1.0 - 1e-4), 1e-12).unwrap();
        assert!(near.sigma2 > 0.0 && near.sigma2 < 1e-2);
    }

    #[test]
    fn finite_n_mean() {
        assert_eq!(mu_s_finite_n(rho(0.0), 7).unwrap(), 0.0);
        let expected = 8.0 / 11.0 * 6.0 / PI * 0.25f64.asin() + 3.0 / 11.0 / 3.0;
        assert_relative_eq!(mu_s_finite_n(rho(0.5), 10).unwrap(), expected, max_relative = 1e-14);
        let far = mu_s_finite_n(rho(0.5), 100_000_000).unwrap();
        assert_abs_diff_eq!(far, moments_s(rho(0.5), 1e-12).unwrap().mu, epsilon = 1e-7);
        assert!(mu_s_finite_n(rho(0.5), 1).is_err());
    }
}
