use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use corr_are::corrmath::{
    i_integral, moments_r, moments_s, moments_t, sigma2_s_direct, sigma2_s_tail, Rho,
};
use corr_are::quadrature::integrate;
use proptest::prelude::*;

// Integrands transcribed independently of the library.
fn oracle_integrand(k: usize, u: f64) -> f64 {
    let w = (4.0 - u * u).sqrt();
    let arg = match k {
        1 => u.powi(3) / (4.0 * (2.0 - u * u)),
        2 => u / (2.0 * (3.0 - u * u)),
        3 => u * (4.0 - u * u) / (2.0 * 2f64.sqrt() * (8.0 - 6.0 * u * u + u.powi(4)).sqrt()),
        4 => u * (4.0 - u * u) / (2.0 * (12.0 - 7.0 * u * u + u.powi(4)).sqrt()),
        _ => unreachable!(),
    };
    arg.min(1.0).asin() / w
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Composite Simpson with 2^20 panels, one Richardson step against 2^19.
fn simpson_richardson(k: usize, x: f64) -> f64 {
    let fine = simpson(|u| oracle_integrand(k, u), 0.0, x, 1 << 20);
    let coarse = simpson(|u| oracle_integrand(k, u), 0.0, x, 1 << 19);
    fine + (fine - coarse) / 15.0
}

#[test]
fn integrals_match_simpson_oracle() {
    for k in 1..=4 {
        for &x in &[0.3, 0.8, 1.0] {
            let q = i_integral(k, x, 1e-13).unwrap().value;
            assert_abs_diff_eq!(q, simpson_richardson(k, x), epsilon = 1e-12);
        }
    }
}

#[test]
fn spearman_variance_from_oracle_integrals() {
    for &x in &[0.25, 0.5, 0.9] {
        let sum: f64 = [1.0, 2.0, 2.0, 4.0]
            .iter()
            .enumerate()
            .map(|(i, w)| w * simpson_richardson(i + 1, x))
            .sum();
        let oracle = 1.0 - 324.0 / (PI * PI) * (x / 2.0).asin().powi(2) + 72.0 / (PI * PI) * sum;
        assert_abs_diff_eq!(sigma2_s_direct(x, 1e-13).unwrap(), oracle, epsilon = 1e-11);
        assert_abs_diff_eq!(sigma2_s_tail(x, 1e-13).unwrap(), oracle, epsilon = 1e-11);
    }
}

#[test]
fn quadrature_matches_closed_form_antiderivative() {
    // ∫_0^1 asin(u/2)/√(4 − u²) du = asin(1/2)²/2
    let r = integrate(|u: f64| (u / 2.0).asin() / (4.0 - u * u).sqrt(), 0.0, 1.0, 1e-13).unwrap();
    assert_abs_diff_eq!(r.value, (PI / 6.0).powi(2) / 2.0, epsilon = 1e-14);
}

fn central_difference(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let h = 1e-3;
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    for &x in &[-0.7, -0.2, 0.1, 0.45, 0.8] {
        let rho = |v: f64| Rho::new(v).unwrap();
        let ms = moments_s(rho(x), 1e-13).unwrap();
        let dvar = central_difference(|v| moments_s(rho(v), 1e-13).unwrap().sigma2, x);
        assert_abs_diff_eq!(ms.dsigma2, dvar, epsilon = 1e-8);
        let dmu = central_difference(|v| moments_s(rho(v), 1e-13).unwrap().mu, x);
        assert_abs_diff_eq!(ms.dmu, dmu, epsilon = 1e-9);

        let mt = moments_t(rho(x));
        assert_abs_diff_eq!(mt.dmu, central_difference(|v| moments_t(rho(v)).mu, x), epsilon = 1e-9);
        assert_abs_diff_eq!(
            mt.dsigma2,
            central_difference(|v| moments_t(rho(v)).sigma2, x),
            epsilon = 1e-9
        );
        let mr = moments_r(rho(x));
        assert_abs_diff_eq!(
            mr.dsigma2,
            central_difference(|v| moments_r(rho(v)).sigma2, x),
            epsilon = 1e-9
        );
    }
}

proptest! {
    #[test]
    fn means_odd_variances_even(x in -0.999f64..0.999) {
        let p = Rho::new(x).unwrap();
        let m = Rho::new(-x).unwrap();
        let (r1, r2) = (moments_r(p), moments_r(m));
        let (t1, t2) = (moments_t(p), moments_t(m));
        let (s1, s2) = (moments_s(p, 1e-12).unwrap(), moments_s(m, 1e-12).unwrap());
        for (a, b) in [(r1, r2), (t1, t2), (s1, s2)] {
            prop_assert_eq!(a.mu, -b.mu);
            prop_assert_eq!(a.sigma2, b.sigma2);
            prop_assert_eq!(a.dmu, b.dmu);
            prop_assert_eq!(a.dsigma2, -b.dsigma2);
            prop_assert!(a.sigma2 > 0.0);
        }
    }
}
