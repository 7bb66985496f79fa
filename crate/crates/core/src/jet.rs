//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] holds the normalized Taylor coefficients `c_k = h^(k)(x0) / k!`
//! of a scalar function around a point, truncated at a fixed order. Every
//! operation propagates the coefficients exactly (up to rounding), so the
//! k-th derivative of any composition of the supported primitives comes out
//! as `k! * c_k` without finite differences or symbolic algebra.
//!
//! The [`Real`] trait lets formulas be written once and evaluated either on
//! plain `f64` or on jets.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar-like values closed under the operations needed by the moment and
/// efficiency formulas.
pub trait Real:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn sqrt(&self) -> Self;
    fn asin(&self) -> Self;
    /// Order-0 value.
    fn value(&self) -> f64;

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// `c - self`.
    fn rsub(&self, c: f64) -> Self {
        -self.clone() + c
    }
}

/// Inverse sine that tolerates last-bit overshoot past ±1.
pub(crate) fn asin_clamped(u: f64) -> f64 {
    const SLACK: f64 = 1e-15;
    if u > 1.0 && u <= 1.0 + SLACK {
        std::f64::consts::FRAC_PI_2
    } else if (-1.0 - SLACK..-1.0).contains(&u) {
        -std::f64::consts::FRAC_PI_2
    } else {
        u.asin()
    }
}

impl Real for f64 {
    #[inline]
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    #[inline]
    fn asin(&self) -> Self {
        asin_clamped(*self)
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    /// Jet of the constant `value`.
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// Jet of the identity function seeded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Jet::constant(x0, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    /// # Panics
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Normalized Taylor coefficient `c_k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeff(k) * fact
    }

    /// Jet of the derivative; the order drops by one. The derivative of an
    /// order-0 jet is the zero constant.
    pub fn differentiate(&self) -> Jet {
        if self.coeffs.len() == 1 {
            return Jet::constant(0.0, 0);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, c)| (k + 1) as f64 * c)
            .collect();
        Jet { coeffs }
    }

    /// Antiderivative with the given value at the expansion point; the
    /// order grows by one.
    pub fn integrate(&self, c0: f64) -> Jet {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(c0);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Jet { coeffs }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let len = (order + 1).min(self.coeffs.len());
        Jet {
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    /// Drops the leading `k` coefficients, i.e. divides by `(x - x0)^k`.
    /// Meaningful only when those coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Jet {
        assert!(k < self.coeffs.len(), "shift exceeds jet order");
        Jet {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    /// Evaluates the truncated Taylor polynomial at offset `h` from the
    /// expansion point.
    pub fn eval_at(&self, h: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * h + c)
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()) / self.clone()
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..n {
            out = out * self.clone();
        }
        out
    }

    fn zip_len(&self, other: &Jet) -> usize {
        self.coeffs.len().min(other.coeffs.len())
    }
}

impl Real for Jet {
    fn sqrt(&self) -> Jet {
        let n = self.coeffs.len();
        let a = &self.coeffs;
        let mut s = vec![0.0; n];
        s[0] = a[0].sqrt();
        for k in 1..n {
            let cross: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (a[k] - cross) / (2.0 * s[0]);
        }
        Jet { coeffs: s }
    }

    fn asin(&self) -> Jet {
        let y0 = asin_clamped(self.coeffs[0]);
        if self.coeffs.len() == 1 {
            return Jet::constant(y0, 0);
        }
        // y' = u' / sqrt(1 - u^2)
        let du = self.differentiate();
        let inner = self.truncate(du.order());
        let dy = du / inner.square().rsub(1.0).sqrt();
        dy.integrate(y0)
    }

    fn value(&self) -> f64 {
        self.coeffs[0]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let n = self.zip_len(&rhs);
        let coeffs = (0..n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect();
        Jet { coeffs }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let n = self.zip_len(&rhs);
        let coeffs = (0..n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect();
        Jet { coeffs }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let n = self.zip_len(&rhs);
        let (a, b) = (&self.coeffs, &rhs.coeffs);
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
            .collect();
        Jet { coeffs }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let n = self.zip_len(&rhs);
        let (a, b) = (&self.coeffs, &rhs.coeffs);
        let mut q = vec![0.0; n];
        for k in 0..n {
            let cross: f64 = (1..=k).map(|j| b[j] * q[k - j]).sum();
            q[k] = (a[k] - cross) / b[0];
        }
        Jet { coeffs: q }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.coeffs.iter_mut().for_each(|c| *c = -*c);
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self.coeffs.iter_mut().for_each(|c| *c *= rhs);
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(mut self, rhs: f64) -> Jet {
        self.coeffs.iter_mut().for_each(|c| *c /= rhs);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_coefficients_are_exact() {
        // (x + 2)^3 at x0 = 1: 27, 27, 9, 1
        let x = Jet::variable(1.0, 4);
        let p = (x + 2.0).powi(3);
        assert_eq!(p.coeffs(), &[27.0, 27.0, 9.0, 1.0, 0.0]);
    }

    #[test]
    fn quotient_matches_geometric_series() {
        // 1 / (1 - x) at 0
        let x = Jet::variable(0.0, 6);
        let r = x.rsub(1.0).recip();
        for k in 0..=6 {
            assert_relative_eq!(r.coeff(k), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sqrt_and_asin_derivatives() {
        let x0 = 0.3;
        let x = Jet::variable(x0, 3);
        let s = x.sqrt();
        assert_relative_eq!(s.derivative(1), 0.5 / x0.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s.derivative(2), -0.25 * x0.powf(-1.5), max_relative = 1e-14);
        let a = x.asin();
        let w = 1.0 - x0 * x0;
        assert_relative_eq!(a.value(), x0.asin(), max_relative = 1e-15);
        assert_relative_eq!(a.derivative(1), w.powf(-0.5), max_relative = 1e-14);
        assert_relative_eq!(a.derivative(2), x0 * w.powf(-1.5), max_relative = 1e-14);
        assert_relative_eq!(
            a.derivative(3),
            (1.0 + 2.0 * x0 * x0) * w.powf(-2.5),
            max_relative = 1e-13
        );
    }

    #[test]
    fn differentiate_then_integrate_round_trips() {
        let x = Jet::variable(0.4, 5);
        let h = x.asin().square();
        let back = h.differentiate().integrate(h.value());
        for k in 0..=5 {
            assert_relative_eq!(back.coeff(k), h.coeff(k), max_relative = 1e-14);
        }
    }

    #[test]
    fn eval_at_sums_the_polynomial() {
        let j = Jet::from_coeffs(vec![1.0, 2.0, 3.0]);
        assert_eq!(j.eval_at(2.0), 1.0 + 4.0 + 12.0);
    }

    #[test]
    fn order_zero_asin_is_constant() {
        let j = Jet::constant(0.5, 0).asin();
        assert_eq!(j.order(), 0);
        assert_relative_eq!(j.value(), std::f64::consts::FRAC_PI_6, max_relative = 1e-15);
    }

    #[test]
    fn clamp_only_near_boundary() {
        assert_eq!(asin_clamped(1.0 + 5e-16), std::f64::consts::FRAC_PI_2);
        assert!(asin_clamped(1.0 + 1e-12).is_nan());
    }
}
