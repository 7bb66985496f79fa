use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use super::normal::inverse_phi;
use crate::corrmath::Rho;
use crate::error::{domain, Result};

/// Paired observations `(x_i, y_i)`, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSample {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn has_duplicates(v: &[f64]) -> bool {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).any(|w| w[0] == w[1])
}

impl BivariateSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return domain(format!("coordinate lengths differ: {} vs {}", x.len(), y.len()));
        }
        if x.is_empty() {
            return domain("sample is empty");
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return domain("sample contains non-finite values");
        }
        Ok(BivariateSample { x, y })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (x, y) = pairs.iter().copied().unzip();
        Self::new(x, y)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    /// Whether any two x's or any two y's coincide.
    pub fn has_ties(&self) -> bool {
        has_duplicates(&self.x) || has_duplicates(&self.y)
    }

    /// Applies `x ↦ fx(x)` and `y ↦ fy(y)` coordinatewise.
    pub fn map(&self, fx: impl Fn(f64) -> f64, fy: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.x.iter().map(|&v| fx(v)).collect(),
            self.y.iter().map(|&v| fy(v)).collect(),
        )
    }
}

/// Uniform on the open interval (0, 1) with 53 random bits.
fn open_uniform(rng: &mut ChaCha20Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `n` draws of `(X, ρX + √(1−ρ²)Z)` from ChaCha20 seeded with `seed` on
/// stream `stream`. Each draw consumes X then Z.
pub fn sample_bivariate_normal_stream(
    n: usize,
    rho: Rho,
    seed: u64,
    stream: u64,
) -> Result<BivariateSample> {
    if n == 0 {
        return domain("sample size must be at least 1");
    }
    let r = rho.value();
    let w = ((1.0 - r) * (1.0 + r)).sqrt();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let xi = inverse_phi(open_uniform(&mut rng));
        let zi = inverse_phi(open_uniform(&mut rng));
        x.push(xi);
        y.push(r * xi + w * zi);
    }
    Ok(BivariateSample { x, y })
}

/// Stream 0 of [`sample_bivariate_normal_stream`].
pub fn sample_bivariate_normal(n: usize, rho: Rho, seed: u64) -> Result<BivariateSample> {
    sample_bivariate_normal_stream(n, rho, seed, 0)
}
