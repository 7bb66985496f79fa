use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::estimators::{kendall_t, pearson_r, spearman_s};
use super::normal::phi;
use super::sample::{sample_bivariate_normal_stream, BivariateSample};
use crate::corrmath::{self, moments_r, moments_t, mu_s_finite_n, MomentSet, Rho};
use crate::error::{domain, Error, Result};
use crate::quadrature::DEFAULT_ABS_TOL;

pub const MIN_N: usize = 10;
pub const MIN_REPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    R,
    S,
    T,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::R, Statistic::S, Statistic::T];

    pub fn label(self) -> &'static str {
        match self {
            Statistic::R => "R",
            Statistic::S => "S",
            Statistic::T => "T",
        }
    }

    fn asymptotic(self, rho: Rho) -> Result<MomentSet> {
        Ok(match self {
            Statistic::R => moments_r(rho),
            Statistic::S => corrmath::moments_s(rho, DEFAULT_ABS_TOL)?,
            Statistic::T => moments_t(rho),
        })
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Statistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "R" => Ok(Statistic::R),
            "S" => Ok(Statistic::S),
            "T" => Ok(Statistic::T),
            _ => domain(format!("unknown statistic '{s}', expected R, S or T")),
        }
    }
}

/// Evaluates one statistic on a sample. Ties are tolerated.
pub fn statistic(stat: Statistic, s: &BivariateSample) -> Result<f64> {
    match stat {
        Statistic::R => pearson_r(s),
        Statistic::S => spearman_s(s).map(|e| e.value),
        Statistic::T => kendall_t(s).map(|e| e.value),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub stat: Statistic,
    pub rho: f64,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub mean_hat: f64,
    /// Exact finite-n mean for S, asymptotic mean otherwise.
    pub mu_ref: f64,
    /// n times the unbiased replicate variance.
    pub var_hat_scaled: f64,
    pub sigma2_ref: f64,
    pub se_mean: f64,
    pub se_var: f64,
    /// Kolmogorov distance between the replicates of √n(stat − μ)/σ and Φ,
    /// with the asymptotic μ and σ.
    pub cdf_sup_dist: f64,
}

fn kolmogorov_distance(z: &mut [f64]) -> f64 {
    z.sort_by(f64::total_cmp);
    let m = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, &v)| {
            let p = phi(v);
            ((i + 1) as f64 / m - p).max(p - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

/// Replicate `i` uses ChaCha20 stream `i` of `seed`, so results do not
/// depend on how replicates are scheduled across threads.
pub fn mc_moments(stat: Statistic, rho: Rho, n: usize, reps: usize, seed: u64) -> Result<McReport> {
    if n < MIN_N {
        return domain(format!("Monte Carlo sample size must be at least {MIN_N}, got {n}"));
    }
    if reps < MIN_REPS {
        return domain(format!("Monte Carlo needs at least {MIN_REPS} replicates, got {reps}"));
    }
    let asym = stat.asymptotic(rho)?;
    let mu_ref = match stat {
        Statistic::S => mu_s_finite_n(rho, n)?,
        _ => asym.mu,
    };

    let values = (0..reps as u64)
        .into_par_iter()
        .map(|i| statistic(stat, &sample_bivariate_normal_stream(n, rho, seed, i)?))
        .collect::<Result<Vec<f64>>>()?;

    let m = reps as f64;
    let mean = values.iter().sum::<f64>() / m;
    let (mut m2, mut m4) = (0.0, 0.0);
    for v in &values {
        let d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    let s2 = m2 / (m - 1.0);
    m4 /= m;
    let var_of_s2 = ((m4 - s2 * s2 * (m - 3.0) / (m - 1.0)) / m).max(0.0);

    let nf = n as f64;
    let scale = nf.sqrt() / asym.sigma2.sqrt();
    let mut z: Vec<f64> = values.iter().map(|v| (v - asym.mu) * scale).collect();

    Ok(McReport {
        stat,
        rho: rho.value(),
        n,
        reps,
        seed,
        mean_hat: mean,
        mu_ref,
        var_hat_scaled: nf * s2,
        sigma2_ref: asym.sigma2,
        se_mean: (s2 / m).sqrt(),
        se_var: nf * var_of_s2.sqrt(),
        cdf_sup_dist: kolmogorov_distance(&mut z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_of_symmetric_points() {
        let mut z = vec![0.0];
        assert_eq!(kolmogorov_distance(&mut z), 0.5);
    }

    #[test]
    fn validation() {
        let rho = Rho::new(0.0).unwrap();
        assert!(mc_moments(Statistic::R, rho, 9, 100, 1).is_err());
        assert!(mc_moments(Statistic::R, rho, 10, 99, 1).is_err());
    }

    #[test]
    fn parses_labels() {
        assert_eq!("t".parse::<Statistic>().unwrap(), Statistic::T);
        assert!("x".parse::<Statistic>().is_err());
    }
}
