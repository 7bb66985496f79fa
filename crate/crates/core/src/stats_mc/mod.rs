//! Finite-sample R, S and T, seeded bivariate normal sampling and Monte
//! Carlo checks of the asymptotic moments.

mod estimators;
mod monte_carlo;
#[allow(clippy::excessive_precision)]
mod normal;
mod sample;

pub use estimators::{
    kendall_t, kendall_t_brute, pearson_r, ranks, spearman_kernel, spearman_s,
    spearman_ustat_identity, Estimate, USTAT_MAX_N,
};
pub use monte_carlo::{mc_moments, statistic, McReport, Statistic, MIN_N, MIN_REPS};
pub use normal::{inverse_phi, phi};
pub use sample::{sample_bivariate_normal, sample_bivariate_normal_stream, BivariateSample};
