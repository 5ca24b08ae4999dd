//! Densities, latent-weight moments and samplers for SAL and MSSAL laws.

mod bessel;
mod density;
mod gig;
mod sampling;

pub use bessel::{bessel_k_ratio, log_bessel_k};
pub use density::{
    mixture_log_density, mssal_log_density, sal_log_density, ComponentKernel, ComponentParams,
    MixtureModel, ORTHOGONALITY_TOL,
};
pub use gig::{gig_moments, GigMoments, DEFAULT_B_FLOOR};
pub use sampling::{sample_mixture, sample_mssal};

/// Numerically stable `log(sum(exp(values)))`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
