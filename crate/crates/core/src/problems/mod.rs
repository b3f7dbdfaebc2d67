//! Seeded generators for the benchmark problem families, a reference solver
//! for linear instances, and an empirical oracle for (μ, L).

mod bilinear;
mod estimate;
mod format;
mod linear;
mod logistic;
mod quadratic;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use bilinear::{gen_bilinear_saddle, BilinearSpec};
pub use estimate::estimate_constants;
pub(crate) use format::fmt_real;
pub use format::{ProblemInstance, ProblemKind, FORMAT_HEADER};
pub use linear::{gen_linear_vi, gen_linear_vi_spec, solve_linear_reference, LinearOperatorSpec};
pub use logistic::{gen_logistic, gen_logistic_spec, LogisticObjective, LogisticSpec};
pub use quadratic::{gen_quadratic, gen_quadratic_spec, QuadraticObjective, QuadraticSpec};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform values on [lo, hi] with both endpoints attained exactly.
///
/// Draws are normalized to [0, 1] so the extremes pin the requested ratio.
pub(crate) fn pinned_log_uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    use rand::Rng;
    let mut e: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let (min, max) = e
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let ratio = lo / hi;
    for x in e.iter_mut() {
        let t = if max > min { (*x - min) / (max - min) } else { 1.0 };
        *x = if t == 1.0 {
            hi
        } else if t == 0.0 {
            lo
        } else {
            hi * ratio.powf(1.0 - t)
        };
    }
    e
}

pub(crate) fn check_sigma(target_sigma: f64) -> crate::Result<()> {
    if !(target_sigma > 0.0 && target_sigma < 1.0) {
        return Err(crate::Error::invalid(format!(
            "target sigma must lie in (0, 1), got {target_sigma}"
        )));
    }
    Ok(())
}
