use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::harness::power_iteration_norm;
use crate::problem::MonotoneProblem;
use crate::vector::RealVector;

use super::rng;

const JACOBIAN_POINTS: usize = 3;
const POWER_ITERS: usize = 1000;

/// Empirical `(mu_hat, lip_hat)` for a problem's operator.
///
/// Both come from `trials` random feasible pairs (the extreme monotonicity and
/// Lipschitz ratios), and `lip_hat` is sharpened by power iteration on a
/// central-difference Jacobian at a few sample points. Since they are sampled
/// extremes, `mu_hat` overestimates and `lip_hat` underestimates the true
/// constants, up to finite-difference error.
pub fn estimate_constants(problem: &MonotoneProblem, trials: usize, seed: u64) -> Result<(f64, f64)> {
    let n = problem.dimension();
    let center = problem
        .solution()
        .cloned()
        .unwrap_or_else(|| RealVector::zeros(n));
    let mut r = rng(seed);
    let mut sample = || {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        problem.project(&center.axpy(1.0, &RealVector::from_raw(g.into())))
    };

    let mut mu_hat = f64::INFINITY;
    let mut lip_hat: f64 = 0.0;
    let mut pairs = 0;
    let mut points = Vec::new();
    for _ in 0..trials {
        let (z, w) = (sample(), sample());
        let d = &z - &w;
        let d2 = d.norm_sq();
        if d2 == 0.0 {
            continue;
        }
        let df = &problem.eval(&z) - &problem.eval(&w);
        mu_hat = mu_hat.min(df.dot(&d) / d2);
        lip_hat = lip_hat.max((df.norm_sq() / d2).sqrt());
        pairs += 1;
        if points.len() < JACOBIAN_POINTS {
            points.push(z);
        }
    }
    if pairs == 0 {
        return Err(Error::invalid("need at least two distinct sample points"));
    }
    for (i, z) in points.iter().enumerate() {
        let jac = fd_jacobian(problem, z);
        lip_hat = lip_hat.max(power_iteration_norm(&jac, POWER_ITERS, seed.wrapping_add(i as u64)));
    }
    Ok((mu_hat, lip_hat))
}

fn fd_jacobian(problem: &MonotoneProblem, z: &RealVector) -> DMatrix<f64> {
    let n = z.dim();
    let h = 1e-4 * (1.0 + z.norm());
    let mut jac = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = h;
        let step = RealVector::from_raw(e.clone().into());
        let fp = problem.eval(&(z + &step));
        let fm = problem.eval(&(z - &step));
        let col = (&fp - &fm).into_dvector() / (2.0 * h);
        jac.set_column(j, &col);
        e[j] = 0.0;
    }
    jac
}
