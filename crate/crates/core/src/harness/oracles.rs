use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::certify::default_opt_params;
use crate::error::{Error, Result};
use crate::problem::SmoothObjective;
use crate::problems::rng;
use crate::solvers::{run_opt, RunOptions, StopCriteria, YRule};
use crate::vector::RealVector;

/// Central-difference gradient with step `h` in each coordinate.
pub fn finite_diff_grad(objective: &SmoothObjective, x: &RealVector, h: f64) -> Result<RealVector> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let mut e = x.to_vec();
    let mut g = Vec::with_capacity(e.len());
    for i in 0..e.len() {
        let xi = e[i];
        e[i] = xi + h;
        let up = objective.value(&RealVector::new(e.clone())?);
        e[i] = xi - h;
        let down = objective.value(&RealVector::new(e.clone())?);
        e[i] = xi;
        g.push((up - down) / (2.0 * h));
    }
    RealVector::new(g)
}

/// A linear map known only through products with it and its transpose.
pub trait LinearMap {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &DVector<f64>) -> DVector<f64>;
    fn apply_transpose(&self, y: &DVector<f64>) -> DVector<f64>;
}

impl LinearMap for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self * x
    }
    fn apply_transpose(&self, y: &DVector<f64>) -> DVector<f64> {
        self.tr_mul(y)
    }
}

/// Estimates `‖A‖₂` by power iteration on `AᵀA` from a seeded Gaussian start.
///
/// The estimate never exceeds the true norm; after `k` iterations its relative
/// error is of order `(s₂/s₁)^{2k}` when the top singular value is simple.
pub fn power_iteration_norm<M: LinearMap + ?Sized>(map: &M, iters: usize, seed: u64) -> f64 {
    let n = map.ncols();
    if n == 0 || map.nrows() == 0 {
        return 0.0;
    }
    let mut r = rng(seed);
    let mut v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut r));
    let mut est = 0.0;
    for _ in 0..=iters {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        v /= nv;
        let av = map.apply(&v);
        est = av.norm();
        if est == 0.0 {
            return 0.0;
        }
        v = map.apply_transpose(&av);
    }
    est
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceRun {
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Minimizer of a smooth strongly convex objective, found with the certified
/// optimization scheme started at zero and run until `‖∇f‖ ≤ grad_tol`.
/// Returns the objective with the minimizer attached.
pub fn reference_optimum(
    objective: &SmoothObjective,
    grad_tol: f64,
    max_iter: usize,
) -> Result<(SmoothObjective, ReferenceRun)> {
    let params = default_opt_params(objective.mu(), objective.lip(), None)?;
    let opts = RunOptions::new(StopCriteria {
        max_iter,
        residual_tol: grad_tol,
    })
    .with_thinning(usize::MAX);
    let x0 = RealVector::zeros(objective.dimension());
    let trace = run_opt(objective, &params, YRule::YEqualsP, &x0, &opts)?;
    let info = ReferenceRun {
        iterations: trace.iterations(),
        grad_norm: trace.last().merit_primary,
    };
    if info.grad_norm > grad_tol {
        return Err(Error::ReferenceFailure(format!(
            "gradient norm {} after {} iterations",
            info.grad_norm, info.iterations
        )));
    }
    let x = trace.iterates.last().cloned().expect("final iterate is always kept");
    Ok((objective.clone().with_minimizer(x)?, info))
}
