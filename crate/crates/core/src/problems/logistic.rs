use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::harness::power_iteration_norm;
use crate::problem::{Objective, SmoothObjective};
use crate::vector::RealVector;

use super::rng;

const POWER_ITERS: usize = 1000;

/// Data for `f(x) = (1/N) Σ ln(1 + exp(−a_iᵀx)) + (λ/2)‖x‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticSpec {
    pub samples: Vec<RealVector>,
    pub lambda: f64,
}

impl LogisticSpec {
    pub fn new(samples: Vec<RealVector>, lambda: f64) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::invalid("logistic data needs at least one sample"));
        };
        let n = first.dim();
        for s in &samples {
            check_dim(n, s.dim())?;
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda must be positive"));
        }
        Ok(Self { samples, lambda })
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    /// Rows are the samples.
    pub fn data_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(self.samples.len(), n, |i, j| self.samples[i][j])
    }

    /// `λ + λ_max(Σ a_i a_iᵀ)/(4N)`, with the eigenvalue from power iteration.
    pub fn lip(&self, seed: u64) -> f64 {
        let a = self.data_matrix();
        let s = power_iteration_norm(&a, POWER_ITERS, seed);
        self.lambda + s * s / (4.0 * self.samples.len() as f64)
    }

    pub fn objective(&self, seed: u64) -> Result<SmoothObjective> {
        self.objective_with_lip(self.lip(seed))
    }

    /// Objective with a caller-supplied smoothness constant (e.g. a tuned or stored value).
    pub fn objective_with_lip(&self, lip: f64) -> Result<SmoothObjective> {
        let func = Arc::new(LogisticObjective {
            data: self.data_matrix(),
            lambda: self.lambda,
        });
        SmoothObjective::new(func, self.lambda, lip)
    }
}

#[derive(Clone, Debug)]
pub struct LogisticObjective {
    data: DMatrix<f64>,
    lambda: f64,
}

/// ln(1 + e^{−t}) without overflow.
fn softplus_neg(t: f64) -> f64 {
    (-t).max(0.0) + (-t.abs()).exp().ln_1p()
}

/// 1/(1 + e^{t}).
fn sigmoid_neg(t: f64) -> f64 {
    if t >= 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl Objective for LogisticObjective {
    fn dim(&self) -> usize {
        self.data.ncols()
    }

    fn value(&self, x: &RealVector) -> f64 {
        let margins = &self.data * x.as_dvector();
        let loss: f64 = margins.iter().map(|&t| softplus_neg(t)).sum();
        loss / self.data.nrows() as f64 + 0.5 * self.lambda * x.norm_sq()
    }

    fn gradient(&self, x: &RealVector) -> RealVector {
        let n_samples = self.data.nrows() as f64;
        let margins = &self.data * x.as_dvector();
        let weights = margins.map(|t| -sigmoid_neg(t) / n_samples);
        let mut g = x.as_dvector() * self.lambda;
        g.gemv_tr(1.0, &self.data, &weights, 1.0);
        RealVector::from_raw(g)
    }
}

/// Gaussian samples `a_i ~ N(0, I)`.
pub fn gen_logistic_spec(n: usize, n_samples: usize, lambda: f64, seed: u64) -> Result<LogisticSpec> {
    if n == 0 || n_samples == 0 {
        return Err(Error::invalid("n and n_samples must be positive"));
    }
    let mut r = rng(seed);
    let samples = (0..n_samples)
        .map(|_| RealVector::new((0..n).map(|_| StandardNormal.sample(&mut r)).collect()))
        .collect::<Result<Vec<_>>>()?;
    LogisticSpec::new(samples, lambda)
}

pub fn gen_logistic(n: usize, n_samples: usize, lambda: f64, seed: u64) -> Result<SmoothObjective> {
    gen_logistic_spec(n, n_samples, lambda, seed)?.objective(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin() {
        let f = gen_logistic(15, 2, 0.005, 1).unwrap();
        assert_eq!(f.mu(), 0.005);
        assert!((f.value(&RealVector::zeros(15)) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lip_matches_exact_eigenvalue() {
        let spec = gen_logistic_spec(15, 2, 0.005, 3).unwrap();
        let a = spec.data_matrix();
        let gram = &a * a.transpose();
        let top = gram.symmetric_eigenvalues().max();
        let exact = 0.005 + top / 8.0;
        assert!((spec.lip(3) - exact).abs() <= 1e-9 * exact);
    }

    #[test]
    fn stable_for_large_margins() {
        let spec = LogisticSpec::new(vec![RealVector::new(vec![1.0]).unwrap()], 1.0).unwrap();
        let f = spec.objective(0).unwrap();
        let x = RealVector::new(vec![-800.0]).unwrap();
        assert!(f.value(&x).is_finite());
        assert!(f.gradient(&x).is_finite());
    }
}
