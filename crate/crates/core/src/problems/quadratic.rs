use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::{Objective, SmoothObjective};
use crate::vector::RealVector;

use super::{check_sigma, pinned_log_uniform, rng};

/// Largest eigenvalue used by [`gen_quadratic`].
pub const QUADRATIC_LIP: f64 = 40.0;

const MAX_RETRIES: u64 = 8;
const BREAKDOWN_TOL: f64 = 1e-10;

/// `f(x) = ½xᵀMx + qᵀx` with `M = U diag(eigenvalues) Uᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSpec {
    pub m: DMatrix<f64>,
    pub q: RealVector,
    pub eigenvalues: RealVector,
}

impl QuadraticSpec {
    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn mu(&self) -> f64 {
        self.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn lip(&self) -> f64 {
        self.eigenvalues.iter().cloned().fold(0.0, f64::max)
    }

    /// Solves `Mx = −q`.
    pub fn minimizer(&self) -> Result<RealVector> {
        let x = self
            .m
            .clone()
            .lu()
            .solve(&-self.q.as_dvector())
            .ok_or_else(|| Error::ReferenceFailure("singular quadratic".into()))?;
        RealVector::from_dvector(x)
    }

    pub fn objective(&self) -> Result<SmoothObjective> {
        let func = Arc::new(QuadraticObjective {
            m: self.m.clone(),
            q: self.q.as_dvector().clone(),
        });
        SmoothObjective::new(func, self.mu(), self.lip())?.with_minimizer(self.minimizer()?)
    }
}

#[derive(Clone, Debug)]
pub struct QuadraticObjective {
    pub m: DMatrix<f64>,
    pub q: DVector<f64>,
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.q.len()
    }

    fn value(&self, x: &RealVector) -> f64 {
        let x = x.as_dvector();
        0.5 * x.dot(&(&self.m * x)) + self.q.dot(x)
    }

    fn gradient(&self, x: &RealVector) -> RealVector {
        let mut g = self.q.clone();
        g.gemv(1.0, &self.m, x.as_dvector(), 1.0);
        RealVector::from_raw(g)
    }

    /// ½(x − x*)ᵀM(x − x*), which avoids cancellation near the optimum.
    fn gap(&self, x: &RealVector, minimizer: &RealVector, _optimal_value: f64) -> f64 {
        let d = (x - minimizer).into_dvector();
        0.5 * d.dot(&(&self.m * &d))
    }
}

/// Draws a quadratic with spectrum in `[target_sigma·L, L]`, `L = 40`, both ends attained.
///
/// The eigenbasis comes from Gram–Schmidt on Gaussian vectors. If the vectors
/// are numerically dependent the draw is repeated with a perturbed seed.
pub fn gen_quadratic_spec(n: usize, seed: u64, target_sigma: f64) -> Result<QuadraticSpec> {
    if n < 2 {
        return Err(Error::invalid("quadratic needs n >= 2"));
    }
    check_sigma(target_sigma)?;
    for attempt in 0..=MAX_RETRIES {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut r = rng(s);
        let eig = pinned_log_uniform(&mut r, n, target_sigma * QUADRATIC_LIP, QUADRATIC_LIP);
        let g = DMatrix::from_fn(n, n, |_, _| r.sample::<f64, _>(StandardNormal));
        let Some(u) = gram_schmidt(g) else { continue };
        let q: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..=1.0)).collect();
        let d = DMatrix::from_diagonal(&DVector::from_vec(eig.clone()));
        let m = &u * d * u.transpose();
        let m = (&m + m.transpose()) * 0.5;
        return Ok(QuadraticSpec {
            m,
            q: RealVector::new(q)?,
            eigenvalues: RealVector::new(eig)?,
        });
    }
    Err(Error::ReferenceFailure(format!(
        "Gram-Schmidt broke down after {MAX_RETRIES} retries"
    )))
}

pub fn gen_quadratic(n: usize, seed: u64, target_sigma: f64) -> Result<SmoothObjective> {
    gen_quadratic_spec(n, seed, target_sigma)?.objective()
}

/// Modified Gram–Schmidt on the columns; `None` on breakdown.
fn gram_schmidt(mut g: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = g.ncols();
    for j in 0..n {
        for i in 0..j {
            let proj = g.column(i).dot(&g.column(j));
            let ci = g.column(i).clone_owned();
            g.column_mut(j).axpy(-proj, &ci, 1.0);
        }
        let norm = g.column(j).norm();
        if !(norm > BREAKDOWN_TOL) {
            return None;
        }
        g.column_mut(j).unscale_mut(norm);
    }
    Some(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_is_exact() {
        let f = gen_quadratic(20, 11, 0.0024).unwrap();
        assert!((f.sigma() / 0.0024 - 1.0).abs() < 1e-6);
        assert_eq!(f.lip(), QUADRATIC_LIP);
    }

    #[test]
    fn minimizer_is_stationary() {
        let f = gen_quadratic(20, 2, 0.01).unwrap();
        let g = f.gradient(f.minimizer().unwrap());
        assert!(g.norm() <= 1e-9);
    }

    #[test]
    fn basis_is_orthonormal() {
        let mut r = rng(1);
        let g = DMatrix::from_fn(6, 6, |_, _| r.sample::<f64, _>(StandardNormal));
        let u = gram_schmidt(g).unwrap();
        let err = (u.transpose() * &u - DMatrix::identity(6, 6)).abs().max();
        assert!(err < 1e-12);
    }

    #[test]
    fn dependent_vectors_break_down() {
        let g = DMatrix::from_fn(3, 3, |i, _| i as f64 + 1.0);
        assert!(gram_schmidt(g).is_none());
    }

    #[test]
    fn gap_matches_value_difference() {
        let spec = gen_quadratic_spec(5, 4, 0.2).unwrap();
        let f = spec.objective().unwrap();
        let x = RealVector::new(vec![1.0, -2.0, 0.5, 0.0, 3.0]).unwrap();
        let direct = f.value(&x) - f.optimal_value().unwrap();
        assert!((f.gap(&x).unwrap() - direct).abs() <= 1e-10 * direct.abs());
    }
}
