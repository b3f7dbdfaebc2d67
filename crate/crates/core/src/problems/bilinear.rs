use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::{AffineOperator, MonotoneProblem};
use crate::sets::FeasibleSet;
use crate::vector::RealVector;

use super::linear::spectral_norm;
use super::rng;

/// Saddle function `f(x, y) = (μ_x/2)‖x‖² + xᵀBy − (μ_y/2)‖y‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearSpec {
    pub b: DMatrix<f64>,
    pub mu_x: f64,
    pub mu_y: f64,
}

impl BilinearSpec {
    pub fn new(b: DMatrix<f64>, mu_x: f64, mu_y: f64) -> Result<Self> {
        if b.nrows() == 0 || b.ncols() == 0 {
            return Err(Error::invalid("coupling matrix must be nonempty"));
        }
        if !(mu_x > 0.0 && mu_y > 0.0 && mu_x.is_finite() && mu_y.is_finite()) {
            return Err(Error::invalid("mu_x and mu_y must be positive"));
        }
        Ok(Self { b, mu_x, mu_y })
    }

    pub fn nx(&self) -> usize {
        self.b.nrows()
    }

    pub fn ny(&self) -> usize {
        self.b.ncols()
    }

    /// Matrix of `z ↦ (∇ₓf, −∇ᵧf)`, i.e. `[[μ_x I, B], [−Bᵀ, μ_y I]]`.
    pub fn operator_matrix(&self) -> DMatrix<f64> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut m = DMatrix::zeros(nx + ny, nx + ny);
        m.view_mut((0, 0), (nx, nx)).fill_diagonal(self.mu_x);
        m.view_mut((nx, nx), (ny, ny)).fill_diagonal(self.mu_y);
        m.view_mut((0, nx), (nx, ny)).copy_from(&self.b);
        m.view_mut((nx, 0), (ny, nx)).copy_from(&-self.b.transpose());
        m
    }

    pub fn mu(&self) -> f64 {
        self.mu_x.min(self.mu_y)
    }

    pub fn lip(&self) -> f64 {
        spectral_norm(&self.operator_matrix())
    }

    pub fn problem(&self) -> Result<MonotoneProblem> {
        let n = self.nx() + self.ny();
        let op = AffineOperator::new(self.operator_matrix(), DVector::zeros(n))?;
        MonotoneProblem::new(Arc::new(op), FeasibleSet::WholeSpace, self.mu(), self.lip())?
            .with_solution(RealVector::zeros(n))
    }
}

/// Coupling entries uniform in [−1, 1]. The saddle point is the origin.
pub fn gen_bilinear_saddle(nx: usize, ny: usize, seed: u64, mu_x: f64, mu_y: f64) -> Result<MonotoneProblem> {
    gen_bilinear_spec(nx, ny, seed, mu_x, mu_y)?.problem()
}

pub(crate) fn gen_bilinear_spec(nx: usize, ny: usize, seed: u64, mu_x: f64, mu_y: f64) -> Result<BilinearSpec> {
    let mut r = rng(seed);
    let b = DMatrix::from_fn(nx, ny, |_, _| r.random_range(-1.0..=1.0));
    BilinearSpec::new(b, mu_x, mu_y)
}
