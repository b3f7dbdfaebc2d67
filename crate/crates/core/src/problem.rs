//! Problem-instance contracts: monotone operators over a feasible set, and
//! smooth strongly convex objectives.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::sets::FeasibleSet;
use crate::vector::RealVector;

/// Relative tolerance for the "solution present" invariants: residual ≤ tol·(1+‖z*‖).
pub const SOLUTION_TOL: f64 = 1e-9;

/// Evaluation contract `z ↦ F(z)`.
pub trait Operator: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, z: &RealVector) -> RealVector;
}

/// `F(z) = Mz + q`.
#[derive(Clone, Debug)]
pub struct AffineOperator {
    pub m: DMatrix<f64>,
    pub q: DVector<f64>,
}

impl AffineOperator {
    pub fn new(m: DMatrix<f64>, q: DVector<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid("operator matrix must be square"));
        }
        check_dim(m.nrows(), q.len())?;
        Ok(Self { m, q })
    }
}

impl Operator for AffineOperator {
    fn dim(&self) -> usize {
        self.q.len()
    }

    fn apply(&self, z: &RealVector) -> RealVector {
        let mut out = self.q.clone();
        out.gemv(1.0, &self.m, z.as_dvector(), 1.0);
        RealVector::from_raw(out)
    }
}

/// Operator backed by a closure.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&RealVector) -> RealVector + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Operator for FnOperator<F>
where
    F: Fn(&RealVector) -> RealVector + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, z: &RealVector) -> RealVector {
        (self.f)(z)
    }
}

/// A VI instance: find z* ∈ 𝒵 with F(z*)ᵀ(z − z*) ≥ 0 for all z ∈ 𝒵.
#[derive(Clone)]
pub struct MonotoneProblem {
    operator: Arc<dyn Operator>,
    set: FeasibleSet,
    mu: f64,
    lip: f64,
    solution: Option<RealVector>,
    domain_restricted: bool,
}

impl fmt::Debug for MonotoneProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneProblem")
            .field("dimension", &self.dimension())
            .field("set", &self.set.name())
            .field("mu", &self.mu)
            .field("lip", &self.lip)
            .field("has_solution", &self.solution.is_some())
            .field("domain_restricted", &self.domain_restricted)
            .finish()
    }
}

impl MonotoneProblem {
    pub fn new(operator: Arc<dyn Operator>, set: FeasibleSet, mu: f64, lip: f64) -> Result<Self> {
        let n = operator.dim();
        if n == 0 {
            return Err(Error::invalid("problem dimension must be positive"));
        }
        if let Some(d) = set.fixed_dim() {
            check_dim(n, d)?;
        }
        validate_constants(mu, lip)?;
        Ok(Self {
            operator,
            set,
            mu,
            lip,
            solution: None,
            domain_restricted: false,
        })
    }

    /// Attaches a known solution after checking its natural residual.
    pub fn with_solution(mut self, z: RealVector) -> Result<Self> {
        check_dim(self.dimension(), z.dim())?;
        let res = natural_residual(&self, &z)?;
        let bound = SOLUTION_TOL * (1.0 + z.norm());
        if res > bound {
            return Err(Error::invalid(format!(
                "claimed solution has natural residual {res:e} > {bound:e}"
            )));
        }
        self.solution = Some(z);
        Ok(self)
    }

    /// Declares that F is only defined on the feasible set.
    pub fn with_domain_restricted(mut self, restricted: bool) -> Self {
        self.domain_restricted = restricted;
        self
    }

    /// Replaces the Lipschitz constant (e.g. a user override).
    pub fn with_lip(mut self, lip: f64) -> Result<Self> {
        validate_constants(self.mu, lip)?;
        self.lip = lip;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.operator.dim()
    }

    pub fn eval(&self, z: &RealVector) -> RealVector {
        self.operator.apply(z)
    }

    pub fn operator(&self) -> &Arc<dyn Operator> {
        &self.operator
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn sigma(&self) -> f64 {
        self.mu / self.lip
    }

    pub fn kappa(&self) -> f64 {
        self.lip / self.mu
    }

    pub fn solution(&self) -> Option<&RealVector> {
        self.solution.as_ref()
    }

    pub fn domain_restricted(&self) -> bool {
        self.domain_restricted
    }

    pub fn project(&self, z: &RealVector) -> RealVector {
        self.set.project_unchecked(z)
    }
}

fn validate_constants(mu: f64, lip: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::invalid("mu must be positive and finite"));
    }
    if !(lip >= mu && lip.is_finite()) {
        return Err(Error::invalid("lip must be finite and at least mu"));
    }
    Ok(())
}

/// ‖z − P_𝒵(z − F(z))‖, zero exactly at solutions.
pub fn natural_residual(problem: &MonotoneProblem, z: &RealVector) -> Result<f64> {
    check_dim(problem.dimension(), z.dim())?;
    Ok(natural_residual_with(problem, z, &problem.eval(z)))
}

/// Natural residual with a precomputed F(z).
pub(crate) fn natural_residual_with(problem: &MonotoneProblem, z: &RealVector, fz: &RealVector) -> f64 {
    if problem.set().is_whole_space() {
        return fz.norm();
    }
    let p = problem.project(&(z - fz));
    z.dist(&p)
}

/// Value and gradient contract for a smooth objective.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &RealVector) -> f64;
    fn gradient(&self, x: &RealVector) -> RealVector;

    /// f(x) − f*, given the minimizer and optimal value. Implementations with
    /// structure may override this with a cancellation-free formula.
    fn gap(&self, x: &RealVector, _minimizer: &RealVector, optimal_value: f64) -> f64 {
        self.value(x) - optimal_value
    }
}

/// A strongly convex, L-smooth objective together with its constants.
#[derive(Clone)]
pub struct SmoothObjective {
    func: Arc<dyn Objective>,
    mu: f64,
    lip: f64,
    minimizer: Option<RealVector>,
    optimal_value: Option<f64>,
}

impl fmt::Debug for SmoothObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothObjective")
            .field("dimension", &self.dimension())
            .field("mu", &self.mu)
            .field("lip", &self.lip)
            .field("optimal_value", &self.optimal_value)
            .finish()
    }
}

impl SmoothObjective {
    pub fn new(func: Arc<dyn Objective>, mu: f64, lip: f64) -> Result<Self> {
        if func.dim() == 0 {
            return Err(Error::invalid("objective dimension must be positive"));
        }
        validate_constants(mu, lip)?;
        Ok(Self {
            func,
            mu,
            lip,
            minimizer: None,
            optimal_value: None,
        })
    }

    pub fn with_minimizer(mut self, x: RealVector) -> Result<Self> {
        check_dim(self.dimension(), x.dim())?;
        let g = self.func.gradient(&x).norm();
        let bound = SOLUTION_TOL * (1.0 + x.norm());
        if g > bound {
            return Err(Error::invalid(format!(
                "claimed minimizer has gradient norm {g:e} > {bound:e}"
            )));
        }
        self.optimal_value = Some(self.func.value(&x));
        self.minimizer = Some(x);
        Ok(self)
    }

    pub fn with_lip(mut self, lip: f64) -> Result<Self> {
        validate_constants(self.mu, lip)?;
        self.lip = lip;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.func.dim()
    }

    pub fn value(&self, x: &RealVector) -> f64 {
        self.func.value(x)
    }

    pub fn gradient(&self, x: &RealVector) -> RealVector {
        self.func.gradient(x)
    }

    pub fn function(&self) -> &Arc<dyn Objective> {
        &self.func
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn sigma(&self) -> f64 {
        self.mu / self.lip
    }

    pub fn minimizer(&self) -> Option<&RealVector> {
        self.minimizer.as_ref()
    }

    pub fn optimal_value(&self) -> Option<f64> {
        self.optimal_value
    }

    /// f(x) − f* when the minimizer is known.
    pub fn gap(&self, x: &RealVector) -> Option<f64> {
        let xs = self.minimizer.as_ref()?;
        Some(self.func.gap(x, xs, self.optimal_value?))
    }

    /// The gradient field as an unconstrained VI with the same (μ, L).
    pub fn as_gradient_problem(&self) -> MonotoneProblem {
        let op: Arc<dyn Operator> = Arc::new(GradientOperator(self.func.clone()));
        let p = MonotoneProblem {
            operator: op,
            set: FeasibleSet::WholeSpace,
            mu: self.mu,
            lip: self.lip,
            solution: None,
            domain_restricted: false,
        };
        match &self.minimizer {
            Some(x) => MonotoneProblem {
                solution: Some(x.clone()),
                ..p
            },
            None => p,
        }
    }
}

struct GradientOperator(Arc<dyn Objective>);

impl Operator for GradientOperator {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, z: &RealVector) -> RealVector {
        self.0.gradient(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> RealVector {
        RealVector::new(x.to_vec()).unwrap()
    }

    fn identity_shift(n: usize, shift: f64) -> Arc<dyn Operator> {
        Arc::new(FnOperator::new(n, move |z: &RealVector| z.map(|x| x - shift)))
    }

    #[test]
    fn natural_residual_examples() {
        let p = MonotoneProblem::new(identity_shift(1, 0.0), FeasibleSet::WholeSpace, 1.0, 1.0).unwrap();
        assert_eq!(natural_residual(&p, &v(&[2.0])).unwrap(), 2.0);

        // F(z) = z - 1 on the orthant, z = 0: ‖0 − max(0, 0 + 1)‖ = 1.
        let p = MonotoneProblem::new(identity_shift(1, 1.0), FeasibleSet::NonnegativeOrthant, 1.0, 1.0)
            .unwrap();
        assert_eq!(natural_residual(&p, &v(&[0.0])).unwrap(), 1.0);

        let p = p.with_solution(v(&[1.0])).unwrap();
        assert!(natural_residual(&p, p.solution().unwrap()).unwrap() <= 1e-9);
    }

    #[test]
    fn derived_constants() {
        let p = MonotoneProblem::new(identity_shift(2, 0.0), FeasibleSet::WholeSpace, 0.5, 2.0).unwrap();
        assert_eq!(p.sigma(), 0.25);
        assert_eq!(p.kappa(), 4.0);
    }

    #[test]
    fn rejects_bad_constants_and_solutions() {
        let op = identity_shift(1, 0.0);
        assert!(MonotoneProblem::new(op.clone(), FeasibleSet::WholeSpace, 0.0, 1.0).is_err());
        assert!(MonotoneProblem::new(op.clone(), FeasibleSet::WholeSpace, 2.0, 1.0).is_err());
        let p = MonotoneProblem::new(op, FeasibleSet::WholeSpace, 1.0, 1.0).unwrap();
        assert!(p.with_solution(v(&[0.1])).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = MonotoneProblem::new(identity_shift(2, 0.0), FeasibleSet::WholeSpace, 1.0, 1.0).unwrap();
        assert!(matches!(
            natural_residual(&p, &v(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
