use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::problem::{natural_residual, AffineOperator, MonotoneProblem, Operator};
use crate::sets::FeasibleSet;
use crate::solvers::{step_extragradient, ViState};
use crate::vector::RealVector;

use super::{check_sigma, pinned_log_uniform, rng};

/// `F(z) = Mz + q` with `M = diag(q_diag) + a_skew`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperatorSpec {
    pub m: DMatrix<f64>,
    pub q: RealVector,
    pub q_diag: RealVector,
    pub a_skew: DMatrix<f64>,
}

impl LinearOperatorSpec {
    /// Assembles `m` from its parts. Fails unless `a_skew` is exactly skew-symmetric
    /// and `q_diag` is strictly positive.
    pub fn new(q_diag: RealVector, a_skew: DMatrix<f64>, q: RealVector) -> Result<Self> {
        let n = q_diag.dim();
        check_dim(n, q.dim())?;
        if a_skew.nrows() != n || a_skew.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a_skew.nrows(),
            });
        }
        if a_skew != -a_skew.transpose() {
            return Err(Error::invalid("a_skew must be skew-symmetric"));
        }
        if q_diag.iter().any(|&d| d <= 0.0) {
            return Err(Error::invalid("q_diag entries must be positive"));
        }
        let mut m = a_skew.clone();
        for i in 0..n {
            m[(i, i)] += q_diag[i];
        }
        Ok(Self { m, q, q_diag, a_skew })
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    /// Strong monotonicity modulus: the skew part does not contribute to zᵀMz.
    pub fn mu(&self) -> f64 {
        self.q_diag.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Exact spectral norm of `m`.
    pub fn lip(&self) -> f64 {
        spectral_norm(&self.m)
    }

    pub fn operator(&self) -> AffineOperator {
        AffineOperator {
            m: self.m.clone(),
            q: self.q.as_dvector().clone(),
        }
    }

    /// The VI over ℝⁿ or ℝⁿ₊ without a solution attached.
    pub fn problem(&self, constrained: bool) -> Result<MonotoneProblem> {
        let set = if constrained {
            FeasibleSet::NonnegativeOrthant
        } else {
            FeasibleSet::WholeSpace
        };
        MonotoneProblem::new(Arc::new(self.operator()), set, self.mu(), self.lip())
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Draws the diagonal, skew part and offset of a linear operator.
///
/// The diagonal is log-uniform with its extremes pinned at
/// `[2‖A‖₂·target_sigma, 2‖A‖₂]`, which puts `min Q / ‖M‖₂` close to (slightly
/// below) `target_sigma`.
pub fn gen_linear_vi_spec(n: usize, seed: u64, target_sigma: f64) -> Result<LinearOperatorSpec> {
    if n < 2 {
        return Err(Error::invalid("linear VI needs n >= 2"));
    }
    check_sigma(target_sigma)?;
    let mut r = rng(seed);
    let unit = pinned_log_uniform(&mut r, n, target_sigma, 1.0);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = r.random_range(-1.0..=1.0);
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    let q: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..=1.0)).collect();
    let scale = 2.0 * spectral_norm(&a).max(0.5);
    let q_diag: Vec<f64> = unit.iter().map(|u| u * scale).collect();
    LinearOperatorSpec::new(RealVector::new(q_diag)?, a, RealVector::new(q)?)
}

/// Generates a linear VI (equation system or LCP) with its reference solution attached.
pub fn gen_linear_vi(
    n: usize,
    seed: u64,
    target_sigma: f64,
    constrained: bool,
) -> Result<(MonotoneProblem, LinearOperatorSpec)> {
    let spec = gen_linear_vi_spec(n, seed, target_sigma)?;
    let set = if constrained {
        FeasibleSet::NonnegativeOrthant
    } else {
        FeasibleSet::WholeSpace
    };
    let z = solve_linear_reference(&spec, &set)?;
    let problem = spec.problem(constrained)?.with_solution(z)?;
    Ok((problem, spec))
}

const LCP_MAX_ITER: usize = 1_000_000;
const LCP_TOL: f64 = 1e-12;

/// Reference solution of `Mz + q = 0` (whole space) or of the LCP
/// `z ≥ 0, Mz + q ≥ 0, zᵀ(Mz + q) = 0` (orthant).
///
/// The LCP is solved by the restricted extra-gradient method with step
/// `1/(4L)`, followed by an exact solve on the detected support. The result is
/// accepted only if it passes a direct complementarity check.
pub fn solve_linear_reference(spec: &LinearOperatorSpec, set: &FeasibleSet) -> Result<RealVector> {
    match set {
        FeasibleSet::WholeSpace => {
            let rhs = -spec.q.as_dvector();
            let z = spec
                .m
                .clone()
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::ReferenceFailure("singular operator matrix".into()))?;
            RealVector::from_dvector(z).map_err(|e| Error::ReferenceFailure(e.to_string()))
        }
        FeasibleSet::NonnegativeOrthant => solve_lcp(spec),
        _ => Err(Error::invalid(
            "reference solutions exist only for whole-space and orthant sets",
        )),
    }
}

fn solve_lcp(spec: &LinearOperatorSpec) -> Result<RealVector> {
    let problem = spec.problem(true)?;
    let step = 1.0 / (4.0 * problem.lip());
    let mut state = ViState::new(&problem, &RealVector::zeros(spec.dim()))?;
    let mut residual = natural_residual(&problem, &state.z_curr)?;
    let mut iters = 0;
    while residual > LCP_TOL {
        if iters >= LCP_MAX_ITER {
            return Err(Error::ReferenceFailure(format!(
                "LCP solve stalled at residual {residual:e} after {iters} iterations"
            )));
        }
        state = step_extragradient(&problem, &state, step, step, true)?;
        if !state.z_curr.is_finite() {
            return Err(Error::ReferenceFailure("LCP iterate became non-finite".into()));
        }
        residual = natural_residual(&problem, &state.z_curr)?;
        iters += 1;
    }
    let mut z = state.z_curr;
    if let Some(p) = polish_on_support(spec, &z) {
        if natural_residual(&problem, &p)? <= residual {
            z = p;
        }
    }
    verify_lcp(spec, &z)?;
    Ok(z)
}

/// Solves `M_FF z_F = −q_F` on the free set `F = {i : z_i > 0}` with `z = 0` elsewhere.
fn polish_on_support(spec: &LinearOperatorSpec, z: &RealVector) -> Option<RealVector> {
    let free: Vec<usize> = (0..z.dim()).filter(|&i| z[i] > 0.0).collect();
    let mut out = vec![0.0; z.dim()];
    if !free.is_empty() {
        let k = free.len();
        let m_ff = DMatrix::from_fn(k, k, |i, j| spec.m[(free[i], free[j])]);
        let rhs = DVector::from_fn(k, |i, _| -spec.q[free[i]]);
        let sol = m_ff.lu().solve(&rhs)?;
        for (i, &idx) in free.iter().enumerate() {
            if sol[i] < 0.0 {
                return None;
            }
            out[idx] = sol[i];
        }
    }
    RealVector::new(out).ok()
}

fn verify_lcp(spec: &LinearOperatorSpec, z: &RealVector) -> Result<()> {
    let w = spec.operator().apply(z);
    let tol = 1e-9 * (1.0 + z.norm());
    let nonneg = z.iter().all(|&v| v >= 0.0);
    let dual = w.iter().all(|&v| v >= -tol);
    let comp = z.dot(&w).abs() <= tol;
    if nonneg && dual && comp {
        Ok(())
    } else {
        Err(Error::ReferenceFailure(format!(
            "complementarity check failed (z >= 0: {nonneg}, Mz+q >= 0: {dual}, z'(Mz+q) = 0: {comp})"
        )))
    }
}
