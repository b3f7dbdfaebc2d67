use crate::error::{check_dim, Error, Result};
use crate::problem::MonotoneProblem;
use crate::vector::RealVector;

/// Parameters (α, β, γ, η, τ) of the extra-point update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub tau: f64,
}

impl ViParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, eta: f64, tau: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            gamma,
            eta,
            tau,
        };
        for (name, v) in p.named() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(p)
    }

    pub fn vanilla(alpha: f64) -> Self {
        Self::unchecked(alpha, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn heavy_ball(alpha: f64, gamma: f64) -> Self {
        Self::unchecked(alpha, 0.0, gamma, 0.0, 0.0)
    }

    pub fn extragradient(alpha: f64, eta: f64) -> Self {
        Self::unchecked(alpha, 0.0, 0.0, eta, 0.0)
    }

    /// Nesterov's method uses the same momentum in both half-steps (γ = β).
    pub fn nesterov(alpha: f64, beta: f64) -> Self {
        Self::unchecked(alpha, beta, beta, 0.0, 0.0)
    }

    pub fn ogda(alpha: f64, tau: f64) -> Self {
        Self::unchecked(alpha, 0.0, 0.0, 0.0, tau)
    }

    fn unchecked(alpha: f64, beta: f64, gamma: f64, eta: f64, tau: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            eta,
            tau,
        }
    }

    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("tau", self.tau),
        ]
    }
}

/// Current and previous iterate with their cached operator values.
#[derive(Clone, Debug, PartialEq)]
pub struct ViState {
    pub z_curr: RealVector,
    pub z_prev: RealVector,
    pub f_curr: RealVector,
    pub f_prev: RealVector,
    pub k: usize,
}

impl ViState {
    /// Initial state with `z⁻¹ = z⁰`, so momentum and optimism vanish at the first step.
    pub fn new(problem: &MonotoneProblem, z0: &RealVector) -> Result<Self> {
        Self::with_history(problem, z0, z0)
    }

    pub fn with_history(problem: &MonotoneProblem, z_curr: &RealVector, z_prev: &RealVector) -> Result<Self> {
        check_dim(problem.dimension(), z_curr.dim())?;
        check_dim(problem.dimension(), z_prev.dim())?;
        if problem.domain_restricted() {
            for z in [z_curr, z_prev] {
                if !problem.set().contains(z, 0.0) {
                    return Err(Error::invalid(
                        "starting point must be feasible when the operator is domain-restricted",
                    ));
                }
            }
        }
        let f_curr = problem.eval(z_curr);
        let f_prev = if z_prev == z_curr {
            f_curr.clone()
        } else {
            problem.eval(z_prev)
        };
        Ok(Self {
            z_curr: z_curr.clone(),
            z_prev: z_prev.clone(),
            f_curr,
            f_prev,
            k: 0,
        })
    }

    fn advance(&self, problem: &MonotoneProblem, z_next: RealVector) -> Self {
        let f_next = problem.eval(&z_next);
        Self {
            z_prev: self.z_curr.clone(),
            f_prev: self.f_curr.clone(),
            z_curr: z_next,
            f_curr: f_next,
            k: self.k + 1,
        }
    }

    fn momentum(&self) -> RealVector {
        &self.z_curr - &self.z_prev
    }

    fn optimism(&self) -> RealVector {
        &self.f_curr - &self.f_prev
    }
}

fn require_restricted(problem: &MonotoneProblem, restricted: bool) -> Result<()> {
    if problem.domain_restricted() && !restricted {
        return Err(Error::invalid(
            "operator is only defined on the feasible set; use the restricted variant",
        ));
    }
    Ok(())
}

/// `z⁺ = P(z − αF(z))`
pub fn step_vanilla(problem: &MonotoneProblem, state: &ViState, alpha: f64) -> ViState {
    let z = state.z_curr.axpy(-alpha, &state.f_curr);
    state.advance(problem, problem.project(&z))
}

/// Half-step `z − ηF(z)` (projected when `restricted`), then `z⁺ = P(z − αF(half))`.
pub fn step_extragradient(
    problem: &MonotoneProblem,
    state: &ViState,
    alpha: f64,
    eta: f64,
    restricted: bool,
) -> Result<ViState> {
    require_restricted(problem, restricted)?;
    let mut half = state.z_curr.axpy(-eta, &state.f_curr);
    if restricted {
        half = problem.project(&half);
    }
    let f_half = problem.eval(&half);
    let z = state.z_curr.axpy(-alpha, &f_half);
    Ok(state.advance(problem, problem.project(&z)))
}

/// `z⁺ = P(z − αF(z) − τ(F(z) − F(z⁻)))`
pub fn step_ogda(problem: &MonotoneProblem, state: &ViState, alpha: f64, tau: f64) -> ViState {
    let z = state
        .z_curr
        .axpy(-alpha, &state.f_curr)
        .axpy(-tau, &state.optimism());
    state.advance(problem, problem.project(&z))
}

/// `z⁺ = P(z − αF(z) + γ(z − z⁻))`
pub fn step_heavy_ball(problem: &MonotoneProblem, state: &ViState, alpha: f64, gamma: f64) -> ViState {
    let z = state
        .z_curr
        .axpy(-alpha, &state.f_curr)
        .axpy(gamma, &state.momentum());
    state.advance(problem, problem.project(&z))
}

/// Half-point `z + β(z − z⁻)`, then `z⁺ = P(z − αF(half) + β(z − z⁻))`.
pub fn step_nesterov(problem: &MonotoneProblem, state: &ViState, alpha: f64, beta: f64) -> ViState {
    let m = state.momentum();
    let half = state.z_curr.axpy(beta, &m);
    let f_half = problem.eval(&half);
    let z = state.z_curr.axpy(-alpha, &f_half).axpy(beta, &m);
    state.advance(problem, problem.project(&z))
}

/// One extra-point step together with its half-point.
#[derive(Clone, Debug)]
pub struct ExtraPointStep {
    pub state: ViState,
    pub half: RealVector,
    pub f_half: RealVector,
}

/// The general update:
///
/// ```text
/// half = z + β(z − z⁻) − ηF(z)          (projected when restricted)
/// z⁺   = P(z − αF(half) + γ(z − z⁻) − τ(F(z) − F(z⁻)))
/// ```
pub fn step_extra_point(
    problem: &MonotoneProblem,
    state: &ViState,
    params: &ViParams,
    restricted: bool,
) -> Result<ViState> {
    Ok(step_extra_point_with_half(problem, state, params, restricted)?.state)
}

pub fn step_extra_point_with_half(
    problem: &MonotoneProblem,
    state: &ViState,
    params: &ViParams,
    restricted: bool,
) -> Result<ExtraPointStep> {
    require_restricted(problem, restricted)?;
    let ViParams {
        alpha,
        beta,
        gamma,
        eta,
        tau,
    } = *params;
    let m = state.momentum();
    let mut half = state.z_curr.axpy(beta, &m).axpy(-eta, &state.f_curr);
    if restricted {
        half = problem.project(&half);
    }
    let f_half = if half == state.z_curr {
        state.f_curr.clone()
    } else {
        problem.eval(&half)
    };
    let z = state
        .z_curr
        .axpy(-alpha, &f_half)
        .axpy(gamma, &m)
        .axpy(-tau, &state.optimism());
    Ok(ExtraPointStep {
        state: state.advance(problem, problem.project(&z)),
        half,
        f_half,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::problem::FnOperator;
    use crate::sets::FeasibleSet;

    fn v(x: f64) -> RealVector {
        RealVector::new(vec![x]).unwrap()
    }

    fn shifted(shift: f64, set: FeasibleSet) -> MonotoneProblem {
        let op = Arc::new(FnOperator::new(1, move |z: &RealVector| z.map(|x| x - shift)));
        MonotoneProblem::new(op, set, 1.0, 1.0).unwrap()
    }

    fn identity() -> MonotoneProblem {
        shifted(0.0, FeasibleSet::WholeSpace)
    }

    #[test]
    fn vanilla_examples() {
        let p = identity();
        let s = ViState::new(&p, &v(1.0)).unwrap();
        assert_eq!(step_vanilla(&p, &s, 0.5).z_curr, v(0.5));

        let p = shifted(2.0, FeasibleSet::NonnegativeOrthant);
        let s = ViState::new(&p, &v(0.0)).unwrap();
        assert_eq!(step_vanilla(&p, &s, 1.0).z_curr, v(2.0));
    }

    #[test]
    fn extragradient_example() {
        let p = identity();
        let s = ViState::new(&p, &v(1.0)).unwrap();
        let next = step_extragradient(&p, &s, 0.25, 0.25, false).unwrap();
        assert_eq!(next.z_curr, v(13.0 / 16.0));
    }

    #[test]
    fn two_history_examples() {
        let p = identity();
        let s = ViState::with_history(&p, &v(1.0), &v(2.0)).unwrap();
        assert_eq!(step_ogda(&p, &s, 0.5, 0.25).z_curr, v(0.75));

        let s = ViState::with_history(&p, &v(1.0), &v(0.0)).unwrap();
        assert!((step_heavy_ball(&p, &s, 0.5, 0.1).z_curr[0] - 0.6).abs() < 1e-15);
        assert!((step_nesterov(&p, &s, 0.5, 0.2).z_curr[0] - 0.6).abs() < 1e-15);

        let params = ViParams::new(0.25, 0.1, 0.1, 0.25, 0.05).unwrap();
        let step = step_extra_point_with_half(&p, &s, &params, false).unwrap();
        assert!((step.half[0] - 0.85).abs() < 1e-15);
        assert!((step.state.z_curr[0] - 0.8375).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_is_preserved() {
        let p = shifted(3.0, FeasibleSet::WholeSpace);
        let s = ViState::new(&p, &v(3.0)).unwrap();
        let params = ViParams::new(0.3, 0.2, 0.1, 0.2, 0.05).unwrap();
        assert_eq!(step_extra_point(&p, &s, &params, false).unwrap().z_curr, v(3.0));
        assert_eq!(step_ogda(&p, &s, 0.3, 0.1).z_curr, v(3.0));
    }

    #[test]
    fn cached_values_are_fresh() {
        let p = shifted(1.0, FeasibleSet::NonnegativeOrthant);
        let mut s = ViState::new(&p, &v(4.0)).unwrap();
        let params = ViParams::new(0.3, 0.2, 0.1, 0.2, 0.05).unwrap();
        for _ in 0..10 {
            s = step_extra_point(&p, &s, &params, true).unwrap();
            assert_eq!(s.f_curr, p.eval(&s.z_curr));
            assert_eq!(s.f_prev, p.eval(&s.z_prev));
        }
    }

    #[test]
    fn restricted_operator_requires_restricted_step() {
        let p = shifted(1.0, FeasibleSet::NonnegativeOrthant).with_domain_restricted(true);
        let s = ViState::new(&p, &v(1.0)).unwrap();
        assert!(step_extragradient(&p, &s, 0.1, 0.1, false).is_err());
        assert!(ViState::new(&p, &v(-1.0)).is_err());
    }

    #[test]
    fn negative_parameters_rejected() {
        assert!(ViParams::new(0.1, -0.1, 0.0, 0.0, 0.0).is_err());
        assert!(ViParams::new(f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
    }
}
