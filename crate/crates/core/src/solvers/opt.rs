use crate::error::{check_dim, Error, Result};
use crate::problem::SmoothObjective;
use crate::vector::RealVector;

/// Parameters of the optimization extra-point scheme.
///
/// `t[0..9]` are t₁…t₉. `theta` and `c` define the potential
/// `f(x) − f* + C‖v − x*‖²` and its contraction `1 − θ`; `delta` is the
/// extra-gradient fraction t₃ of the standard choice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptParams {
    pub t: [f64; 9],
    pub theta: f64,
    pub c: f64,
    pub delta: f64,
}

impl OptParams {
    /// Accepts any finite nonnegative values; structural conditions are left to
    /// [`OptParams::check_invariants`] and the certificate.
    pub fn new(t: [f64; 9], theta: f64, c: f64, delta: f64) -> Result<Self> {
        for (i, v) in t.iter().enumerate() {
            if !(*v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("t{} must be finite and nonnegative", i + 1)));
            }
        }
        for (name, v) in [("theta", theta), ("c", c), ("delta", delta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be finite and nonnegative")));
            }
        }
        Ok(Self { t, theta, c, delta })
    }

    /// `t₇ + t₈ = 1` (relative tolerance 1e-12) and `t₃ < 1`.
    pub fn check_invariants(&self) -> Result<()> {
        let sum = self.t[6] + self.t[7];
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("t7 + t8 must equal 1, got {sum}")));
        }
        if self.t[2] >= 1.0 {
            return Err(Error::invalid("t3 must be below 1"));
        }
        Ok(())
    }
}

/// Choice of the point `y` with `∇f(y)ᵀ(p − y) ≤ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YRule {
    /// `y = p`
    YEqualsP,
    /// `y = p − ∇f(p)/L`
    YGradStep,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptState {
    pub x_curr: RealVector,
    pub v_curr: RealVector,
    pub k: usize,
}

impl OptState {
    /// Starts with `v⁰ = x⁰`.
    pub fn new(objective: &SmoothObjective, x0: &RealVector) -> Result<Self> {
        check_dim(objective.dimension(), x0.dim())?;
        Ok(Self {
            x_curr: x0.clone(),
            v_curr: x0.clone(),
            k: 0,
        })
    }

    pub fn with_v(objective: &SmoothObjective, x: &RealVector, v: &RealVector) -> Result<Self> {
        check_dim(objective.dimension(), x.dim())?;
        check_dim(objective.dimension(), v.dim())?;
        Ok(Self {
            x_curr: x.clone(),
            v_curr: v.clone(),
            k: 0,
        })
    }
}

/// ```text
/// p  = t₁x + t₂v
/// y  = p  or  p − ∇f(p)/L
/// z  = y − (t₃/L)∇f(y)
/// x⁺ = y − (t₄/L)∇f(z) − (t₅/L)(∇f(z) − ∇f(y)) + t₆(z − y)
/// v⁺ = t₇v + t₈y − t₉∇f(y)
/// ```
pub fn step_opt_extra_point(
    objective: &SmoothObjective,
    state: &OptState,
    params: &OptParams,
    y_rule: YRule,
) -> OptState {
    let [t1, t2, t3, t4, t5, t6, t7, t8, t9] = params.t;
    let l = objective.lip();
    let p = (&state.x_curr * t1).axpy(t2, &state.v_curr);
    let (y, gy) = match y_rule {
        YRule::YEqualsP => {
            let g = objective.gradient(&p);
            (p, g)
        }
        YRule::YGradStep => {
            let y = p.axpy(-1.0 / l, &objective.gradient(&p));
            let g = objective.gradient(&y);
            (y, g)
        }
    };
    let z = y.axpy(-t3 / l, &gy);
    let gz = objective.gradient(&z);
    let x_next = y
        .axpy(-t4 / l, &gz)
        .axpy(-t5 / l, &(&gz - &gy))
        .axpy(t6, &(&z - &y));
    let v_next = (&state.v_curr * t7).axpy(t8, &y).axpy(-t9, &gy);
    OptState {
        x_curr: x_next,
        v_curr: v_next,
        k: state.k + 1,
    }
}

/// The same scheme written directly in terms of θ and δ for the standard
/// parameter choice with `y = p`:
///
/// ```text
/// y  = (x + θv)/(1 + θ)
/// z  = y − (δ/L)∇f(y)
/// x⁺ = y − (1−δ)/((1+δ)²L)·∇f(z) − 1/((1+δ)²L)·(∇f(z) − ∇f(y)) + 3/(1+δ)²·(z − y)
/// v⁺ = (1−θ)v + θ(μδ − L)/(μδ)·y + θL/(μδ)·z
/// ```
pub fn step_opt_extra_point_simplified(
    objective: &SmoothObjective,
    state: &OptState,
    theta: f64,
    delta: f64,
) -> OptState {
    let (mu, l) = (objective.mu(), objective.lip());
    let y = &state.x_curr.axpy(theta, &state.v_curr) * (1.0 / (1.0 + theta));
    let gy = objective.gradient(&y);
    let z = y.axpy(-delta / l, &gy);
    let gz = objective.gradient(&z);
    let d2 = (1.0 + delta) * (1.0 + delta);
    let x_next = y
        .axpy(-(1.0 - delta) / (d2 * l), &gz)
        .axpy(-1.0 / (d2 * l), &(&gz - &gy))
        .axpy(3.0 / d2, &(&z - &y));
    let v_next = (&state.v_curr * (1.0 - theta))
        .axpy(theta * (mu * delta - l) / (mu * delta), &y)
        .axpy(theta * l / (mu * delta), &z);
    OptState {
        x_curr: x_next,
        v_curr: v_next,
        k: state.k + 1,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::problem::Objective;

    struct HalfSquare;

    impl Objective for HalfSquare {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &RealVector) -> f64 {
            0.5 * x.norm_sq()
        }
        fn gradient(&self, x: &RealVector) -> RealVector {
            x.clone()
        }
    }

    fn standard(mu: f64, l: f64, delta: f64) -> OptParams {
        let th = (mu / l).sqrt();
        let d2 = (1.0 + delta) * (1.0 + delta);
        OptParams::new(
            [
                1.0 / (1.0 + th),
                th / (1.0 + th),
                delta,
                (1.0 - delta) / d2,
                1.0 / d2,
                3.0 / d2,
                1.0 - th,
                th,
                1.0 / (mu * l).sqrt(),
            ],
            th,
            mu / 2.0,
            delta,
        )
        .unwrap()
    }

    #[test]
    fn one_dimensional_step_by_hand() {
        // f = x²/2, μ = L = 1, δ = 1/2, θ = 1, x = v = 1:
        // p = y = 1, z = 1/2, x⁺ = 1 − (2/9)(1/2) − (4/9)(−1/2) + (4/3)(−1/2) = 4/9,
        // v⁺ = 0·1 + 1·1 − 1·1 = 0.
        let f = SmoothObjective::new(Arc::new(HalfSquare), 1.0, 1.0).unwrap();
        let s = OptState::new(&f, &RealVector::new(vec![1.0]).unwrap()).unwrap();
        let next = step_opt_extra_point(&f, &s, &standard(1.0, 1.0, 0.5), YRule::YEqualsP);
        assert!((next.x_curr[0] - 4.0 / 9.0).abs() < 1e-12);
        assert!(next.v_curr[0].abs() < 1e-12);
    }

    #[test]
    fn fixed_point() {
        let f = SmoothObjective::new(Arc::new(HalfSquare), 0.5, 2.0).unwrap();
        let s = OptState::new(&f, &RealVector::zeros(1)).unwrap();
        for rule in [YRule::YEqualsP, YRule::YGradStep] {
            let next = step_opt_extra_point(&f, &s, &standard(0.5, 2.0, 0.5), rule);
            assert_eq!(next.x_curr, s.x_curr);
            assert_eq!(next.v_curr, s.v_curr);
        }
    }

    #[test]
    fn invariant_checks() {
        let mut p = standard(1.0, 4.0, 0.5);
        assert!(p.check_invariants().is_ok());
        p.t[7] = 0.6;
        assert!(p.check_invariants().is_err());
        let mut p = standard(1.0, 4.0, 0.5);
        p.t[2] = 1.0;
        assert!(p.check_invariants().is_err());
    }
}
