//! Fixed instances shared by the criterion benches.

use vi_accel::certify::{default_opt_params, default_vi_params, Regime};
use vi_accel::problems::{gen_linear_vi, gen_quadratic};
use vi_accel::solvers::{Method, ViState};
use vi_accel::{MonotoneProblem, OptParams, RealVector, SmoothObjective, ViParams};

pub const SEED: u64 = 2024;

/// Linear VI of dimension `n` with σ ≈ 1e-2.
pub fn linear_instance(n: usize, constrained: bool) -> MonotoneProblem {
    gen_linear_vi(n, SEED, 1e-2, constrained).expect("generator accepts these sizes").0
}

pub fn quadratic_instance(n: usize) -> SmoothObjective {
    gen_quadratic(n, SEED, 2.4e-3).expect("generator accepts these sizes")
}

/// Every VI method with certified or classical default step sizes for `p`.
pub fn vi_methods(p: &MonotoneProblem) -> Vec<(Method, ViParams)> {
    let (mu, l) = (p.mu(), p.lip());
    let step = 1.0 / (4.0 * l);
    let restricted = !p.set().is_whole_space();
    let regime = if restricted { Regime::ViRestricted } else { Regime::ViUnrestricted };
    vec![
        (Method::Vanilla, ViParams::vanilla(mu / (l * l))),
        (Method::ExtraGradient { restricted }, ViParams::extragradient(step, step)),
        (Method::Ogda, ViParams::ogda(step, step / (1.0 + mu / l))),
        (Method::HeavyBall, ViParams::heavy_ball(step, 0.1)),
        (Method::Nesterov, ViParams::nesterov(step, 0.1)),
        (
            Method::ExtraPoint { restricted },
            default_vi_params(regime, mu, l).expect("valid constants"),
        ),
    ]
}

pub fn opt_params(f: &SmoothObjective) -> OptParams {
    default_opt_params(f.mu(), f.lip(), None).expect("valid constants")
}

/// A state a few steps away from the start, so history terms are nonzero.
pub fn warm_state(p: &MonotoneProblem) -> ViState {
    let n = p.dimension();
    let z0 = p.project(&RealVector::from_element(n, 1.0));
    let z1 = p.project(&RealVector::from_element(n, 0.9));
    ViState::with_history(p, &z1, &z0).expect("dimensions match")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_and_methods_step() {
        let p = linear_instance(10, true);
        let s = warm_state(&p);
        for (m, params) in vi_methods(&p) {
            assert!(m.step(&p, &s, &params).unwrap().z_curr.is_finite());
        }
        opt_params(&quadratic_instance(10)).check_invariants().unwrap();
    }
}
