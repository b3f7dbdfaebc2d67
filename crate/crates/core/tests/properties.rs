use nalgebra::DMatrix;
use proptest::prelude::*;
use vi_accel::certify::{
    certify_opt, certify_vi_restricted, certify_vi_unrestricted, default_opt_params, default_vi_params,
    theta_interval, Regime,
};
use vi_accel::problems::{gen_linear_vi, LinearOperatorSpec, ProblemInstance};
use vi_accel::solvers::{
    run, step_extra_point, step_extragradient, step_heavy_ball, step_nesterov, step_ogda, step_vanilla, Method,
    RunOptions, StopCriteria, ViParams, ViState,
};
use vi_accel::{project, FeasibleSet, RealVector};

fn vec_of(n: usize) -> impl Strategy<Value = RealVector> {
    prop::collection::vec(-10.0..10.0f64, n).prop_map(|v| RealVector::new(v).unwrap())
}

fn pair(n: usize) -> impl Strategy<Value = (RealVector, RealVector)> {
    (vec_of(n), vec_of(n))
}

fn sets(n: usize) -> Vec<FeasibleSet> {
    vec![
        FeasibleSet::WholeSpace,
        FeasibleSet::NonnegativeOrthant,
        FeasibleSet::boxed(RealVector::from_element(n, -1.0), RealVector::from_element(n, 3.0)).unwrap(),
        FeasibleSet::ball(RealVector::from_element(n, 0.5), 2.0).unwrap(),
    ]
}

proptest! {
    #[test]
    fn projection_is_nonexpansive_and_cocoercive((x, y) in pair(5)) {
        for set in sets(5) {
            let (px, py) = (project(&set, &x).unwrap(), project(&set, &y).unwrap());
            let dp = &px - &py;
            let dz = &x - &y;
            let tol = 1e-12 * (1.0 + dz.norm_sq());
            prop_assert!(dp.norm_sq() <= dz.norm_sq() + tol);
            prop_assert!(dp.norm_sq() <= dp.dot(&dz) + tol);
        }
    }

    #[test]
    fn projection_is_idempotent_and_lands_in_set(x in vec_of(5)) {
        for set in sets(5) {
            let p = project(&set, &x).unwrap();
            prop_assert!(set.contains(&p, 1e-12));
            let pp = project(&set, &p).unwrap();
            prop_assert!(pp.dist(&p) <= 1e-12 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn extra_point_reduces_to_classical_steps(
        seed in 0u64..1000,
        constrained in any::<bool>(),
        a in 0.001..0.05f64,
        b in 0.0..0.5f64,
        e in 0.001..0.05f64,
        t in 0.0..0.02f64,
    ) {
        let (p, _) = gen_linear_vi(6, seed, 0.05, constrained).unwrap();
        let z0 = p.project(&RealVector::from_element(6, 1.0));
        let z1 = p.project(&RealVector::new(vec![0.5, -0.2, 1.3, 0.0, 2.0, -1.0]).unwrap());
        let s = ViState::with_history(&p, &z1, &z0).unwrap();
        let pairs = [
            (ViParams::vanilla(a), step_vanilla(&p, &s, a)),
            (ViParams::heavy_ball(a, b), step_heavy_ball(&p, &s, a, b)),
            (ViParams::ogda(a, t), step_ogda(&p, &s, a, t)),
            (ViParams::extragradient(a, e), step_extragradient(&p, &s, a, e, false).unwrap()),
            (ViParams::nesterov(a, b), step_nesterov(&p, &s, a, b)),
        ];
        for (params, expected) in pairs {
            let got = step_extra_point(&p, &s, &params, false).unwrap();
            let scale = 1.0 + expected.z_curr.norm();
            prop_assert!(got.z_curr.dist(&expected.z_curr) <= 1e-12 * scale);
        }
    }

    #[test]
    fn runs_are_deterministic(seed in 0u64..500, restricted in any::<bool>()) {
        let (p, _) = gen_linear_vi(5, seed, 0.1, restricted).unwrap();
        let params = default_vi_params(Regime::ViRestricted, p.mu(), p.lip()).unwrap();
        let opts = RunOptions::new(StopCriteria { max_iter: 50, residual_tol: 0.0 });
        let z0 = RealVector::from_element(5, 1.0);
        let m = Method::ExtraPoint { restricted };
        let t1 = run(&p, m, &params, &z0, &opts).unwrap();
        let t2 = run(&p, m, &params, &z0, &opts).unwrap();
        prop_assert!(t1.same_values(&t2));
        prop_assert!(t1.records.windows(2).all(|w| w[0].k < w[1].k));
    }

    #[test]
    fn contraction_constant_decreases_with_tau_and_gamma(
        kappa in 1.0..1e4f64,
        tau_frac in 0.0..1.0f64,
        bump in 1e-6..1e-3f64,
    ) {
        let (mu, l) = (1.0, kappa);
        let sigma = mu / l;
        let base = default_vi_params(Regime::ViRestricted, mu, l).unwrap();
        let q = ViParams { tau: tau_frac * sigma / (64.0 * l), ..base };
        let a0 = certify_vi_restricted(mu, l, &q).unwrap().a;
        let more_tau = ViParams { tau: q.tau + bump * sigma / l, ..q };
        let more_gamma = ViParams { gamma: q.gamma + bump * sigma, ..q };
        prop_assert!(certify_vi_restricted(mu, l, &more_tau).unwrap().a < a0);
        prop_assert!(certify_vi_restricted(mu, l, &more_gamma).unwrap().a < a0);

        let u = default_vi_params(Regime::ViUnrestricted, mu, l).unwrap();
        let au = certify_vi_unrestricted(mu, l, &u).unwrap().a;
        let u_tau = ViParams { tau: u.tau * (1.0 + bump), ..u };
        prop_assert!(certify_vi_unrestricted(mu, l, &u_tau).unwrap().a < au);
    }

    #[test]
    fn theta_interval_satisfies_defining_inequality(a in 1e-4..0.99f64, frac in 0.0..0.999f64, s in 0.0..=1.0f64) {
        let b = frac * a;
        if let Ok((lo, hi)) = theta_interval(a, b) {
            prop_assert!(lo <= hi);
            let theta = lo + s * (hi - lo);
            prop_assert!(b <= theta * (1.0 - (a - theta)) * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn spectral_norm_dominates_the_diagonal(
        d in prop::collection::vec(0.01..10.0f64, 2..5),
        upper in prop::collection::vec(-20.0..20.0f64, 10),
    ) {
        let n = d.len();
        let mut a = DMatrix::zeros(n, n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap();
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        let max = d.iter().cloned().fold(0.0, f64::max);
        let spec = LinearOperatorSpec::new(RealVector::new(d).unwrap(), a, RealVector::zeros(n)).unwrap();
        prop_assert!(spec.lip() >= max * (1.0 - 1e-12));
    }

    #[test]
    fn instance_text_round_trips(seed in 0u64..200, n in 2usize..6, constrained in any::<bool>()) {
        let inst = ProblemInstance::linear_vi(n, seed, 0.1, constrained).unwrap();
        prop_assert_eq!(ProblemInstance::parse(&inst.to_text()).unwrap(), inst);
        let q = ProblemInstance::quadratic(n, seed, 0.1).unwrap();
        prop_assert_eq!(ProblemInstance::parse(&q.to_text()).unwrap(), q);
    }
}

#[test]
fn defaults_are_feasible_across_condition_numbers() {
    for kappa in [1.0, 10.0, 1e2, 1e3, 1e4] {
        for mu in [1e-3, 1.0, 7.5] {
            let l = mu * kappa;
            for regime in [Regime::ViUnrestricted, Regime::ViRestricted] {
                let p = default_vi_params(regime, mu, l).unwrap();
                let cert = match regime {
                    Regime::ViUnrestricted => certify_vi_unrestricted(mu, l, &p),
                    _ => certify_vi_restricted(mu, l, &p),
                }
                .unwrap();
                assert!(cert.feasible, "{} at kappa {kappa}: {:?}", regime.name(), cert.violated);
                assert!(cert.rate < 1.0 && cert.rate > 0.0);
            }
            let cert = certify_opt(mu, l, &default_opt_params(mu, l, None).unwrap()).unwrap();
            assert!(cert.feasible, "opt at kappa {kappa}: {:?}", cert.violated);
            assert!((cert.rate - (1.0 - (mu / l).sqrt())).abs() < 1e-12);
        }
    }
}
