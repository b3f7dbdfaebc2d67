//! End-to-end acceptance criteria. Each test prints one PASS/FAIL line
//! (written past the test harness capture so it shows in plain `cargo test`).

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use vi_accel::certify::{
    self, certify_extragradient, certify_ogda, certify_opt, certify_vanilla, certify_vi_restricted,
    certify_vi_unrestricted, default_opt_params, default_vi_params, iteration_bound, Regime,
};
use vi_accel::harness::{check_contraction, finite_diff_grad, Termination};
use vi_accel::problems::{gen_linear_vi, gen_linear_vi_spec, gen_logistic, gen_quadratic, solve_linear_reference};
use vi_accel::solvers::{
    run, run_gradient, run_opt, step_extra_point, step_extra_point_with_half, step_extragradient,
    step_heavy_ball, step_nesterov, step_ogda, step_opt_extra_point, step_opt_extra_point_simplified, step_vanilla,
    Method, OptState, RunOptions, StopCriteria, ViParams, ViState, YRule,
};
use vi_accel::{presets, project, FeasibleSet, MonotoneProblem, RealVector};

fn report(n: u32, ok: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n:>2}: {} - {detail}", if ok { "PASS" } else { "FAIL" });
}

fn gaussian(r: &mut ChaCha8Rng, n: usize, scale: f64) -> RealVector {
    RealVector::new((0..n).map(|_| scale * r.sample::<f64, _>(StandardNormal)).collect()).unwrap()
}

fn steps(max_iter: usize) -> RunOptions {
    RunOptions::new(StopCriteria {
        max_iter,
        residual_tol: 0.0,
    })
}

fn linear(seed: u64, constrained: bool) -> MonotoneProblem {
    gen_linear_vi(20, seed, 1e-2, constrained).unwrap().0
}

#[test]
fn criterion_01_projection_properties() {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let n = 6;
    let sets = [
        FeasibleSet::WholeSpace,
        FeasibleSet::NonnegativeOrthant,
        FeasibleSet::boxed(RealVector::from_element(n, -1.0), RealVector::from_element(n, 2.0)).unwrap(),
        FeasibleSet::ball(gaussian(&mut r, n, 1.0), 1.5).unwrap(),
    ];
    let mut worst_ne = f64::NEG_INFINITY;
    let mut worst_cc = f64::NEG_INFINITY;
    for set in &sets {
        for _ in 0..10_000 {
            let x = gaussian(&mut r, n, 3.0);
            let y = gaussian(&mut r, n, 3.0);
            let (px, py) = (project(set, &x).unwrap(), project(set, &y).unwrap());
            let dp = &px - &py;
            let dz = &x - &y;
            let tol = 1e-12 * (1.0 + dz.norm_sq());
            worst_ne = worst_ne.max((dp.norm_sq() - dz.norm_sq()) / tol);
            worst_cc = worst_cc.max((dp.norm_sq() - dp.dot(&dz)) / tol);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst_ne <= 1.0 && worst_cc <= 1.0 && secs < 5.0;
    report(
        1,
        ok,
        &format!("4 sets x 1e4 pairs, worst excess {worst_ne:.2e}/{worst_cc:.2e} of tolerance, {secs:.2}s"),
    );
    assert!(ok);
}

#[test]
fn criterion_02_vanilla_rate() {
    let mut details = Vec::new();
    let mut ok = true;
    for constrained in [false, true] {
        let p = linear(11, constrained);
        let alpha = p.mu() / (p.lip() * p.lip());
        let cert = certify_vanilla(p.mu(), p.lip(), alpha).unwrap();
        assert!((cert.rate - (1.0 - p.sigma() * p.sigma())).abs() < 1e-12);
        let trace = run(&p, Method::Vanilla, &ViParams::vanilla(alpha), &RealVector::zeros(20), &steps(2000)).unwrap();
        let rep = check_contraction(&trace, &cert).unwrap();
        ok &= rep.passes() && rep.checked == 2000;
        details.push(format!(
            "{}: sigma {:.3e}, max ratio - rate {:.2e} over {} steps",
            if constrained { "orthant" } else { "free" },
            p.sigma(),
            rep.max_violation,
            rep.checked
        ));
    }
    report(2, ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_03_extragradient_rate() {
    let mut details = Vec::new();
    let mut ok = true;
    for (constrained, restricted) in [(false, false), (false, true), (true, true)] {
        let p = linear(12, constrained);
        let alpha = 1.0 / (4.0 * p.lip());
        let cert = certify_extragradient(p.mu(), p.lip(), alpha, alpha).unwrap();
        assert!(cert.feasible && (cert.rate - (1.0 - p.sigma() / 4.0)).abs() < 1e-12);
        let trace = run(
            &p,
            Method::ExtraGradient { restricted },
            &ViParams::extragradient(alpha, alpha),
            &RealVector::zeros(20),
            &steps(2000),
        )
        .unwrap();
        let rep = check_contraction(&trace, &cert).unwrap();
        ok &= rep.passes() && rep.checked > 0;
        details.push(format!(
            "{}{}: {:.2e} over {}",
            if constrained { "orthant" } else { "free" },
            if restricted { "/projected" } else { "/plain" },
            rep.max_violation,
            rep.checked
        ));
    }
    report(3, ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_04_ogda_bound() {
    let mut details = Vec::new();
    let mut ok = true;
    for constrained in [false, true] {
        let p = linear(13, constrained);
        let sigma = p.sigma();
        let alpha = 1.0 / (2.0 * p.lip());
        let tau = alpha / (1.0 + sigma);
        let cert = certify_ogda(p.mu(), p.lip(), alpha, tau).unwrap();
        assert!(cert.feasible);
        let mut r = ChaCha8Rng::seed_from_u64(4);
        let z0 = p.project(&gaussian(&mut r, 20, 1.0));
        let trace = run(&p, Method::Ogda, &ViParams::ogda(alpha, tau), &z0, &steps(5000)).unwrap();
        let rep = check_contraction(&trace, &cert).unwrap();
        let v: Vec<f64> = trace.records.iter().map(|r| r.potential.unwrap()).collect();
        let d: Vec<f64> = trace.records.iter().map(|r| r.dist_sq.unwrap()).collect();
        let potential_ok = v.windows(2).all(|w| (1.0 + sigma) * w[1] <= w[0] + 1e-9 * v[0]);
        let lower_ok = v.iter().zip(&d).all(|(v, d)| *v >= 0.5 * d - 1e-12 * d);
        let bound_ok = d
            .iter()
            .enumerate()
            .all(|(k, dk)| *dk <= 2.0 * (1.0 + sigma).powi(-(k as i32)) * d[0] + 1e-15 * d[0]);
        ok &= potential_ok && lower_ok && bound_ok && rep.endpoint_violating_iters.is_empty() && trace.records.len() == 5001;
        details.push(format!(
            "{}: endpoint bound {}, (1+s)V' <= V + 1e-9 V0 {}, V >= d/2 {}",
            if constrained { "orthant" } else { "free" },
            bound_ok,
            potential_ok,
            lower_ok
        ));
    }
    report(4, ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_05_extra_point_certificates() {
    let mut ok = true;
    let mut details = Vec::new();

    for kappa in [1.0, 10.0, 1e2, 1e3, 1e4] {
        let (mu, l) = (1.0, kappa);
        let sigma = mu / l;
        let pu = default_vi_params(Regime::ViUnrestricted, mu, l).unwrap();
        let cu = certify_vi_unrestricted(mu, l, &pu).unwrap();
        let cr = certify_vi_restricted(mu, l, &default_vi_params(Regime::ViRestricted, mu, l).unwrap()).unwrap();
        let co = certify_opt(mu, l, &default_opt_params(mu, l, None).unwrap()).unwrap();
        ok &= cu.feasible && cr.feasible && co.feasible;
        ok &= cu.a > 32.0 * sigma / 256.0 && cu.a < 33.0 * sigma / 256.0 && cu.b < 22.0 * sigma / 256.0;
    }
    details.push(format!("defaults feasible and example (a, b) bounds hold for kappa 1..1e4: {ok}"));

    let cases = [
        (false, Regime::ViUnrestricted, false),
        (false, Regime::ViRestricted, true),
        (true, Regime::ViRestricted, true),
    ];
    for (constrained, regime, restricted) in cases {
        let (p, _) = gen_linear_vi(20, 14, 1e-2, constrained).unwrap();
        let params = default_vi_params(regime, p.mu(), p.lip()).unwrap();
        let cert = match regime {
            Regime::ViUnrestricted => certify_vi_unrestricted(p.mu(), p.lip(), &params),
            _ => certify_vi_restricted(p.mu(), p.lip(), &params),
        }
        .unwrap();
        let method = Method::ExtraPoint { restricted };
        let z0 = RealVector::zeros(20);
        let trace = run(&p, method, &params, &z0, &steps(3000)).unwrap();
        let rep = check_contraction(&trace, &cert).unwrap();

        let zs = p.solution().unwrap();
        let tol_dist = (1e-8 / (2.0 + p.lip())).powi(2);
        let bound = iteration_bound(&cert, z0.dist_sq(zs), tol_dist).unwrap();
        let long = run(
            &p,
            method,
            &params,
            &z0,
            &RunOptions::new(StopCriteria {
                max_iter: bound,
                residual_tol: 1e-8,
            })
            .without_iterates()
            .with_thinning(usize::MAX),
        )
        .unwrap();
        let case_ok = rep.passes() && rep.checked > 0 && long.terminated_by == Termination::Tolerance;
        ok &= case_ok;
        details.push(format!(
            "{} {}: rate {:.6}, max ratio - rate {:.2e}, residual 1e-8 at k = {} <= bound {}",
            if constrained { "orthant" } else { "free" },
            regime.name(),
            cert.rate,
            rep.max_violation,
            long.iterations(),
            bound
        ));
    }
    report(5, ok, &details.join("; "));
    assert!(ok);
}

fn max_rel_diff(a: &RealVector, b: &RealVector) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

#[test]
fn criterion_06_specialization() {
    let mut worst = 0.0f64;
    for (seed, constrained) in [(21, false), (22, true), (23, false)] {
        let p = linear(seed, constrained);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let z0 = p.project(&gaussian(&mut r, 20, 1.0));
        type Dedicated = Box<dyn Fn(&MonotoneProblem, &ViState) -> ViState>;
        let (a, b, g, e, t) = (0.02, 0.15, 0.04, 0.018, 0.01);
        let cases: Vec<(ViParams, Dedicated)> = vec![
            (ViParams::vanilla(a), Box::new(move |p, s| step_vanilla(p, s, a))),
            (ViParams::heavy_ball(a, g), Box::new(move |p, s| step_heavy_ball(p, s, a, g))),
            (ViParams::ogda(a, t), Box::new(move |p, s| step_ogda(p, s, a, t))),
            (
                ViParams::extragradient(a, e),
                Box::new(move |p, s| step_extragradient(p, s, a, e, false).unwrap()),
            ),
            (ViParams::nesterov(a, b), Box::new(move |p, s| step_nesterov(p, s, a, b))),
        ];
        for (params, dedicated) in cases {
            let mut s1 = ViState::new(&p, &z0).unwrap();
            let mut s2 = s1.clone();
            for _ in 0..100 {
                s1 = step_extra_point(&p, &s1, &params, false).unwrap();
                s2 = dedicated(&p, &s2);
                worst = worst.max(max_rel_diff(&s1.z_curr, &s2.z_curr));
            }
        }
    }
    let ok = worst <= 1e-12;
    report(6, ok, &format!("5 methods x 3 instances x 100 steps, worst relative gap {worst:.2e}"));
    assert!(ok);
}

#[test]
fn criterion_07_optimization_scheme() {
    let f = gen_quadratic(20, 31, 0.0024).unwrap();
    let sigma = f.sigma();
    let params = default_opt_params(f.mu(), f.lip(), Some(0.5)).unwrap();
    let cert = certify_opt(f.mu(), f.lip(), &params).unwrap();
    assert!(cert.feasible);
    let trace = run_opt(&f, &params, YRule::YEqualsP, &RealVector::zeros(20), &steps(3000)).unwrap();
    let rep = check_contraction(&trace, &cert).unwrap();
    let gaps: Vec<f64> = trace.records.iter().map(|r| r.merit_aux).collect();
    let endpoint_ok = gaps
        .iter()
        .enumerate()
        .all(|(k, g)| *g <= 2.0 * (1.0 - sigma.sqrt()).powi(k as i32) * gaps[0] + 1e-15 * gaps[0]);

    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut agree = 0.0f64;
    for _ in 0..100 {
        let s = OptState::with_v(&f, &gaussian(&mut r, 20, 2.0), &gaussian(&mut r, 20, 2.0)).unwrap();
        let g = step_opt_extra_point(&f, &s, &params, YRule::YEqualsP);
        let h = step_opt_extra_point_simplified(&f, &s, params.theta, params.delta);
        agree = agree.max(max_rel_diff(&g.x_curr, &h.x_curr)).max(max_rel_diff(&g.v_curr, &h.v_curr));
    }
    let ok = rep.passes() && rep.checked > 0 && endpoint_ok && agree <= 1e-12;
    report(
        7,
        ok,
        &format!(
            "sigma {sigma:.4}, E ratio - (1 - sqrt sigma) max {:.2e} over {} steps, gap bound {endpoint_ok}, generic vs simplified {agree:.1e}",
            rep.max_violation, rep.checked
        ),
    );
    assert!(ok);
}

fn draw_unrestricted(r: &mut ChaCha8Rng, mu: f64, l: f64) -> ViParams {
    let sigma = mu / l;
    for _ in 0..10_000 {
        let alpha = r.random_range(0.05..0.25) / l;
        let eta = alpha * r.random_range(0.9..=1.0);
        let beta = r.random_range(0.0..sigma / 32.0);
        let gamma = alpha * beta / eta;
        let tau = r.random_range(0.0..sigma / (64.0 * l));
        let p = ViParams::new(alpha, beta, gamma, eta, tau).unwrap();
        if certify_vi_unrestricted(mu, l, &p).unwrap().feasible {
            return p;
        }
    }
    panic!("no feasible draw");
}

fn draw_restricted(r: &mut ChaCha8Rng, mu: f64, l: f64) -> ViParams {
    let sigma = mu / l;
    for _ in 0..10_000 {
        let alpha = r.random_range(0.05..0.25) / l;
        let beta = r.random_range(0.0..sigma / 32.0);
        let gamma = r.random_range(0.0..sigma / 32.0);
        let tau = r.random_range(0.0..sigma / (32.0 * l));
        let p = ViParams::new(alpha, beta, gamma, alpha, tau).unwrap();
        if certify_vi_restricted(mu, l, &p).unwrap().feasible {
            return p;
        }
    }
    panic!("no feasible draw");
}

/// Right side of the one-step inequality for the unprojected half-point,
/// every coefficient written out independently of the certificate code.
fn one_step_rhs_plain(
    p: &MonotoneProblem,
    q: &ViParams,
    zs: &RealVector,
    prev: &RealVector,
    cur: &RealVector,
    half: &RealVector,
) -> f64 {
    let (mu, l) = (p.mu(), p.lip());
    let ViParams {
        alpha: a,
        beta: b,
        gamma: g,
        eta: e,
        tau: t,
    } = *q;
    let x = g - a * b / e;
    let abs1 = (-2.0 * a * b / e - 2.0 * a / e * x).abs();
    let c_cur = 1.0 - a * mu + 3.0 * g + t * l * (3.0 + 2.0 * t * l + 2.0 * a / e + 2.0 * a * l) + 2.0 * x * x + abs1;
    let c_prev = 2.0 * x * x + g + 2.0 * t * l * (1.0 + t * l + a / e + a * l) + abs1;
    let c_half = a * a * l * l + a * a / (e * e) + a * t * l / e - 2.0 * a / e + 2.0 * a * mu + a * t * l * l
        + (-a * b / e - a / e * x).abs();
    let (f_cur, f_prev, f_half) = (p.eval(cur), p.eval(prev), p.eval(half));
    let df_half = &f_half - &f_cur;
    c_cur * cur.dist_sq(zs)
        + c_prev * prev.dist_sq(zs)
        + c_half * cur.dist_sq(half)
        + (-2.0 * a + 2.0 * a * a / e) * df_half.dot(&(cur - half))
        - 2.0 * a * x * df_half.dot(&(cur - prev))
        - 2.0 * t * x * (&f_cur - &f_prev).dot(&(cur - prev))
}

/// Right side of the one-step inequality with the projected half-point.
fn one_step_rhs_projected(
    p: &MonotoneProblem,
    q: &ViParams,
    zs: &RealVector,
    prev: &RealVector,
    cur: &RealVector,
    half: &RealVector,
    next: &RealVector,
) -> f64 {
    let (mu, l) = (p.mu(), p.lip());
    let ViParams {
        alpha: a,
        beta: b,
        gamma: g,
        eta: e,
        tau: t,
    } = *q;
    let gb = (g - b).abs();
    (1.0 - a * mu + 4.0 * g + 2.0 * gb + 2.0 * t * l) * cur.dist_sq(zs)
        + (2.0 * g + 2.0 * gb + 2.0 * t * l) * prev.dist_sq(zs)
        + (a * l + gb - 1.0) * next.dist_sq(half)
        + (a * l + 2.0 * a * mu + 2.0 * g - 1.0) * half.dist_sq(cur)
        + 2.0 * (e - a) * p.eval(cur).dot(&(next - half))
}

#[test]
fn criterion_08_one_step_inequalities() {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let mut worst_u = f64::INFINITY;
    let mut worst_r = f64::INFINITY;
    for state in 0..100u64 {
        let n = r.random_range(2..=5);
        let target = r.random_range(0.05..0.5);
        let spec = gen_linear_vi_spec(n, 1000 + state, target).unwrap();
        let (mu, l) = (spec.mu(), spec.lip());

        let free = spec.problem(false).unwrap();
        let zs = solve_linear_reference(&spec, &FeasibleSet::WholeSpace).unwrap();
        let cur = zs.axpy(1.0, &gaussian(&mut r, n, 1.0));
        let prev = zs.axpy(1.0, &gaussian(&mut r, n, 1.0));
        let s = ViState::with_history(&free, &cur, &prev).unwrap();
        for _ in 0..20 {
            let q = draw_unrestricted(&mut r, mu, l);
            let step = step_extra_point_with_half(&free, &s, &q, false).unwrap();
            let lhs = step.state.z_curr.dist_sq(&zs);
            let rhs = one_step_rhs_plain(&free, &q, &zs, &prev, &cur, &step.half);
            let scale = 1.0 + cur.dist_sq(&zs) + prev.dist_sq(&zs);
            worst_u = worst_u.min((rhs - lhs) / scale);
        }

        let orthant = spec.problem(true).unwrap();
        let zs = solve_linear_reference(&spec, &FeasibleSet::NonnegativeOrthant).unwrap();
        let cur = orthant.project(&zs.axpy(1.0, &gaussian(&mut r, n, 1.0)));
        let prev = orthant.project(&zs.axpy(1.0, &gaussian(&mut r, n, 1.0)));
        let s = ViState::with_history(&orthant, &cur, &prev).unwrap();
        for _ in 0..20 {
            let q = draw_restricted(&mut r, mu, l);
            let step = step_extra_point_with_half(&orthant, &s, &q, true).unwrap();
            let next = &step.state.z_curr;
            let lhs = (1.0 - q.tau * l) * next.dist_sq(&zs);
            let rhs = one_step_rhs_projected(&orthant, &q, &zs, &prev, &cur, &step.half, next);
            let scale = 1.0 + cur.dist_sq(&zs) + prev.dist_sq(&zs);
            worst_r = worst_r.min((rhs - lhs) / scale);
        }
    }
    let ok = worst_u >= -1e-8 && worst_r >= -1e-8;
    report(
        8,
        ok,
        &format!("100 states x 20 draws each, worst scaled slack {worst_u:.2e} (plain), {worst_r:.2e} (projected)"),
    );
    assert!(ok);
}

#[test]
fn criterion_09_gradient_oracle() {
    let f = gen_logistic(15, 2, 0.005, 9).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x = gaussian(&mut r, 15, 1.0);
        let g = f.gradient(&x);
        let fd = finite_diff_grad(&f, &x, 1e-5).unwrap();
        worst = worst.max(g.dist(&fd) / g.norm());
    }
    let ok = worst <= 1e-6;
    report(9, ok, &format!("50 points, worst relative error {worst:.2e}"));
    assert!(ok);
}

#[test]
fn criterion_10_qualitative_ordering() {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    let opts = RunOptions::new(StopCriteria {
        max_iter: 50_000,
        residual_tol: 1e-12,
    })
    .without_iterates();

    for (seed, constrained) in [(41, false), (42, true)] {
        let p = linear(seed, constrained);
        let z0 = RealVector::from_element(20, 1.0);
        let reach = |m: &str| {
            let (method, params) = presets::vi_table(m, constrained).unwrap();
            run(&p, method, &params, &z0, &opts)
                .ok()
                .and_then(|t| t.settled_below(1e-6))
        };
        let (ep, van) = (reach("extra-point"), reach("vanilla"));
        let case_ok = match (ep, van) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        };
        ok &= case_ok;
        details.push(format!(
            "{}: extra-point {:?} vs vanilla {:?}",
            if constrained { "orthant" } else { "free" },
            ep,
            van
        ));
    }

    let f = gen_quadratic(20, 43, 0.0024).unwrap();
    let x0 = RealVector::zeros(20);
    let reach_vi = |m: &str| {
        let (method, params) = presets::opt_table_vi(m, true).unwrap();
        run_gradient(&f, method, &params, &x0, &opts)
            .ok()
            .and_then(|t| t.settled_within(1e-6))
    };
    let gd = reach_vi("gradient-descent");
    let hb = reach_vi("heavy-ball");
    let nes = reach_vi("nesterov");
    let ep_params = presets::opt_table_extra_point(true, f.sigma()).unwrap();
    let ep = run_opt(&f, &ep_params, YRule::YEqualsP, &x0, &opts)
        .ok()
        .and_then(|t| t.settled_within(1e-6));
    let beats = |x: Option<usize>| match (x, gd) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    };
    ok &= beats(hb) && beats(nes) && beats(ep);
    details.push(format!(
        "quadratic to |x - x*| <= 1e-6: heavy-ball {hb:?}, Nesterov {nes:?}, extra-point {ep:?} vs gradient descent {gd:?}"
    ));
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    details.push(format!("{secs:.1}s"));
    report(10, ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn certificate_reexports_are_consistent() {
    // The regime names used on the command line map back to the same certificates.
    for regime in [Regime::ViUnrestricted, Regime::ViRestricted, Regime::Opt] {
        assert_eq!(Regime::parse(regime.name()), Some(regime));
        assert!(matches!(
            certify::default_params(regime, 1.0, 10.0, None).unwrap(),
            certify::DefaultParams::Vi(_) | certify::DefaultParams::Opt(_)
        ));
    }
}
