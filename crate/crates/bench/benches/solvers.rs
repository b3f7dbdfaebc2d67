use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vi_accel::certify::{certify_opt, certify_vi_restricted, certify_vi_unrestricted, default_vi_params, Regime};
use vi_accel::solvers::{run, run_opt, OptState, RunOptions, StopCriteria, YRule};
use vi_accel::solvers::step_opt_extra_point;
use vi_accel::{project, FeasibleSet, RealVector};
use vi_accel_bench::{linear_instance, opt_params, quadratic_instance, vi_methods, warm_state};

fn single_steps(c: &mut Criterion) {
    let mut g = c.benchmark_group("vi_step");
    for n in [20, 200] {
        let p = linear_instance(n, false);
        let s = warm_state(&p);
        for (m, params) in vi_methods(&p) {
            g.bench_with_input(BenchmarkId::new(m.name(), n), &n, |b, _| {
                b.iter(|| m.step(black_box(&p), black_box(&s), &params).unwrap())
            });
        }
    }
    g.finish();

    let f = quadratic_instance(20);
    let params = opt_params(&f);
    let s = OptState::new(&f, &RealVector::from_element(20, 1.0)).unwrap();
    c.bench_function("opt_step/20", |b| {
        b.iter(|| step_opt_extra_point(black_box(&f), black_box(&s), &params, YRule::YEqualsP))
    });
}

fn full_runs(c: &mut Criterion) {
    let opts = RunOptions::new(StopCriteria {
        max_iter: 100_000,
        residual_tol: 1e-8,
    })
    .without_iterates()
    .with_thinning(usize::MAX);
    let mut g = c.benchmark_group("run_to_1e-8");
    g.sample_size(10);
    for constrained in [false, true] {
        let p = linear_instance(20, constrained);
        let z0 = RealVector::from_element(20, 1.0);
        for (m, params) in vi_methods(&p) {
            let id = format!("{}{}", m.name(), if constrained { "/orthant" } else { "" });
            g.bench_function(id, |b| b.iter(|| run(&p, m, &params, &z0, &opts).unwrap()));
        }
    }
    let f = quadratic_instance(20);
    let params = opt_params(&f);
    g.bench_function("opt-extra-point/quadratic", |b| {
        b.iter(|| run_opt(&f, &params, YRule::YEqualsP, &RealVector::zeros(20), &opts).unwrap())
    });
    g.finish();
}

fn certificates(c: &mut Criterion) {
    let (mu, l) = (1.0, 100.0);
    let u = default_vi_params(Regime::ViUnrestricted, mu, l).unwrap();
    let r = default_vi_params(Regime::ViRestricted, mu, l).unwrap();
    let o = vi_accel::certify::default_opt_params(mu, l, None).unwrap();
    c.bench_function("certify/vi-unrestricted", |b| b.iter(|| certify_vi_unrestricted(mu, black_box(l), &u)));
    c.bench_function("certify/vi-restricted", |b| b.iter(|| certify_vi_restricted(mu, black_box(l), &r)));
    c.bench_function("certify/opt", |b| b.iter(|| certify_opt(mu, black_box(l), &o)));
}

fn projections(c: &mut Criterion) {
    let n = 200;
    let z = RealVector::new((0..n).map(|i| (i as f64 * 0.37).sin() * 3.0).collect()).unwrap();
    let sets = [
        ("orthant", FeasibleSet::NonnegativeOrthant),
        (
            "box",
            FeasibleSet::boxed(RealVector::from_element(n, -1.0), RealVector::from_element(n, 1.0)).unwrap(),
        ),
        ("ball", FeasibleSet::ball(RealVector::zeros(n), 2.0).unwrap()),
    ];
    for (name, set) in &sets {
        c.bench_function(&format!("project/{name}"), |b| b.iter(|| project(set, black_box(&z)).unwrap()));
    }
}

criterion_group!(benches, single_steps, full_runs, certificates, projections);
criterion_main!(benches);
