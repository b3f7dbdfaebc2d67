use std::path::PathBuf;

use proptest::prelude::*;
use vi_accel_cli::config::{
    ExperimentConfig, Format, Generator, MethodConfig, OutputConfig, ParamSource, ProblemConfig, ProblemSource, StartPoint,
};

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![0.0..1.0f64, 1e-12..1e-3f64, 1.0..1e8f64]
}

fn generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        (1usize..50, any::<u64>(), real(), any::<bool>()).prop_map(|(n, seed, sigma, constrained)| Generator::LinearVi {
            n,
            seed,
            sigma,
            constrained
        }),
        (1usize..50, any::<u64>(), real()).prop_map(|(n, seed, sigma)| Generator::Quadratic { n, seed, sigma }),
        (1usize..50, any::<u64>(), 1usize..100, real()).prop_map(|(n, seed, samples, lambda)| Generator::Logistic {
            n,
            seed,
            samples,
            lambda
        }),
        (1usize..9, 1usize..9, any::<u64>(), real(), real()).prop_map(|(nx, ny, seed, mu_x, mu_y)| Generator::Bilinear {
            nx,
            ny,
            seed,
            mu_x,
            mu_y
        }),
    ]
}

fn problem() -> impl Strategy<Value = ProblemConfig> {
    let source = prop_oneof![
        generator().prop_map(ProblemSource::Generate),
        "[a-z][a-z0-9_./-]{0,12}".prop_map(|p| ProblemSource::File(PathBuf::from(p))),
    ];
    let start = prop_oneof![
        Just(StartPoint::Zeros),
        Just(StartPoint::Ones),
        any::<u64>().prop_map(StartPoint::Gaussian)
    ];
    (source, start).prop_map(|(source, start)| ProblemConfig { source, start })
}

/// Methods valid on every problem kind, so any pairing with a problem validates.
fn method() -> impl Strategy<Value = MethodConfig> {
    let vi_name = prop::sample::select(vec!["vanilla", "extragradient", "ogda", "extra-point", "heavy-ball"]);
    let params = prop_oneof![
        prop::option::of(0.01..0.99f64).prop_map(|delta| ParamSource::PaperDefault { delta }),
        (real(), real(), real(), real(), real()).prop_map(|(alpha, beta, gamma, eta, tau)| ParamSource::ExplicitVi {
            alpha,
            beta,
            gamma,
            eta,
            tau
        }),
    ];
    (vi_name, params, 0usize..100_000, real()).prop_map(|(name, params, max_iter, tol)| MethodConfig {
        name: name.to_string(),
        params,
        max_iter,
        tol,
    })
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    let output = (
        "[a-z][a-z0-9_-]{0,10}",
        prop::sample::subsequence(vec![Format::Csv, Format::Jsonl], 0..=2),
        1usize..1000,
        1e-12..1.0f64,
    )
        .prop_map(|(d, formats, thinning, summary_tol)| OutputConfig {
            directory: PathBuf::from(d),
            formats,
            thinning,
            summary_tol,
        });
    (problem(), prop::collection::vec(method(), 1..5), output).prop_map(|(problem, methods, output)| ExperimentConfig {
        problem,
        methods,
        output,
    })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(cfg in config()) {
        let text = cfg.to_text();
        let parsed = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_text(), text);
    }
}
