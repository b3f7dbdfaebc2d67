//! Resolving a config into runs, executing them, and summarizing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use vi_accel::certify::{
    certify_extragradient, certify_ogda, certify_opt, certify_vanilla, certify_vi_restricted, certify_vi_unrestricted,
    default_opt_params, default_vi_params, Regime,
};
use vi_accel::harness::{check_contraction, reference_optimum, trace_to_csv, trace_to_jsonl, ContractionReport};
use vi_accel::problems::{ProblemInstance, ProblemKind};
use vi_accel::solvers::{run, run_gradient, run_opt, Method, RunOptions, StopCriteria, YRule};
use vi_accel::{presets, Error, IterateTrace, MonotoneProblem, OptParams, RateCertificate, RealVector, SmoothObjective, ViParams};

use crate::config::{
    validate_method, ExperimentConfig, Format, Generator, MethodConfig, ParamSource, ProblemConfig, ProblemSource,
    StartPoint,
};
use crate::CliError;

/// Reference solve for problems without a closed-form minimizer.
const REFERENCE_GRAD_TOL: f64 = 1e-11;
const REFERENCE_MAX_ITER: usize = 1_000_000;

pub enum Instance {
    Vi(MonotoneProblem),
    Min(SmoothObjective),
}

impl Instance {
    pub fn dim(&self) -> usize {
        match self {
            Self::Vi(p) => p.dimension(),
            Self::Min(f) => f.dimension(),
        }
    }

    fn constants(&self) -> (f64, f64) {
        match self {
            Self::Vi(p) => (p.mu(), p.lip()),
            Self::Min(f) => (f.mu(), f.lip()),
        }
    }

    fn constrained(&self) -> bool {
        matches!(self, Self::Vi(p) if !p.set().is_whole_space())
    }
}

pub fn generate(g: &Generator) -> Result<ProblemInstance, Error> {
    match *g {
        Generator::LinearVi {
            n,
            seed,
            sigma,
            constrained,
        } => ProblemInstance::linear_vi(n, seed, sigma, constrained),
        Generator::Quadratic { n, seed, sigma } => ProblemInstance::quadratic(n, seed, sigma),
        Generator::Logistic {
            n,
            seed,
            samples,
            lambda,
        } => ProblemInstance::logistic(n, samples, lambda, seed),
        Generator::Bilinear {
            nx,
            ny,
            seed,
            mu_x,
            mu_y,
        } => ProblemInstance::bilinear_saddle(nx, ny, seed, mu_x, mu_y),
    }
}

pub fn load_problem(cfg: &ProblemConfig) -> Result<(ProblemInstance, Instance), CliError> {
    let inst = match &cfg.source {
        ProblemSource::Generate(g) => generate(g)?,
        ProblemSource::File(path) => ProblemInstance::read_from(path).map_err(|e| match e {
            Error::Io(_) => CliError::Usage(format!("{}: {e}", path.display())),
            e => e.into(),
        })?,
    };
    let problem = match inst.objective() {
        None => Instance::Vi(inst.vi_problem()?),
        Some(f) => {
            let f = f?;
            if f.minimizer().is_some() {
                Instance::Min(f)
            } else {
                Instance::Min(reference_optimum(&f, REFERENCE_GRAD_TOL, REFERENCE_MAX_ITER)?.0)
            }
        }
    };
    Ok((inst, problem))
}

pub fn start_point(start: StartPoint, n: usize) -> RealVector {
    match start {
        StartPoint::Zeros => RealVector::zeros(n),
        StartPoint::Ones => RealVector::from_element(n, 1.0),
        StartPoint::Gaussian(seed) => {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
            RealVector::new(v).expect("gaussian entries are finite")
        }
    }
}

#[derive(Clone, Debug)]
pub enum RunKind {
    Vi(Method, ViParams),
    Gradient(Method, ViParams),
    Opt(OptParams, YRule),
}

#[derive(Clone, Debug)]
pub struct ResolvedMethod {
    pub label: String,
    pub kind: RunKind,
    pub stop: StopCriteria,
    /// Attached only when the parameters satisfy it.
    pub cert: Option<RateCertificate>,
    /// "none", "infeasible" or the certificate kind.
    pub cert_note: String,
}

fn preset_name(p: &ParamSource) -> &'static str {
    match p {
        ParamSource::PaperDefault { .. } => "paper-default",
        ParamSource::Table => "table",
        _ => "explicit",
    }
}

fn vi_method(name: &str) -> Method {
    if name == "gradient-descent" {
        Method::Vanilla
    } else {
        Method::parse(name).expect("validated method name")
    }
}

fn paper_default_vi(method: Method, mu: f64, lip: f64, constrained: bool) -> Result<ViParams, CliError> {
    let sigma = mu / lip;
    Ok(match method {
        Method::Vanilla => ViParams::vanilla(mu / (lip * lip)),
        Method::ExtraGradient { .. } => ViParams::extragradient(1.0 / (4.0 * lip), 1.0 / (4.0 * lip)),
        Method::Ogda => {
            let alpha = 1.0 / (2.0 * lip);
            ViParams::ogda(alpha, alpha / (1.0 + sigma))
        }
        Method::ExtraPoint { restricted: false } if constrained => {
            return Err(CliError::Usage(
                "extra-point defaults are certified only without constraints; use extra-point-restricted".into(),
            ))
        }
        Method::ExtraPoint { restricted: false } => default_vi_params(Regime::ViUnrestricted, mu, lip)?,
        Method::ExtraPoint { restricted: true } => default_vi_params(Regime::ViRestricted, mu, lip)?,
        Method::HeavyBall | Method::Nesterov => {
            return Err(CliError::Usage(format!("{} has no certified default parameters", method.name())))
        }
    })
}

fn vi_certificate(method: Method, p: &ViParams, mu: f64, lip: f64, constrained: bool) -> Result<Option<RateCertificate>, Error> {
    Ok(Some(match method {
        Method::Vanilla => certify_vanilla(mu, lip, p.alpha)?,
        Method::ExtraGradient { .. } => certify_extragradient(mu, lip, p.alpha, p.eta)?,
        Method::Ogda => certify_ogda(mu, lip, p.alpha, p.tau)?,
        Method::ExtraPoint { restricted: false } if !constrained => certify_vi_unrestricted(mu, lip, p)?,
        Method::ExtraPoint { restricted: true } => certify_vi_restricted(mu, lip, p)?,
        _ => return Ok(None),
    }))
}

pub fn resolve(m: &MethodConfig, problem: &Instance, kind: ProblemKind) -> Result<ResolvedMethod, CliError> {
    validate_method(m, Some(kind)).map_err(|e| CliError::Usage(e.0))?;
    let (mu, lip) = problem.constants();
    let constrained = problem.constrained();
    let optimization = matches!(problem, Instance::Min(_));
    let opt_name = m.name.starts_with("opt-") || (optimization && m.name == "extra-point" && m.params == ParamSource::Table);
    let y_rule = if m.name == "opt-extra-point-grad" {
        YRule::YGradStep
    } else {
        YRule::YEqualsP
    };

    let kind = if opt_name {
        let params = match m.params {
            ParamSource::PaperDefault { delta } => default_opt_params(mu, lip, delta)?,
            ParamSource::Table => presets::opt_table_extra_point(kind == ProblemKind::Quadratic, mu / lip)?,
            ParamSource::ExplicitOpt { t, theta, c, delta } => OptParams::new(t, theta, c, delta)?,
            ParamSource::ExplicitVi { .. } => unreachable!("rejected by validation"),
        };
        RunKind::Opt(params, y_rule)
    } else {
        let (method, params) = match m.params {
            ParamSource::Table if optimization => {
                presets::opt_table_vi(&m.name, kind == ProblemKind::Quadratic).expect("validated table row")
            }
            ParamSource::Table => presets::vi_table(&m.name, constrained).expect("validated table row"),
            ParamSource::PaperDefault { .. } => {
                let method = vi_method(&m.name);
                (method, paper_default_vi(method, mu, lip, constrained)?)
            }
            ParamSource::ExplicitVi {
                alpha,
                beta,
                gamma,
                eta,
                tau,
            } => (vi_method(&m.name), ViParams::new(alpha, beta, gamma, eta, tau)?),
            ParamSource::ExplicitOpt { .. } => unreachable!("rejected by validation"),
        };
        if optimization {
            RunKind::Gradient(method, params)
        } else {
            RunKind::Vi(method, params)
        }
    };

    let cert = match &kind {
        RunKind::Vi(method, p) | RunKind::Gradient(method, p) => vi_certificate(*method, p, mu, lip, constrained)?,
        RunKind::Opt(p, _) => Some(certify_opt(mu, lip, p)?),
    };
    let (cert, cert_note) = match cert {
        None => (None, "none".to_string()),
        Some(c) if c.feasible => {
            let note = c.kind.name().to_string();
            (Some(c), note)
        }
        Some(_) => (None, "infeasible".to_string()),
    };
    let base = match &kind {
        RunKind::Vi(method, _) | RunKind::Gradient(method, _) => method.name(),
        RunKind::Opt(_, YRule::YEqualsP) => "opt-extra-point",
        RunKind::Opt(_, YRule::YGradStep) => "opt-extra-point-grad",
    };
    Ok(ResolvedMethod {
        label: format!("{base}@{}", preset_name(&m.params)),
        kind,
        stop: StopCriteria {
            max_iter: m.max_iter,
            residual_tol: m.tol,
        },
        cert,
        cert_note,
    })
}

pub struct Outcome {
    pub method: ResolvedMethod,
    pub trace: IterateTrace,
    pub diverged_at: Option<usize>,
    pub report: Option<ContractionReport>,
}

impl Outcome {
    pub fn violated(&self) -> bool {
        self.report.as_ref().is_some_and(|r| !r.passes()) || (self.method.cert.is_some() && self.diverged_at.is_some())
    }
}

pub fn execute(m: &ResolvedMethod, problem: &Instance, z0: &RealVector, thinning: usize) -> Result<Outcome, CliError> {
    let mut opts = RunOptions::new(m.stop).with_thinning(thinning).without_iterates();
    if let Some(c) = &m.cert {
        if !matches!(m.kind, RunKind::Opt(..)) {
            opts = opts.with_potential(c.potential);
        }
    }
    let result = match (&m.kind, problem) {
        (RunKind::Vi(method, p), Instance::Vi(prob)) => run(prob, *method, p, &prob.project(z0), &opts),
        (RunKind::Gradient(method, p), Instance::Min(f)) => run_gradient(f, *method, p, z0, &opts),
        (RunKind::Opt(p, rule), Instance::Min(f)) => run_opt(f, p, *rule, z0, &opts),
        _ => unreachable!("resolve matches run kinds to problems"),
    };
    let (trace, diverged_at) = match result {
        Ok(t) => (t, None),
        Err(Error::Divergence { iteration, trace }) => (*trace, Some(iteration)),
        Err(e) => return Err(e.into()),
    };
    let report = match (&m.cert, diverged_at) {
        (Some(c), None) if trace.potential.is_some() => Some(check_contraction(&trace, c)?),
        _ => None,
    };
    Ok(Outcome {
        method: m.clone(),
        trace,
        diverged_at,
        report,
    })
}

pub struct ExperimentResult {
    pub instance: ProblemInstance,
    pub outcomes: Vec<Outcome>,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl ExperimentResult {
    pub fn any_violation(&self) -> bool {
        self.outcomes.iter().any(|o| o.violated())
    }

    pub fn any_divergence(&self) -> bool {
        self.outcomes.iter().any(|o| o.diverged_at.is_some())
    }
}

/// Runs every method of `cfg` (concurrently when there are several) and writes
/// one trace file per method and format plus `summary.txt`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, CliError> {
    cfg.validate().map_err(|e| CliError::Usage(e.0))?;
    let (instance, problem) = load_problem(&cfg.problem)?;
    let resolved = cfg
        .methods
        .iter()
        .map(|m| resolve(m, &problem, instance.kind()))
        .collect::<Result<Vec<_>, _>>()?;
    let z0 = start_point(cfg.problem.start, problem.dim());
    let thinning = cfg.output.thinning;

    let results: Vec<Result<Outcome, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = resolved
            .iter()
            .map(|m| {
                let (problem, z0) = (&problem, &z0);
                s.spawn(move || execute(m, problem, z0, thinning))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    let outcomes = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let summary = summarize(&instance, &outcomes, cfg.output.summary_tol);
    let mut files = write_outputs(&cfg.output.directory, &cfg.output.formats, &outcomes, &summary)?;
    let config_path = cfg.output.directory.join("config.txt");
    std::fs::write(&config_path, cfg.to_text()).map_err(|e| CliError::Runtime(format!("{}: {e}", config_path.display())))?;
    files.push(config_path);
    Ok(ExperimentResult {
        instance,
        outcomes,
        summary,
        files,
    })
}

fn file_stem(i: usize, o: &Outcome) -> String {
    format!("{:02}-{}", i + 1, o.method.label.replace('@', "-"))
}

fn write_outputs(dir: &Path, formats: &[Format], outcomes: &[Outcome], summary: &str) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    let mut write = |path: PathBuf, text: &str| -> Result<(), CliError> {
        std::fs::write(&path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        files.push(path);
        Ok(())
    };
    for (i, o) in outcomes.iter().enumerate() {
        for f in formats {
            let text = match f {
                Format::Csv => trace_to_csv(&o.trace),
                Format::Jsonl => trace_to_jsonl(&o.trace),
            };
            write(dir.join(format!("{}.{}", file_stem(i, o), f.name())), &text)?;
        }
    }
    write(dir.join("summary.txt"), summary)?;
    Ok(files)
}

fn opt_num(x: Option<usize>) -> String {
    x.map_or_else(|| "-".to_string(), |k| k.to_string())
}

pub fn summarize(instance: &ProblemInstance, outcomes: &[Outcome], tol: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "problem {} n={} seed={} mu={:.6e} L={:.6e} sigma={:.6e}",
        instance.kind().name(),
        instance.dim(),
        instance.seed(),
        instance.mu(),
        instance.lip(),
        instance.mu() / instance.lip()
    );
    let _ = writeln!(
        out,
        "{:<36} {:>10} {:>8} {:>10} {:>10} {:>12} {:>12} {:>12} {:>16} {:>10} {:>13}",
        "method",
        "stop",
        "iters",
        "k_merit",
        "k_dist",
        "merit",
        "aux",
        "dist",
        "certificate",
        "rate",
        "max_violation"
    );
    for o in outcomes {
        let last = o.trace.last();
        let stop = match o.diverged_at {
            Some(k) => format!("div@{k}"),
            None => o.trace.terminated_by.name().to_string(),
        };
        let rate = o.method.cert.as_ref().map_or("-".to_string(), |c| format!("{:.6}", c.rate));
        let violation = match &o.report {
            Some(r) => {
                let v = r.max_violation.max(r.endpoint_max_violation);
                format!("{v:.2e}{}", if r.passes() { "" } else { "!" })
            }
            None => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<36} {:>10} {:>8} {:>10} {:>10} {:>12.4e} {:>12.4e} {:>12} {:>16} {:>10} {:>13}",
            o.method.label,
            stop,
            o.trace.iterations(),
            opt_num(o.trace.settled_below(tol)),
            opt_num(o.trace.settled_within(tol)),
            last.merit_primary,
            last.merit_aux,
            last.dist_sq.map_or("-".to_string(), |d| format!("{:.4e}", d.sqrt())),
            o.method.cert_note,
            rate,
            violation
        );
    }
    let _ = writeln!(
        out,
        "k_merit / k_dist: first iteration from which the merit / distance to the solution stays <= {tol:e}"
    );
    out
}
