//! Command-line front end for `vi-accel`: generate instances, certify
//! parameters, and run or compare solvers.
//!
//! Exit codes: 0 success, 1 runtime failure (I/O, reference solve), 2 usage,
//! 3 infeasible certificate, 4 certificate violation or divergence under `--strict`.

pub mod config;
pub mod experiment;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vi_accel::certify::{
    certify_extragradient, certify_ogda, certify_opt, certify_vanilla, certify_vi_restricted, certify_vi_unrestricted,
    default_opt_params, default_vi_params, iteration_bound, Regime,
};
use vi_accel::problems::{estimate_constants, ProblemKind};
use vi_accel::{RateCertificate, ViParams};

use config::{
    ExperimentConfig, Format, Generator, MethodConfig, OutputConfig, ParamSource, ProblemConfig, ProblemSource, StartPoint,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) | Self::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<vi_accel::Error> for CliError {
    fn from(e: vi_accel::Error) -> Self {
        use vi_accel::Error as E;
        match e {
            E::InvalidArgument(_) | E::DimensionMismatch { .. } | E::Parse { .. } => Self::Usage(e.to_string()),
            _ => Self::Runtime(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "vi-accel", version, about = "Extra-point solvers, rate certificates and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a problem instance file and print its constants.
    Generate(GenerateArgs),
    /// Check parameters against a rate certificate.
    Certify(CertifyArgs),
    /// Run one method and write its trace.
    Solve(RunArgs),
    /// Run several methods on one instance and print a comparison.
    Compare(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// linear-vi, quadratic, logistic or bilinear-saddle
    #[arg(long)]
    pub kind: Option<String>,
    /// Dimension (the x block for bilinear-saddle)
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Target μ/L for linear-vi and quadratic
    #[arg(long, default_value_t = 1e-2)]
    pub sigma: f64,
    /// Restrict linear-vi to the nonnegative orthant
    #[arg(long)]
    pub constrained: bool,
    /// Logistic sample count
    #[arg(long, default_value_t = 40)]
    pub samples: usize,
    /// Logistic regularization (= μ)
    #[arg(long, default_value_t = 1e-2)]
    pub lambda: f64,
    /// Bilinear y block size (defaults to n)
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub mu_x: f64,
    #[arg(long, default_value_t = 0.1)]
    pub mu_y: f64,
}

impl ProblemArgs {
    fn generator(&self) -> Result<Generator, CliError> {
        let kind = self
            .kind
            .as_deref()
            .ok_or_else(|| CliError::Usage("--kind is required".into()))?;
        let kind = ProblemKind::parse(kind).ok_or_else(|| CliError::Usage(format!("unknown problem kind '{kind}'")))?;
        let (n, seed) = (self.n, self.seed);
        Ok(match kind {
            ProblemKind::LinearVi => Generator::LinearVi {
                n,
                seed,
                sigma: self.sigma,
                constrained: self.constrained,
            },
            ProblemKind::Quadratic => Generator::Quadratic {
                n,
                seed,
                sigma: self.sigma,
            },
            ProblemKind::Logistic => Generator::Logistic {
                n,
                seed,
                samples: self.samples,
                lambda: self.lambda,
            },
            ProblemKind::BilinearSaddle => Generator::Bilinear {
                nx: n,
                ny: self.ny.unwrap_or(n),
                seed,
                mu_x: self.mu_x,
                mu_y: self.mu_y,
            },
        })
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Output file (default: <kind>-n<n>-s<seed>.txt)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Random pairs used by the constant estimator
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

impl ParamArgs {
    fn any(&self) -> bool {
        [self.alpha, self.beta, self.gamma, self.eta, self.tau].iter().any(Option::is_some)
    }

    fn over(&self, base: ViParams) -> Result<ViParams, CliError> {
        Ok(ViParams::new(
            self.alpha.unwrap_or(base.alpha),
            self.beta.unwrap_or(base.beta),
            self.gamma.unwrap_or(base.gamma),
            self.eta.unwrap_or(base.eta),
            self.tau.unwrap_or(base.tau),
        )?)
    }
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// vi-unrestricted, vi-restricted, opt, vanilla, extragradient or ogda
    #[arg(long)]
    pub regime: String,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub lip: f64,
    /// Start from the certified defaults ("paper-default"); flags override single values
    #[arg(long)]
    pub preset: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// δ for the optimization scheme, in (0, 1)
    #[arg(long)]
    pub delta: Option<f64>,
    /// θ inside the certified interval (default: its midpoint (a + b)/2)
    #[arg(long)]
    pub theta: Option<f64>,
    /// Initial potential for the iteration bound
    #[arg(long, default_value_t = 1.0)]
    pub gap: f64,
    /// Target potential for the iteration bound
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Experiment file; when given, the problem and method flags are not allowed
    #[arg(long, conflicts_with_all = ["kind", "problem_file", "method", "methods"])]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Instance file written by `generate`
    #[arg(long)]
    pub problem_file: Option<PathBuf>,
    /// Method name (solve)
    #[arg(long)]
    pub method: Option<String>,
    /// Comma-separated method names (compare)
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// table, paper-default or explicit
    #[arg(long, default_value = "paper-default")]
    pub preset: String,
    #[command(flatten)]
    pub params: ParamArgs,
    /// δ for the optimization scheme's defaults
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Stop once the natural residual (‖∇f‖ for minimization) is at most this
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// zeros, ones or gaussian:<seed>
    #[arg(long, default_value = "zeros")]
    pub start: String,
    #[arg(long, default_value = "vi-accel-out")]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    pub formats: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub thinning: usize,
    /// Tolerance for the iterations-to-tolerance columns of the summary
    #[arg(long, default_value_t = 1e-6)]
    pub summary_tol: f64,
    /// Exit 4 on a certificate violation or divergence
    #[arg(long)]
    pub strict: bool,
}

impl RunArgs {
    fn to_config(&self, single: bool) -> Result<ExperimentConfig, CliError> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let cfg = ExperimentConfig::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            if single && cfg.methods.len() != 1 {
                return Err(CliError::Usage("solve runs exactly one method; use compare".into()));
            }
            return Ok(cfg);
        }
        let names: Vec<String> = match (&self.method, single) {
            (Some(m), true) => vec![m.clone()],
            (None, true) => return Err(CliError::Usage("solve needs --method or --config".into())),
            (Some(_), false) => return Err(CliError::Usage("compare takes --methods".into())),
            (None, false) if self.methods.is_empty() => {
                return Err(CliError::Usage("compare needs --methods or --config".into()))
            }
            (None, false) => self.methods.clone(),
        };
        let source = match &self.problem_file {
            Some(p) => ProblemSource::File(p.clone()),
            None => ProblemSource::Generate(self.problem.generator()?),
        };
        let start = StartPoint::parse(&self.start)
            .ok_or_else(|| CliError::Usage(format!("bad --start '{}'", self.start)))?;
        let params = match self.preset.as_str() {
            "paper-default" if self.params.any() => {
                return Err(CliError::Usage("parameter flags need --preset explicit".into()))
            }
            "paper-default" => ParamSource::PaperDefault { delta: self.delta },
            "table" => ParamSource::Table,
            "explicit" => {
                let p = self.params.over(ViParams::new(0.0, 0.0, 0.0, 0.0, 0.0)?)?;
                ParamSource::ExplicitVi {
                    alpha: p.alpha,
                    beta: p.beta,
                    gamma: p.gamma,
                    eta: p.eta,
                    tau: p.tau,
                }
            }
            other => return Err(CliError::Usage(format!("unknown preset '{other}'"))),
        };
        let formats = self
            .formats
            .iter()
            .map(|f| match f.as_str() {
                "csv" => Ok(Format::Csv),
                "jsonl" => Ok(Format::Jsonl),
                _ => Err(CliError::Usage(format!("unknown format '{f}'"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = ExperimentConfig {
            problem: ProblemConfig { source, start },
            methods: names
                .into_iter()
                .map(|name| MethodConfig {
                    name,
                    params,
                    max_iter: self.max_iter,
                    tol: self.tol,
                })
                .collect(),
            output: OutputConfig {
                directory: self.out.clone(),
                formats,
                thinning: self.thinning,
                summary_tol: self.summary_tol,
            },
        };
        cfg.validate().map_err(|e| CliError::Usage(e.0))?;
        Ok(cfg)
    }
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let g = args.problem.generator()?;
    let inst = experiment::generate(&g)?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-n{}-s{}.txt", inst.kind().name(), inst.dim(), inst.seed())));
    inst.write_to(&path)?;
    let problem = inst.vi_problem()?;
    let (mu_hat, lip_hat) = estimate_constants(&problem, args.trials, inst.seed())?;
    let (mu, lip) = (inst.mu(), inst.lip());
    let w = |out: &mut dyn std::io::Write, k: &str, a: f64, b: f64| writeln!(out, "{k:<8} {a:>14.6e} {b:>14.6e}");
    let io = |e: std::io::Error| CliError::Runtime(e.to_string());
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    writeln!(out, "{:<8} {:>14} {:>14}", "", "stored", "estimated").map_err(io)?;
    w(out, "mu", mu, mu_hat).map_err(io)?;
    w(out, "L", lip, lip_hat).map_err(io)?;
    w(out, "sigma", mu / lip, mu_hat / lip_hat).map_err(io)?;
    w(out, "kappa", lip / mu, lip_hat / mu_hat).map_err(io)?;
    Ok(EXIT_OK)
}

fn certificate_for(args: &CertifyArgs) -> Result<RateCertificate, CliError> {
    let (mu, lip) = (args.mu, args.lip);
    let preset = match args.preset.as_deref() {
        None => false,
        Some("paper-default") => true,
        Some(p) => return Err(CliError::Usage(format!("certify knows only the paper-default preset, not '{p}'"))),
    };
    let zero = ViParams::new(0.0, 0.0, 0.0, 0.0, 0.0)?;
    let vi = |regime: Regime| -> Result<ViParams, CliError> {
        if !preset && !args.params.any() {
            return Err(CliError::Usage("give parameter values or --preset paper-default".into()));
        }
        let base = if preset { default_vi_params(regime, mu, lip)? } else { zero };
        args.params.over(base)
    };
    let classical = |default: ViParams| -> Result<ViParams, CliError> {
        if !preset && !args.params.any() {
            return Err(CliError::Usage("give parameter values or --preset paper-default".into()));
        }
        args.params.over(if preset { default } else { zero })
    };
    if !(mu > 0.0 && lip >= mu) {
        return Err(CliError::Usage(format!("need 0 < mu <= lip, got mu = {mu}, lip = {lip}")));
    }
    Ok(match args.regime.as_str() {
        "vi-unrestricted" => certify_vi_unrestricted(mu, lip, &vi(Regime::ViUnrestricted)?)?,
        "vi-restricted" => certify_vi_restricted(mu, lip, &vi(Regime::ViRestricted)?)?,
        "opt" => {
            if args.params.any() {
                return Err(CliError::Usage("the opt regime is parametrized by --delta".into()));
            }
            certify_opt(mu, lip, &default_opt_params(mu, lip, args.delta)?)?
        }
        "vanilla" => {
            let p = classical(ViParams::vanilla(mu / (lip * lip)))?;
            certify_vanilla(mu, lip, p.alpha)?
        }
        "extragradient" => {
            let s = 1.0 / (4.0 * lip);
            let p = classical(ViParams::extragradient(s, s))?;
            certify_extragradient(mu, lip, p.alpha, p.eta)?
        }
        "ogda" => {
            let a = 1.0 / (2.0 * lip);
            let p = classical(ViParams::ogda(a, a / (1.0 + mu / lip)))?;
            certify_ogda(mu, lip, p.alpha, p.tau)?
        }
        other => return Err(CliError::Usage(format!("unknown regime '{other}'"))),
    })
}

fn cmd_certify(args: &CertifyArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let cert = certificate_for(args)?;
    let io = |e: std::io::Error| CliError::Runtime(e.to_string());
    write!(out, "{}", cert.to_text()).map_err(io)?;
    if !cert.feasible {
        return Ok(EXIT_INFEASIBLE);
    }
    let mut rate = cert.rate;
    if let Some(theta) = args.theta {
        if !matches!(cert.kind, vi_accel::certify::CertKind::ViUnrestricted | vi_accel::certify::CertKind::ViRestricted) {
            return Err(CliError::Usage("--theta applies to the vi regimes only".into()));
        }
        rate = cert.rate_for_theta(theta)?;
        writeln!(out, "theta = {theta}").map_err(io)?;
        writeln!(out, "rate_at_theta = {rate}").map_err(io)?;
    }
    let bounded = RateCertificate { rate, ..cert };
    let k = iteration_bound(&bounded, args.gap, args.tol)?;
    writeln!(out, "iteration_bound = {k}").map_err(io)?;
    writeln!(out, "iteration_bound.gap = {}", args.gap).map_err(io)?;
    writeln!(out, "iteration_bound.tol = {}", args.tol).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_run(args: &RunArgs, single: bool, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let cfg = args.to_config(single)?;
    let result = experiment::run_experiment(&cfg)?;
    let io = |e: std::io::Error| CliError::Runtime(e.to_string());
    write!(out, "{}", result.summary).map_err(io)?;
    writeln!(out, "traces in {}", cfg.output.directory.display()).map_err(io)?;
    if result.any_violation() || result.any_divergence() {
        eprintln!("warning: a run diverged or violated its certificate (see summary)");
        if args.strict {
            return Ok(EXIT_VIOLATION);
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command, writing
/// normal output to `out`. Returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Solve(a) => cmd_run(a, true, out),
        Command::Compare(a) => cmd_run(a, false, out),
    };
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            EXIT_RUNTIME
        }
    }
}
