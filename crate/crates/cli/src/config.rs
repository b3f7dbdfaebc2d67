//! Experiment files: flat `key = value` lines with dotted sections.
//!
//! ```text
//! # comments start with '#'
//! problem.kind = linear-vi          # linear-vi | quadratic | logistic | bilinear-saddle
//! problem.n = 20
//! problem.seed = 7
//! problem.sigma = 0.01              # linear-vi, quadratic
//! problem.constrained = true        # linear-vi
//! problem.samples = 40              # logistic
//! problem.lambda = 0.01             # logistic
//! problem.ny = 10                   # bilinear-saddle (n is the x block)
//! problem.mu_x = 0.1                # bilinear-saddle
//! problem.mu_y = 0.1                # bilinear-saddle
//! problem.file = inst.txt           # instead of the generator keys
//! problem.start = zeros             # zeros | ones | gaussian:<seed>
//!
//! output.directory = runs
//! output.formats = csv,jsonl
//! output.thinning = 1
//! output.summary_tol = 1e-6
//!
//! method.1.name = extra-point
//! method.1.preset = table           # table | paper-default | explicit
//! method.1.max_iter = 20000
//! method.1.tol = 1e-10
//! method.1.alpha = 0.02             # explicit VI parameters, absent = 0
//! method.1.delta = 0.5              # paper-default for opt-extra-point
//! method.1.t1 = ...                 # explicit opt-extra-point: t1..t9, theta, c, delta
//! ```
//!
//! Method indices only order the methods; they need not be contiguous.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use vi_accel::problems::ProblemKind;

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    LinearVi { n: usize, seed: u64, sigma: f64, constrained: bool },
    Quadratic { n: usize, seed: u64, sigma: f64 },
    Logistic { n: usize, seed: u64, samples: usize, lambda: f64 },
    Bilinear { nx: usize, ny: usize, seed: u64, mu_x: f64, mu_y: f64 },
}

impl Generator {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Self::LinearVi { .. } => ProblemKind::LinearVi,
            Self::Quadratic { .. } => ProblemKind::Quadratic,
            Self::Logistic { .. } => ProblemKind::Logistic,
            Self::Bilinear { .. } => ProblemKind::BilinearSaddle,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    Generate(Generator),
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StartPoint {
    Zeros,
    Ones,
    Gaussian(u64),
}

impl StartPoint {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zeros" => Some(Self::Zeros),
            "ones" => Some(Self::Ones),
            _ => s.strip_prefix("gaussian:")?.parse().ok().map(Self::Gaussian),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Zeros => "zeros".into(),
            Self::Ones => "ones".into(),
            Self::Gaussian(seed) => format!("gaussian:{seed}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    pub source: ProblemSource,
    pub start: StartPoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamSource {
    /// Certified defaults; `delta` only matters for the optimization scheme.
    PaperDefault { delta: Option<f64> },
    Table,
    ExplicitVi { alpha: f64, beta: f64, gamma: f64, eta: f64, tau: f64 },
    ExplicitOpt { t: [f64; 9], theta: f64, c: f64, delta: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodConfig {
    pub name: String,
    pub params: ParamSource,
    pub max_iter: usize,
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Jsonl => "jsonl",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
    pub thinning: usize,
    pub summary_tol: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("vi-accel-out"),
            formats: vec![Format::Csv],
            thinning: 1,
            summary_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub methods: Vec<MethodConfig>,
    pub output: OutputConfig,
}

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-10;

pub const VI_NAMES: [&str; 9] = [
    "vanilla",
    "gradient-descent",
    "extragradient",
    "extragradient-restricted",
    "ogda",
    "heavy-ball",
    "nesterov",
    "extra-point",
    "extra-point-restricted",
];
pub const OPT_NAMES: [&str; 2] = ["opt-extra-point", "opt-extra-point-grad"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Shortest text that parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct Keys {
    map: BTreeMap<String, (usize, String)>,
}

impl Keys {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => match v.parse() {
                Ok(x) => Ok(Some(x)),
                Err(_) => err(format!("line {line}: cannot parse '{v}' for {key}")),
            },
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ConfigError> {
        self.parse(key)?.ok_or_else(|| ConfigError(format!("missing key {key}")))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {}: expected 'key = value'", i + 1));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || k.contains(char::is_whitespace) {
                return err(format!("line {}: bad key '{k}'", i + 1));
            }
            if map.insert(k.to_string(), (i + 1, v.to_string())).is_some() {
                return err(format!("line {}: duplicate key {k}", i + 1));
            }
        }
        let mut keys = Keys { map };
        let problem = parse_problem(&mut keys)?;
        let output = parse_output(&mut keys)?;

        let mut indices: Vec<u32> = Vec::new();
        for k in keys.map.keys() {
            if let Some(rest) = k.strip_prefix("method.") {
                let idx = rest.split('.').next().unwrap_or("");
                match idx.parse::<u32>() {
                    Ok(i) if !indices.contains(&i) => indices.push(i),
                    Ok(_) => {}
                    Err(_) => return err(format!("bad method index in key {k}")),
                }
            }
        }
        indices.sort_unstable();
        let methods = indices
            .iter()
            .map(|i| parse_method(&mut keys, &format!("method.{i}.")))
            .collect::<Result<Vec<_>, _>>()?;

        if let Some((k, (line, _))) = keys.map.iter().next() {
            return err(format!("line {line}: unknown key {k}"));
        }
        let cfg = Self {
            problem,
            methods,
            output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        match &self.problem.source {
            ProblemSource::File(p) => kv("problem.file", p.display().to_string()),
            ProblemSource::Generate(g) => {
                kv("problem.kind", g.kind().name().to_string());
                match *g {
                    Generator::LinearVi {
                        n,
                        seed,
                        sigma,
                        constrained,
                    } => {
                        kv("problem.n", n.to_string());
                        kv("problem.seed", seed.to_string());
                        kv("problem.sigma", fmt_f64(sigma));
                        kv("problem.constrained", constrained.to_string());
                    }
                    Generator::Quadratic { n, seed, sigma } => {
                        kv("problem.n", n.to_string());
                        kv("problem.seed", seed.to_string());
                        kv("problem.sigma", fmt_f64(sigma));
                    }
                    Generator::Logistic {
                        n,
                        seed,
                        samples,
                        lambda,
                    } => {
                        kv("problem.n", n.to_string());
                        kv("problem.seed", seed.to_string());
                        kv("problem.samples", samples.to_string());
                        kv("problem.lambda", fmt_f64(lambda));
                    }
                    Generator::Bilinear {
                        nx,
                        ny,
                        seed,
                        mu_x,
                        mu_y,
                    } => {
                        kv("problem.n", nx.to_string());
                        kv("problem.ny", ny.to_string());
                        kv("problem.seed", seed.to_string());
                        kv("problem.mu_x", fmt_f64(mu_x));
                        kv("problem.mu_y", fmt_f64(mu_y));
                    }
                }
            }
        }
        kv("problem.start", self.problem.start.name());
        kv("output.directory", self.output.directory.display().to_string());
        kv(
            "output.formats",
            self.output.formats.iter().map(|f| f.name()).collect::<Vec<_>>().join(","),
        );
        kv("output.thinning", self.output.thinning.to_string());
        kv("output.summary_tol", fmt_f64(self.output.summary_tol));
        for (i, m) in self.methods.iter().enumerate() {
            let p = format!("method.{}.", i + 1);
            kv(&format!("{p}name"), m.name.clone());
            kv(&format!("{p}max_iter"), m.max_iter.to_string());
            kv(&format!("{p}tol"), fmt_f64(m.tol));
            match m.params {
                ParamSource::PaperDefault { delta } => {
                    kv(&format!("{p}preset"), "paper-default".into());
                    if let Some(d) = delta {
                        kv(&format!("{p}delta"), fmt_f64(d));
                    }
                }
                ParamSource::Table => kv(&format!("{p}preset"), "table".into()),
                ParamSource::ExplicitVi {
                    alpha,
                    beta,
                    gamma,
                    eta,
                    tau,
                } => {
                    kv(&format!("{p}preset"), "explicit".into());
                    for (k, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("eta", eta), ("tau", tau)] {
                        kv(&format!("{p}{k}"), fmt_f64(v));
                    }
                }
                ParamSource::ExplicitOpt { t, theta, c, delta } => {
                    kv(&format!("{p}preset"), "explicit".into());
                    for (j, v) in t.iter().enumerate() {
                        kv(&format!("{p}t{}", j + 1), fmt_f64(*v));
                    }
                    kv(&format!("{p}theta"), fmt_f64(theta));
                    kv(&format!("{p}c"), fmt_f64(c));
                    kv(&format!("{p}delta"), fmt_f64(delta));
                }
            }
        }
        out
    }

    /// Checks everything that does not need the problem instance itself.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.methods.is_empty() {
            return err("at least one method is required");
        }
        if self.output.thinning == 0 {
            return err("output.thinning must be positive");
        }
        if !(self.output.summary_tol > 0.0) {
            return err("output.summary_tol must be positive");
        }
        let kind = match &self.problem.source {
            ProblemSource::Generate(g) => Some(g.kind()),
            ProblemSource::File(_) => None,
        };
        for m in &self.methods {
            validate_method(m, kind)?;
        }
        Ok(())
    }
}

/// Checks one method against the problem kind (when known).
pub fn validate_method(m: &MethodConfig, kind: Option<ProblemKind>) -> Result<(), ConfigError> {
    let is_opt_name = OPT_NAMES.contains(&m.name.as_str());
    if !is_opt_name && !VI_NAMES.contains(&m.name.as_str()) {
        return err(format!("unknown method '{}'", m.name));
    }
    if !(m.tol >= 0.0) {
        return err(format!("{}: tol must be nonnegative", m.name));
    }
    if let Some(kind) = kind {
        if is_opt_name && !kind.is_optimization() {
            return err(format!("{} needs a minimization problem, not {}", m.name, kind.name()));
        }
    }
    match m.params {
        ParamSource::Table => {
            let listed = match kind.map(|k| k.is_optimization()) {
                Some(true) => {
                    m.name == "opt-extra-point" || vi_accel::presets::OPT_TABLE_METHODS.contains(&m.name.as_str())
                }
                Some(false) if kind == Some(ProblemKind::LinearVi) => {
                    vi_accel::presets::VI_TABLE_METHODS.contains(&m.name.as_str())
                }
                Some(false) => return err(format!("no table presets for {}", kind.unwrap().name())),
                None => true,
            };
            if !listed {
                return err(format!("no table preset for '{}' on this problem kind", m.name));
            }
        }
        ParamSource::ExplicitVi { .. } if is_opt_name => {
            return err(format!("{} takes t1..t9, theta, c and delta", m.name));
        }
        ParamSource::ExplicitOpt { .. } if !is_opt_name => {
            return err(format!("{} takes alpha, beta, gamma, eta and tau", m.name));
        }
        _ => {}
    }
    Ok(())
}

fn parse_problem(keys: &mut Keys) -> Result<ProblemConfig, ConfigError> {
    let start = match keys.take("problem.start") {
        None => StartPoint::Zeros,
        Some((line, v)) => StartPoint::parse(&v)
            .ok_or_else(|| ConfigError(format!("line {line}: problem.start must be zeros, ones or gaussian:<seed>")))?,
    };
    if let Some((_, path)) = keys.take("problem.file") {
        return Ok(ProblemConfig {
            source: ProblemSource::File(PathBuf::from(path)),
            start,
        });
    }
    let (line, kind) = keys
        .take("problem.kind")
        .ok_or_else(|| ConfigError("missing problem.kind or problem.file".into()))?;
    let kind = ProblemKind::parse(&kind).ok_or_else(|| ConfigError(format!("line {line}: unknown problem kind '{kind}'")))?;
    let n: usize = keys.require("problem.n")?;
    let seed: u64 = keys.require("problem.seed")?;
    let g = match kind {
        ProblemKind::LinearVi => Generator::LinearVi {
            n,
            seed,
            sigma: keys.require("problem.sigma")?,
            constrained: keys.parse("problem.constrained")?.unwrap_or(false),
        },
        ProblemKind::Quadratic => Generator::Quadratic {
            n,
            seed,
            sigma: keys.require("problem.sigma")?,
        },
        ProblemKind::Logistic => Generator::Logistic {
            n,
            seed,
            samples: keys.require("problem.samples")?,
            lambda: keys.require("problem.lambda")?,
        },
        ProblemKind::BilinearSaddle => Generator::Bilinear {
            nx: n,
            ny: keys.require("problem.ny")?,
            seed,
            mu_x: keys.require("problem.mu_x")?,
            mu_y: keys.require("problem.mu_y")?,
        },
    };
    Ok(ProblemConfig {
        source: ProblemSource::Generate(g),
        start,
    })
}

fn parse_output(keys: &mut Keys) -> Result<OutputConfig, ConfigError> {
    let d = OutputConfig::default();
    let formats = match keys.take("output.formats") {
        None => d.formats,
        Some((line, v)) => {
            let mut fs = Vec::new();
            for f in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let f = match f {
                    "csv" => Format::Csv,
                    "jsonl" => Format::Jsonl,
                    _ => return err(format!("line {line}: unknown format '{f}'")),
                };
                if !fs.contains(&f) {
                    fs.push(f);
                }
            }
            fs
        }
    };
    Ok(OutputConfig {
        directory: keys.take("output.directory").map(|(_, v)| PathBuf::from(v)).unwrap_or(d.directory),
        formats,
        thinning: keys.parse("output.thinning")?.unwrap_or(d.thinning),
        summary_tol: keys.parse("output.summary_tol")?.unwrap_or(d.summary_tol),
    })
}

fn parse_method(keys: &mut Keys, p: &str) -> Result<MethodConfig, ConfigError> {
    let k = |s: &str| format!("{p}{s}");
    let name: String = keys.require(&k("name"))?;
    let preset = keys.take(&k("preset")).map(|(_, v)| v);
    let params = match preset.as_deref() {
        Some("paper-default") => ParamSource::PaperDefault {
            delta: keys.parse(&k("delta"))?,
        },
        Some("table") => ParamSource::Table,
        Some("explicit") | None if OPT_NAMES.contains(&name.as_str()) => {
            let mut t = [0.0; 9];
            for (j, slot) in t.iter_mut().enumerate() {
                *slot = keys.require(&k(&format!("t{}", j + 1)))?;
            }
            ParamSource::ExplicitOpt {
                t,
                theta: keys.require(&k("theta"))?,
                c: keys.require(&k("c"))?,
                delta: keys.require(&k("delta"))?,
            }
        }
        Some("explicit") | None => {
            let mut get = |s: &str| keys.parse(&k(s)).map(|v| v.unwrap_or(0.0));
            ParamSource::ExplicitVi {
                alpha: get("alpha")?,
                beta: get("beta")?,
                gamma: get("gamma")?,
                eta: get("eta")?,
                tau: get("tau")?,
            }
        }
        Some(other) => return err(format!("{p}preset: unknown preset '{other}'")),
    };
    Ok(MethodConfig {
        name,
        params,
        max_iter: keys.parse(&k("max_iter"))?.unwrap_or(DEFAULT_MAX_ITER),
        tol: keys.parse(&k("tol"))?.unwrap_or(DEFAULT_TOL),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
        problem.kind = linear-vi   # the VI family
        problem.n = 20
        problem.seed = 7
        problem.sigma = 1e-2
        problem.constrained = true
        output.formats = csv, jsonl
        method.2.name = vanilla
        method.2.preset = table
        method.10.name = extra-point
        method.10.preset = explicit
        method.10.alpha = 0.021
        method.10.tau = 0.0021
    ";

    #[test]
    fn parses_sample_in_index_order() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.methods.len(), 2);
        assert_eq!(cfg.methods[0].name, "vanilla");
        assert_eq!(cfg.methods[0].params, ParamSource::Table);
        assert_eq!(
            cfg.methods[1].params,
            ParamSource::ExplicitVi {
                alpha: 0.021,
                beta: 0.0,
                gamma: 0.0,
                eta: 0.0,
                tau: 0.0021
            }
        );
        assert_eq!(cfg.output.formats, vec![Format::Csv, Format::Jsonl]);
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_and_mismatched_keys() {
        assert!(ExperimentConfig::parse(&format!("{SAMPLE}\nproblem.lambda = 1")).is_err());
        assert!(ExperimentConfig::parse(&format!("{SAMPLE}\nmethod.2.colour = red")).is_err());
        let no_methods = "problem.kind = quadratic\nproblem.n = 3\nproblem.seed = 1\nproblem.sigma = 0.1\n";
        assert!(ExperimentConfig::parse(no_methods).unwrap_err().0.contains("at least one method"));
    }

    #[test]
    fn table_presets_follow_problem_kind() {
        let quad = "problem.kind = quadratic\nproblem.n = 3\nproblem.seed = 1\nproblem.sigma = 0.1\n";
        assert!(ExperimentConfig::parse(&format!("{quad}method.1.name = gradient-descent\nmethod.1.preset = table")).is_ok());
        assert!(ExperimentConfig::parse(&format!("{quad}method.1.name = vanilla\nmethod.1.preset = table")).is_err());
        let vi = "problem.kind = linear-vi\nproblem.n = 3\nproblem.seed = 1\nproblem.sigma = 0.1\n";
        assert!(ExperimentConfig::parse(&format!("{vi}method.1.name = opt-extra-point\nmethod.1.preset = paper-default")).is_err());
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.0, 1e-10, 0.1, 1.0 / 3.0, 123456789.0, -2.5e-300] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
