//! Plain-text problem files.
//!
//! ```text
//! vi-accel-problem v1
//! kind=linear-vi
//! n=20
//! seed=7
//! mu=1.8312049071331441e-1
//! lip=1.9594869224722813e1
//! constrained=false
//! vector q_diag 20
//! <20 space-separated values>
//! matrix a_skew 20 20
//! <20 lines of 20 values>
//! ...
//! ```
//!
//! Scalars are `key=value` lines; arrays are `vector <name> <len>` followed by
//! one line, or `matrix <name> <rows> <cols>` followed by one line per row.
//! Reals are written in scientific notation with 17 significant digits, so a
//! write/read cycle reproduces every field bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::problem::{MonotoneProblem, SmoothObjective};
use crate::vector::RealVector;

use super::bilinear::{gen_bilinear_spec, BilinearSpec};
use super::linear::{gen_linear_vi_spec, solve_linear_reference, LinearOperatorSpec};
use super::logistic::{gen_logistic_spec, LogisticSpec};
use super::quadratic::{gen_quadratic_spec, QuadraticSpec};

pub const FORMAT_HEADER: &str = "vi-accel-problem v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    LinearVi,
    Quadratic,
    Logistic,
    BilinearSaddle,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::LinearVi => "linear-vi",
            Self::Quadratic => "quadratic",
            Self::Logistic => "logistic",
            Self::BilinearSaddle => "bilinear-saddle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear-vi" => Some(Self::LinearVi),
            "quadratic" => Some(Self::Quadratic),
            "logistic" => Some(Self::Logistic),
            "bilinear-saddle" => Some(Self::BilinearSaddle),
            _ => None,
        }
    }

    /// Whether the instance is a minimization problem (as opposed to a genuine VI).
    pub fn is_optimization(self) -> bool {
        matches!(self, Self::Quadratic | Self::Logistic)
    }
}

/// A generated instance together with everything needed to rebuild it.
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemInstance {
    LinearVi {
        seed: u64,
        constrained: bool,
        spec: LinearOperatorSpec,
        mu: f64,
        lip: f64,
        solution: RealVector,
    },
    Quadratic {
        seed: u64,
        spec: QuadraticSpec,
        mu: f64,
        lip: f64,
        minimizer: RealVector,
    },
    Logistic {
        seed: u64,
        spec: LogisticSpec,
        mu: f64,
        lip: f64,
    },
    BilinearSaddle {
        seed: u64,
        spec: BilinearSpec,
        mu: f64,
        lip: f64,
    },
}

impl ProblemInstance {
    pub fn linear_vi(n: usize, seed: u64, target_sigma: f64, constrained: bool) -> Result<Self> {
        let spec = gen_linear_vi_spec(n, seed, target_sigma)?;
        let set = spec.problem(constrained)?.set().clone();
        let solution = solve_linear_reference(&spec, &set)?;
        Ok(Self::LinearVi {
            seed,
            constrained,
            mu: spec.mu(),
            lip: spec.lip(),
            spec,
            solution,
        })
    }

    pub fn quadratic(n: usize, seed: u64, target_sigma: f64) -> Result<Self> {
        let spec = gen_quadratic_spec(n, seed, target_sigma)?;
        Ok(Self::Quadratic {
            seed,
            mu: spec.mu(),
            lip: spec.lip(),
            minimizer: spec.minimizer()?,
            spec,
        })
    }

    pub fn logistic(n: usize, n_samples: usize, lambda: f64, seed: u64) -> Result<Self> {
        let spec = gen_logistic_spec(n, n_samples, lambda, seed)?;
        Ok(Self::Logistic {
            seed,
            mu: spec.lambda,
            lip: spec.lip(seed),
            spec,
        })
    }

    pub fn bilinear_saddle(nx: usize, ny: usize, seed: u64, mu_x: f64, mu_y: f64) -> Result<Self> {
        let spec = gen_bilinear_spec(nx, ny, seed, mu_x, mu_y)?;
        Ok(Self::BilinearSaddle {
            seed,
            mu: spec.mu(),
            lip: spec.lip(),
            spec,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            Self::LinearVi { .. } => ProblemKind::LinearVi,
            Self::Quadratic { .. } => ProblemKind::Quadratic,
            Self::Logistic { .. } => ProblemKind::Logistic,
            Self::BilinearSaddle { .. } => ProblemKind::BilinearSaddle,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::LinearVi { spec, .. } => spec.dim(),
            Self::Quadratic { spec, .. } => spec.dim(),
            Self::Logistic { spec, .. } => spec.dim(),
            Self::BilinearSaddle { spec, .. } => spec.nx() + spec.ny(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::LinearVi { seed, .. }
            | Self::Quadratic { seed, .. }
            | Self::Logistic { seed, .. }
            | Self::BilinearSaddle { seed, .. } => *seed,
        }
    }

    pub fn mu(&self) -> f64 {
        match self {
            Self::LinearVi { mu, .. }
            | Self::Quadratic { mu, .. }
            | Self::Logistic { mu, .. }
            | Self::BilinearSaddle { mu, .. } => *mu,
        }
    }

    pub fn lip(&self) -> f64 {
        match self {
            Self::LinearVi { lip, .. }
            | Self::Quadratic { lip, .. }
            | Self::Logistic { lip, .. }
            | Self::BilinearSaddle { lip, .. } => *lip,
        }
    }

    pub fn constrained(&self) -> bool {
        matches!(self, Self::LinearVi { constrained: true, .. })
    }

    /// Objective for the minimization kinds, `None` for VI kinds.
    pub fn objective(&self) -> Option<Result<SmoothObjective>> {
        match self {
            Self::Quadratic {
                spec,
                mu,
                lip,
                minimizer,
                ..
            } => Some(spec.objective().and_then(|f| {
                debug_assert_eq!(f.mu(), *mu);
                f.with_lip(*lip)?.with_minimizer(minimizer.clone())
            })),
            Self::Logistic { spec, lip, .. } => Some(spec.objective_with_lip(*lip)),
            _ => None,
        }
    }

    /// The instance as a VI; minimization kinds yield their gradient field.
    pub fn vi_problem(&self) -> Result<MonotoneProblem> {
        match self {
            Self::LinearVi {
                spec,
                constrained,
                mu,
                lip,
                solution,
                ..
            } => {
                let p = spec.problem(*constrained)?;
                MonotoneProblem::new(p.operator().clone(), p.set().clone(), *mu, *lip)?
                    .with_solution(solution.clone())
            }
            Self::BilinearSaddle { spec, mu, lip, .. } => {
                let p = spec.problem()?;
                MonotoneProblem::new(p.operator().clone(), p.set().clone(), *mu, *lip)?
                    .with_solution(p.solution().cloned().expect("saddle has a solution"))
            }
            _ => Ok(self
                .objective()
                .expect("minimization kind")?
                .as_gradient_problem()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = Writer::default();
        w.line(FORMAT_HEADER);
        w.kv("kind", self.kind().name());
        w.kv("n", self.dim());
        w.kv("seed", self.seed());
        w.real("mu", self.mu());
        w.real("lip", self.lip());
        match self {
            Self::LinearVi {
                constrained,
                spec,
                solution,
                ..
            } => {
                w.kv("constrained", constrained);
                w.vector("q_diag", spec.q_diag.as_slice());
                w.matrix("a_skew", &spec.a_skew);
                w.vector("q", spec.q.as_slice());
                w.vector("solution", solution.as_slice());
            }
            Self::Quadratic { spec, minimizer, .. } => {
                w.matrix("m", &spec.m);
                w.vector("q", spec.q.as_slice());
                w.vector("eigenvalues", spec.eigenvalues.as_slice());
                w.vector("minimizer", minimizer.as_slice());
            }
            Self::Logistic { spec, .. } => {
                w.real("lambda", spec.lambda);
                w.matrix("samples", &spec.data_matrix());
            }
            Self::BilinearSaddle { spec, .. } => {
                w.real("mu_x", spec.mu_x);
                w.real("mu_y", spec.mu_y);
                w.matrix("b", &spec.b);
            }
        }
        w.0
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        let kind_name = doc.scalar("kind")?;
        let kind = ProblemKind::parse(kind_name)
            .ok_or_else(|| Error::parse(doc.line_of("kind"), format!("unknown kind '{kind_name}'")))?;
        let n: usize = doc.get("n")?;
        let seed: u64 = doc.get("seed")?;
        let mu: f64 = doc.get("mu")?;
        let lip: f64 = doc.get("lip")?;
        let inst = match kind {
            ProblemKind::LinearVi => {
                let q_diag = doc.vector("q_diag", n)?;
                let a_skew = doc.matrix("a_skew", n, n)?;
                let q = doc.vector("q", n)?;
                Self::LinearVi {
                    seed,
                    constrained: doc.get("constrained")?,
                    spec: LinearOperatorSpec::new(q_diag, a_skew, q)?,
                    mu,
                    lip,
                    solution: doc.vector("solution", n)?,
                }
            }
            ProblemKind::Quadratic => {
                let m = doc.matrix("m", n, n)?;
                Self::Quadratic {
                    seed,
                    spec: QuadraticSpec {
                        m,
                        q: doc.vector("q", n)?,
                        eigenvalues: doc.vector("eigenvalues", n)?,
                    },
                    mu,
                    lip,
                    minimizer: doc.vector("minimizer", n)?,
                }
            }
            ProblemKind::Logistic => {
                let rows = doc.block_rows("samples")?;
                let data = doc.matrix("samples", rows, n)?;
                let samples = data
                    .row_iter()
                    .map(|r| RealVector::new(r.iter().cloned().collect()))
                    .collect::<Result<Vec<_>>>()?;
                Self::Logistic {
                    seed,
                    spec: LogisticSpec::new(samples, doc.get("lambda")?)?,
                    mu,
                    lip,
                }
            }
            ProblemKind::BilinearSaddle => {
                let rows = doc.block_rows("b")?;
                if rows >= n {
                    return Err(Error::parse(doc.line_of("b"), "coupling block too large"));
                }
                let b = doc.matrix("b", rows, n - rows)?;
                Self::BilinearSaddle {
                    seed,
                    spec: BilinearSpec::new(b, doc.get("mu_x")?, doc.get("mu_y")?)?,
                    mu,
                    lip,
                }
            }
        };
        Ok(inst)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// 17 significant digits, round-trips exactly through `str::parse::<f64>`.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Default)]
struct Writer(String);

impl Writer {
    fn line(&mut self, s: &str) {
        self.0.push_str(s);
        self.0.push('\n');
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key}={value}");
    }

    fn real(&mut self, key: &str, value: f64) {
        self.kv(key, fmt_real(value));
    }

    fn row(&mut self, values: impl Iterator<Item = f64>) {
        let row: Vec<String> = values.map(fmt_real).collect();
        self.line(&row.join(" "));
    }

    fn vector(&mut self, name: &str, values: &[f64]) {
        let _ = writeln!(self.0, "vector {name} {}", values.len());
        self.row(values.iter().cloned());
    }

    fn matrix(&mut self, name: &str, m: &DMatrix<f64>) {
        let _ = writeln!(self.0, "matrix {name} {} {}", m.nrows(), m.ncols());
        for r in m.row_iter() {
            self.row(r.iter().cloned());
        }
    }
}

struct Block {
    line: usize,
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

struct Document {
    scalars: BTreeMap<String, (usize, String)>,
    blocks: BTreeMap<String, Block>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, FORMAT_HEADER)) => {}
            _ => return Err(Error::parse(1, format!("expected header '{FORMAT_HEADER}'"))),
        }
        let mut scalars = BTreeMap::new();
        let mut blocks = BTreeMap::new();
        while let Some((ln, line)) = lines.next() {
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or_default();
            if head == "vector" || head == "matrix" {
                let name = words
                    .next()
                    .ok_or_else(|| Error::parse(ln, "block without a name"))?
                    .to_string();
                let dims: Vec<usize> = words
                    .map(|w| w.parse().map_err(|_| Error::parse(ln, format!("bad block size '{w}'"))))
                    .collect::<Result<_>>()?;
                let (rows, cols, text_rows) = match (head, dims.as_slice()) {
                    ("vector", [len]) => (1, *len, 1),
                    ("matrix", [r, c]) => (*r, *c, *r),
                    _ => return Err(Error::parse(ln, "wrong number of block dimensions")),
                };
                let mut values = Vec::with_capacity(rows * cols);
                for _ in 0..text_rows {
                    let (rl, row) = lines
                        .next()
                        .ok_or_else(|| Error::parse(ln, format!("block '{name}' is truncated")))?;
                    let before = values.len();
                    for w in row.split_whitespace() {
                        values.push(parse_real(rl, w)?);
                    }
                    if values.len() - before != cols {
                        return Err(Error::parse(
                            rl,
                            format!("expected {cols} values, found {}", values.len() - before),
                        ));
                    }
                }
                if blocks
                    .insert(name.clone(), Block { line: ln, rows, cols, values })
                    .is_some()
                {
                    return Err(Error::parse(ln, format!("duplicate block '{name}'")));
                }
            } else if let Some((k, v)) = line.split_once('=') {
                if scalars
                    .insert(k.trim().to_string(), (ln, v.trim().to_string()))
                    .is_some()
                {
                    return Err(Error::parse(ln, format!("duplicate key '{}'", k.trim())));
                }
            } else {
                return Err(Error::parse(ln, format!("unrecognized line '{line}'")));
            }
        }
        Ok(Self { scalars, blocks })
    }

    fn line_of(&self, key: &str) -> usize {
        self.scalars
            .get(key)
            .map(|(l, _)| *l)
            .or_else(|| self.blocks.get(key).map(|b| b.line))
            .unwrap_or(0)
    }

    fn scalar(&self, key: &str) -> Result<&str> {
        self.scalars
            .get(key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::parse(0, format!("missing key '{key}'")))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.scalar(key)?;
        raw.parse()
            .map_err(|_| Error::parse(self.line_of(key), format!("bad value '{raw}' for '{key}'")))
    }

    fn block(&self, name: &str) -> Result<&Block> {
        self.blocks
            .get(name)
            .ok_or_else(|| Error::parse(0, format!("missing block '{name}'")))
    }

    fn block_rows(&self, name: &str) -> Result<usize> {
        Ok(self.block(name)?.rows)
    }

    fn vector(&self, name: &str, len: usize) -> Result<RealVector> {
        let b = self.block(name)?;
        if b.rows != 1 || b.cols != len {
            return Err(Error::parse(b.line, format!("block '{name}' should have length {len}")));
        }
        RealVector::new(b.values.clone())
    }

    fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
        let b = self.block(name)?;
        if b.rows != rows || b.cols != cols {
            return Err(Error::parse(
                b.line,
                format!("block '{name}' should be {rows}x{cols}"),
            ));
        }
        Ok(DMatrix::from_row_slice(rows, cols, &b.values))
    }
}

fn parse_real(line: usize, w: &str) -> Result<f64> {
    let v: f64 = w
        .parse()
        .map_err(|_| Error::parse(line, format!("bad number '{w}'")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite number '{w}'")));
    }
    Ok(v)
}
