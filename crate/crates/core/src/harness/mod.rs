//! Merits, iterate traces, rate checks against certificates, and numerical oracles.

mod contraction;
mod export;
mod oracles;

use crate::problem::{natural_residual_with, MonotoneProblem, SmoothObjective};
use crate::solvers::{OptParams, ViParams};
use crate::vector::RealVector;

pub use contraction::{check_contraction, ContractionReport, CONTRACTION_TOL};
pub use export::{trace_to_csv, trace_to_jsonl, CSV_HEADER};
pub use oracles::{finite_diff_grad, power_iteration_norm, reference_optimum, LinearMap, ReferenceRun};

/// Relative distance below which iterates are treated as indistinguishable from
/// the reference solution (rounding in one step and in z* itself dominates).
pub const RESOLUTION_REL: f64 = 1e-6;

/// Quantity whose geometric decay a certificate asserts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential {
    /// `‖z^k − z*‖²`
    Distance,
    /// `‖z^k − z*‖² + θ‖z^{k−1} − z*‖²`
    TwoTerm { theta: f64 },
    /// `‖z^k − z*‖² + 2τ(z^k − z*)ᵀ(F(z^{k−1}) − F(z^k)) + (1 − Lτ)/(1 + σ)·‖z^k − z^{k−1}‖²`
    Ogda { tau: f64 },
    /// `f(x^k) − f* + C‖v^k − x*‖²`
    Lyapunov { c: f64 },
}

impl Potential {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Distance => "distance",
            Self::TwoTerm { .. } => "two-term",
            Self::Ogda { .. } => "optimistic",
            Self::Lyapunov { .. } => "lyapunov",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    MaxIter,
    Divergence,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tolerance => "tolerance",
            Self::MaxIter => "max-iter",
            Self::Divergence => "divergence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceParams {
    Vi(ViParams),
    Opt(OptParams),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub merit_primary: f64,
    pub merit_aux: f64,
    pub dist_sq: Option<f64>,
    pub potential: Option<f64>,
    pub elapsed_ns: u64,
}

impl TraceRecord {
    /// Equality ignoring wall time.
    pub fn same_values(&self, other: &Self) -> bool {
        self.k == other.k
            && self.merit_primary.to_bits() == other.merit_primary.to_bits()
            && self.merit_aux.to_bits() == other.merit_aux.to_bits()
            && self.dist_sq.map(f64::to_bits) == other.dist_sq.map(f64::to_bits)
            && self.potential.map(f64::to_bits) == other.potential.map(f64::to_bits)
    }
}

/// Per-iteration record of one solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateTrace {
    pub method: String,
    pub params: TraceParams,
    /// Which potential the `potential` column holds (set iff the solution is known).
    pub potential: Option<Potential>,
    pub records: Vec<TraceRecord>,
    /// Iterates aligned with `records`, when kept.
    pub iterates: Vec<RealVector>,
    pub terminated_by: Termination,
    /// Smallest meaningful distance to the solution (see [`RESOLUTION_REL`]).
    pub resolution: Option<f64>,
    pub metadata: Vec<(String, String)>,
}

impl IterateTrace {
    pub fn new(method: impl Into<String>, params: TraceParams) -> Self {
        Self {
            method: method.into(),
            params,
            potential: None,
            records: Vec::new(),
            iterates: Vec::new(),
            terminated_by: Termination::MaxIter,
            resolution: None,
            metadata: Vec::new(),
        }
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("trace has at least the initial record")
    }

    /// Number of iterations performed.
    pub fn iterations(&self) -> usize {
        self.last().k
    }

    /// First recorded iteration whose primary merit is at most `tol`.
    pub fn first_below(&self, tol: f64) -> Option<usize> {
        self.records.iter().find(|r| r.merit_primary <= tol).map(|r| r.k)
    }

    /// First recorded iteration from which the primary merit stays at most `tol`.
    pub fn settled_below(&self, tol: f64) -> Option<usize> {
        let last_above = self.records.iter().rposition(|r| !(r.merit_primary <= tol));
        match last_above {
            None => self.records.first().map(|r| r.k),
            Some(i) => self.records.get(i + 1).map(|r| r.k),
        }
    }

    /// First recorded iteration with `‖z^k − z*‖ ≤ tol`.
    pub fn first_within(&self, tol: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.dist_sq.is_some_and(|d| d.sqrt() <= tol))
            .map(|r| r.k)
    }

    /// First recorded iteration from which `‖z^k − z*‖ ≤ tol` holds for good.
    pub fn settled_within(&self, tol: f64) -> Option<usize> {
        let outside = |r: &TraceRecord| !r.dist_sq.is_some_and(|d| d.sqrt() <= tol);
        match self.records.iter().rposition(outside) {
            None => self.records.first().map(|r| r.k),
            Some(i) => self.records.get(i + 1).map(|r| r.k),
        }
    }

    /// Equality ignoring wall time.
    pub fn same_values(&self, other: &Self) -> bool {
        self.method == other.method
            && self.params == other.params
            && self.potential == other.potential
            && self.terminated_by == other.terminated_by
            && self.iterates == other.iterates
            && self.records.len() == other.records.len()
            && self
                .records
                .iter()
                .zip(&other.records)
                .all(|(a, b)| a.same_values(b))
    }
}

/// VI merits: `(‖F(z)‖, natural residual)` over the whole space and
/// `(|zᵀF(z)|, natural residual)` over a constrained set.
pub fn merit_vi(problem: &MonotoneProblem, z: &RealVector) -> (f64, f64) {
    merit_vi_with(problem, z, &problem.eval(z))
}

pub(crate) fn merit_vi_with(problem: &MonotoneProblem, z: &RealVector, fz: &RealVector) -> (f64, f64) {
    let residual = natural_residual_with(problem, z, fz);
    if problem.set().is_whole_space() {
        (fz.norm(), residual)
    } else {
        (z.dot(fz).abs(), residual)
    }
}

/// Optimization merits: `(‖∇f(x)‖, f(x) − f*)`, or `f(x)` itself when f* is unknown.
pub fn merit_opt(objective: &SmoothObjective, x: &RealVector) -> (f64, f64) {
    let g = objective.gradient(x).norm();
    let aux = objective.gap(x).unwrap_or_else(|| objective.value(x));
    (g, aux)
}
