use std::time::Instant;

use super::opt::{step_opt_extra_point, OptParams, OptState, YRule};
use super::vi::{
    step_extra_point, step_extragradient, step_heavy_ball, step_nesterov, step_ogda, step_vanilla,
    ViParams, ViState,
};
use crate::error::{Error, Result};
use crate::harness::{
    merit_vi_with, IterateTrace, Potential, Termination, TraceParams, TraceRecord, RESOLUTION_REL,
};
use crate::problem::{MonotoneProblem, SmoothObjective};
use crate::vector::RealVector;

/// A VI method together with which parameters of [`ViParams`] it reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// α
    Vanilla,
    /// α, η
    ExtraGradient { restricted: bool },
    /// α, τ
    Ogda,
    /// α, γ
    HeavyBall,
    /// α, β
    Nesterov,
    /// α, β, γ, η, τ
    ExtraPoint { restricted: bool },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Vanilla => "vanilla",
            Self::ExtraGradient { restricted: false } => "extragradient",
            Self::ExtraGradient { restricted: true } => "extragradient-restricted",
            Self::Ogda => "ogda",
            Self::HeavyBall => "heavy-ball",
            Self::Nesterov => "nesterov",
            Self::ExtraPoint { restricted: false } => "extra-point",
            Self::ExtraPoint { restricted: true } => "extra-point-restricted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "vanilla" => Self::Vanilla,
            "extragradient" => Self::ExtraGradient { restricted: false },
            "extragradient-restricted" => Self::ExtraGradient { restricted: true },
            "ogda" => Self::Ogda,
            "heavy-ball" => Self::HeavyBall,
            "nesterov" => Self::Nesterov,
            "extra-point" => Self::ExtraPoint { restricted: false },
            "extra-point-restricted" => Self::ExtraPoint { restricted: true },
            _ => return None,
        })
    }

    pub fn step(&self, problem: &MonotoneProblem, state: &ViState, p: &ViParams) -> Result<ViState> {
        match *self {
            Self::Vanilla => Ok(step_vanilla(problem, state, p.alpha)),
            Self::ExtraGradient { restricted } => step_extragradient(problem, state, p.alpha, p.eta, restricted),
            Self::Ogda => Ok(step_ogda(problem, state, p.alpha, p.tau)),
            Self::HeavyBall => Ok(step_heavy_ball(problem, state, p.alpha, p.gamma)),
            Self::Nesterov => Ok(step_nesterov(problem, state, p.alpha, p.beta)),
            Self::ExtraPoint { restricted } => step_extra_point(problem, state, p, restricted),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopCriteria {
    pub max_iter: usize,
    /// Natural residual for VIs, gradient norm for objectives.
    pub residual_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub stop: StopCriteria,
    /// Record every `thinning`-th iterate; the first and last are always kept.
    pub thinning: usize,
    /// Potential to record. Defaults to the optimistic potential for OGDA, the
    /// Lyapunov function for the optimization scheme and the squared distance otherwise.
    pub potential: Option<Potential>,
    pub keep_iterates: bool,
}

impl RunOptions {
    pub fn new(stop: StopCriteria) -> Self {
        Self {
            stop,
            thinning: 1,
            potential: None,
            keep_iterates: true,
        }
    }

    pub fn with_potential(mut self, potential: Potential) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn with_thinning(mut self, thinning: usize) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn without_iterates(mut self) -> Self {
        self.keep_iterates = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.thinning == 0 {
            return Err(Error::invalid("thinning must be positive"));
        }
        if !(self.stop.residual_tol >= 0.0) {
            return Err(Error::invalid("residual tolerance must be nonnegative"));
        }
        Ok(())
    }
}

struct Recorder<'a> {
    trace: IterateTrace,
    opts: &'a RunOptions,
    start: Instant,
}

impl<'a> Recorder<'a> {
    fn new(method: &str, params: TraceParams, potential: Option<Potential>, solution: Option<&RealVector>, opts: &'a RunOptions) -> Self {
        let mut trace = IterateTrace::new(method, params);
        trace.potential = potential;
        trace.resolution = solution.map(|s| RESOLUTION_REL * (1.0 + s.norm()));
        Self {
            trace,
            opts,
            start: Instant::now(),
        }
    }

    fn push(&mut self, record: TraceRecord, z: &RealVector, force: bool) {
        if force || record.k.is_multiple_of(self.opts.thinning) {
            self.trace.records.push(TraceRecord {
                elapsed_ns: self.start.elapsed().as_nanos() as u64,
                ..record
            });
            if self.opts.keep_iterates {
                self.trace.iterates.push(z.clone());
            }
        }
    }

    fn finish(mut self, how: Termination) -> IterateTrace {
        self.trace.terminated_by = how;
        self.trace
    }

    fn diverged(mut self, iteration: usize) -> Error {
        self.trace.terminated_by = Termination::Divergence;
        Error::Divergence {
            iteration,
            trace: Box::new(self.trace),
        }
    }
}

fn vi_potential(p: Potential, problem: &MonotoneProblem, s: &ViState, sol: &RealVector) -> f64 {
    let d = s.z_curr.dist_sq(sol);
    match p {
        Potential::Distance => d,
        Potential::TwoTerm { theta } => d + theta * s.z_prev.dist_sq(sol),
        Potential::Ogda { tau } => {
            let l = problem.lip();
            let cross = (&s.z_curr - sol).dot(&(&s.f_prev - &s.f_curr));
            d + 2.0 * tau * cross + (1.0 - l * tau) / (1.0 + problem.sigma()) * s.z_curr.dist_sq(&s.z_prev)
        }
        Potential::Lyapunov { .. } => unreachable!("rejected before the loop"),
    }
}

fn drive_vi(
    problem: &MonotoneProblem,
    method: Method,
    params: &ViParams,
    z0: &RealVector,
    opts: &RunOptions,
    merits: impl Fn(&ViState) -> (f64, f64, f64),
) -> Result<IterateTrace> {
    opts.validate()?;
    let default = match method {
        Method::Ogda => Potential::Ogda { tau: params.tau },
        _ => Potential::Distance,
    };
    let potential = opts.potential.unwrap_or(default);
    if matches!(potential, Potential::Lyapunov { .. }) {
        return Err(Error::invalid("the Lyapunov potential applies to the optimization scheme only"));
    }
    let sol = problem.solution();
    let potential = sol.map(|_| potential);
    let mut rec = Recorder::new(method.name(), TraceParams::Vi(*params), potential, sol, opts);
    let mut state = ViState::new(problem, z0)?;
    loop {
        let (primary, aux, stop_value) = merits(&state);
        let done_tol = stop_value <= opts.stop.residual_tol;
        let done_max = state.k >= opts.stop.max_iter;
        let record = TraceRecord {
            k: state.k,
            merit_primary: primary,
            merit_aux: aux,
            dist_sq: sol.map(|s| state.z_curr.dist_sq(s)),
            potential: potential.zip(sol).map(|(p, s)| vi_potential(p, problem, &state, s)),
            elapsed_ns: 0,
        };
        rec.push(record, &state.z_curr, done_tol || done_max);
        if done_tol {
            return Ok(rec.finish(Termination::Tolerance));
        }
        if done_max {
            return Ok(rec.finish(Termination::MaxIter));
        }
        state = method.step(problem, &state, params)?;
        if !state.z_curr.is_finite() || !state.f_curr.is_finite() {
            return Err(rec.diverged(state.k));
        }
    }
}

/// Runs a VI method from `z0` until the natural residual drops to
/// `residual_tol` or `max_iter` steps are taken.
///
/// Merits are `‖F(z)‖` (or `|zᵀF(z)|` on a constrained set) and the natural residual.
pub fn run(
    problem: &MonotoneProblem,
    method: Method,
    params: &ViParams,
    z0: &RealVector,
    opts: &RunOptions,
) -> Result<IterateTrace> {
    drive_vi(problem, method, params, z0, opts, |s| {
        let (primary, residual) = merit_vi_with(problem, &s.z_curr, &s.f_curr);
        (primary, residual, residual)
    })
}

/// Runs a VI method on `F = ∇f`, recording `‖∇f‖` and `f − f*` (or `f` when f* is unknown).
pub fn run_gradient(
    objective: &SmoothObjective,
    method: Method,
    params: &ViParams,
    x0: &RealVector,
    opts: &RunOptions,
) -> Result<IterateTrace> {
    let problem = objective.as_gradient_problem();
    drive_vi(&problem, method, params, x0, opts, |s| {
        let g = s.f_curr.norm();
        let aux = objective.gap(&s.z_curr).unwrap_or_else(|| objective.value(&s.z_curr));
        (g, aux, g)
    })
}

/// Runs the optimization extra-point scheme from `x0` (with `v⁰ = x⁰`) until
/// `‖∇f(x)‖ ≤ residual_tol` or `max_iter` steps are taken.
pub fn run_opt(
    objective: &SmoothObjective,
    params: &OptParams,
    y_rule: YRule,
    x0: &RealVector,
    opts: &RunOptions,
) -> Result<IterateTrace> {
    opts.validate()?;
    params.check_invariants()?;
    let potential = opts.potential.unwrap_or(Potential::Lyapunov { c: params.c });
    if !matches!(potential, Potential::Lyapunov { .. } | Potential::Distance) {
        return Err(Error::invalid("the optimization scheme records the Lyapunov or distance potential"));
    }
    let sol = objective.minimizer();
    let potential = sol.map(|_| potential);
    let name = match y_rule {
        YRule::YEqualsP => "opt-extra-point",
        YRule::YGradStep => "opt-extra-point-grad",
    };
    let mut rec = Recorder::new(name, TraceParams::Opt(*params), potential, sol, opts);
    let mut state = OptState::new(objective, x0)?;
    loop {
        let g = objective.gradient(&state.x_curr).norm();
        let gap = objective.gap(&state.x_curr);
        let done_tol = g <= opts.stop.residual_tol;
        let done_max = state.k >= opts.stop.max_iter;
        let pot = potential.zip(sol).map(|(p, s)| match p {
            Potential::Lyapunov { c } => gap.unwrap_or(f64::NAN) + c * state.v_curr.dist_sq(s),
            _ => state.x_curr.dist_sq(s),
        });
        let record = TraceRecord {
            k: state.k,
            merit_primary: g,
            merit_aux: gap.unwrap_or_else(|| objective.value(&state.x_curr)),
            dist_sq: sol.map(|s| state.x_curr.dist_sq(s)),
            potential: pot,
            elapsed_ns: 0,
        };
        rec.push(record, &state.x_curr, done_tol || done_max);
        if done_tol {
            return Ok(rec.finish(Termination::Tolerance));
        }
        if done_max {
            return Ok(rec.finish(Termination::MaxIter));
        }
        state = step_opt_extra_point(objective, &state, params, y_rule);
        if !state.x_curr.is_finite() || !state.v_curr.is_finite() {
            return Err(rec.diverged(state.k));
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::problem::FnOperator;
    use crate::sets::FeasibleSet;

    fn shifted(shift: f64) -> MonotoneProblem {
        let op = Arc::new(FnOperator::new(1, move |z: &RealVector| z.map(|x| x - shift)));
        MonotoneProblem::new(op, FeasibleSet::WholeSpace, 1.0, 1.0)
            .unwrap()
            .with_solution(RealVector::new(vec![shift]).unwrap())
            .unwrap()
    }

    fn growing() -> MonotoneProblem {
        let op = Arc::new(FnOperator::new(1, |z: &RealVector| z.map(|x| -x)));
        MonotoneProblem::new(op, FeasibleSet::WholeSpace, 1.0, 1.0).unwrap()
    }

    #[test]
    fn stops_at_tolerance_and_records_every_step() {
        let p = shifted(2.0);
        let opts = RunOptions::new(StopCriteria {
            max_iter: 1000,
            residual_tol: 1e-8,
        });
        let t = run(&p, Method::Vanilla, &ViParams::vanilla(0.5), &RealVector::zeros(1), &opts).unwrap();
        assert_eq!(t.terminated_by, Termination::Tolerance);
        assert_eq!(t.records.len(), t.iterations() + 1);
        assert_eq!(t.iterates.len(), t.records.len());
        assert!(t.last().merit_primary <= 1e-8);
        for (i, r) in t.records.iter().enumerate() {
            assert_eq!(r.k, i);
            assert_eq!(r.potential, r.dist_sq);
        }
    }

    #[test]
    fn zero_iterations_keeps_start() {
        let opts = RunOptions::new(StopCriteria {
            max_iter: 0,
            residual_tol: 0.0,
        });
        let t = run(&shifted(1.0), Method::Ogda, &ViParams::ogda(0.1, 0.1), &RealVector::zeros(1), &opts).unwrap();
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.terminated_by, Termination::MaxIter);
    }

    #[test]
    fn thinning_keeps_endpoints() {
        let opts = RunOptions::new(StopCriteria {
            max_iter: 25,
            residual_tol: 0.0,
        })
        .with_thinning(10);
        let t = run(&shifted(1.0), Method::Vanilla, &ViParams::vanilla(0.1), &RealVector::zeros(1), &opts).unwrap();
        let ks: Vec<_> = t.records.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![0, 10, 20, 25]);
    }

    #[test]
    fn divergence_keeps_partial_trace() {
        let opts = RunOptions::new(StopCriteria {
            max_iter: 100_000,
            residual_tol: 0.0,
        });
        let err = run(&growing(), Method::Vanilla, &ViParams::vanilla(1.0), &RealVector::from_element(1, 1.0), &opts)
            .unwrap_err();
        match err {
            Error::Divergence { iteration, trace } => {
                assert!(iteration > 1000);
                assert_eq!(trace.terminated_by, Termination::Divergence);
                assert_eq!(trace.records.len(), iteration);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::Vanilla,
            Method::ExtraGradient { restricted: false },
            Method::ExtraGradient { restricted: true },
            Method::Ogda,
            Method::HeavyBall,
            Method::Nesterov,
            Method::ExtraPoint { restricted: false },
            Method::ExtraPoint { restricted: true },
        ] {
            assert_eq!(Method::parse(m.name()), Some(m));
        }
    }
}
