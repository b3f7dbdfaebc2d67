//! First-order methods for strongly monotone variational inequalities and
//! strongly convex minimization.
//!
//! The central object is the five-parameter extra-point update, which contains
//! projection, extra-gradient, optimistic, heavy-ball and Nesterov steps as
//! special cases. [`certify`] decides whether a parameter choice carries a
//! linear-rate guarantee, and [`harness`] checks those guarantees against
//! actual runs.
//!
//! ```
//! use vi_accel::{certify, problems, solvers, RealVector};
//!
//! let (problem, _) = problems::gen_linear_vi(10, 1, 1e-1, false)?;
//! let params = certify::default_vi_params(certify::Regime::ViUnrestricted, problem.mu(), problem.lip())?;
//! let cert = certify::certify_vi_unrestricted(problem.mu(), problem.lip(), &params)?;
//! assert!(cert.feasible);
//!
//! let stop = solvers::StopCriteria { max_iter: 20_000, residual_tol: 1e-8 };
//! let trace = solvers::run(
//!     &problem,
//!     solvers::Method::ExtraPoint { restricted: false },
//!     &params,
//!     &RealVector::zeros(10),
//!     &solvers::RunOptions::new(stop),
//! )?;
//! assert_eq!(trace.terminated_by, vi_accel::harness::Termination::Tolerance);
//! # Ok::<(), vi_accel::Error>(())
//! ```

pub mod certify;
mod error;
pub mod harness;
pub mod presets;
mod problem;
pub mod problems;
mod sets;
pub mod solvers;
mod vector;

pub use error::{Error, Result};
pub use problem::{
    natural_residual, AffineOperator, FnOperator, MonotoneProblem, Objective, Operator,
    SmoothObjective, SOLUTION_TOL,
};
pub use sets::{project, FeasibleSet};
pub use vector::RealVector;

pub use certify::RateCertificate;
pub use harness::{IterateTrace, TraceRecord};
pub use solvers::{OptParams, OptState, ViParams, ViState};
