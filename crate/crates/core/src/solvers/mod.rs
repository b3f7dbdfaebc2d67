//! Step rules and the shared iteration loop.
//!
//! Every VI method here is a special case of [`step_extra_point`]:
//!
//! | method         | α | β | γ | η | τ |
//! |----------------|---|---|---|---|---|
//! | projection     | + | 0 | 0 | 0 | 0 |
//! | heavy-ball     | + | 0 | + | 0 | 0 |
//! | extra-gradient | + | 0 | 0 | + | 0 |
//! | Nesterov       | + | β | β | 0 | 0 |
//! | optimistic     | + | 0 | 0 | 0 | + |
//!
//! The dedicated steppers are implemented independently so the table can be
//! checked rather than assumed.

mod opt;
mod run;
mod vi;

pub use opt::{step_opt_extra_point, step_opt_extra_point_simplified, OptParams, OptState, YRule};
pub use crate::harness::Potential;
pub use run::{run, run_gradient, run_opt, Method, RunOptions, StopCriteria};
pub use vi::{
    step_extra_point, step_extra_point_with_half, step_extragradient, step_heavy_ball,
    step_nesterov, step_ogda, step_vanilla, ExtraPointStep, ViParams, ViState,
};
