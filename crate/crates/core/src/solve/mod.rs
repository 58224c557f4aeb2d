//! Finding and tracking equilibria.

mod continuation;
mod flow;
mod multistart;
mod newton;
mod sampling;

pub use continuation::{continue_path, ContinuationOptions, ContinuationPath, PathStatus};
pub use flow::{gradient_play, FlowOptions, FlowOutcome, FlowTrajectory, StepControl};
pub use multistart::{multi_start, FailureTally, MultiStartOptions, MultiStartResult, Root};
pub use newton::{newton_solve, NewtonOptions, NewtonSolution};
pub use sampling::halton_box;
