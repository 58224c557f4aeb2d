//! Open-loop differential games in Mayer form.
//!
//! Each player picks a control signal `u_i(t)` on `[0, T]`; the shared state
//! follows `x' = h(x, u_1, ..., u_n)` from `x(0)`, and player `i` pays
//! `f_i(x(T))`. Controls are piecewise constant on a uniform grid of `N`
//! intervals, so the strategy space is `R^{N k_i}` and the static tools
//! (classification, gradient play) apply to the discretized game.
//!
//! Running costs can be folded in by adding integrator states; see
//! [`builtin::regularized_shared_target`].

mod adjoint;
pub mod builtin;
mod config;
mod model;
mod play;

pub use adjoint::{control_gradient, ol_game_form, rollout_cost, simulate_costate, simulate_state};
pub use config::{load_olg, profile_header, read_profile, write_profile, DynamicsSpec, OlgConfig, TerminalSpec};
pub use model::{ControlProfile, CostateTrajectory, Dynamics, OpenLoopGame, StateTrajectory, TerminalCost};
pub use play::{
    ol_classify, ol_game_jacobian, ol_gradient_play, OlClassifyOptions, OlPlayOptions, OlPlayResult, OlPlayStatus,
};
