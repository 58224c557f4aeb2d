//! Local Nash equilibria of continuous games.
//!
//! The crate evaluates the game form `omega` (each player's gradient of
//! their own cost with respect to their own strategy block) and its
//! derivative `d omega`, classifies points as differential Nash equilibria
//! (degenerate or not, stable under gradient play or not), finds and tracks
//! equilibria, and computes costate-based gradients for open-loop
//! differential games.
//!
//! Modules:
//! - [`game`]: game definitions, costs, builtin games, JSON configuration.
//! - [`calculus`]: `omega`, own-block Hessians, and `d omega`.
//! - [`classify`]: the verdict hierarchy and a brute-force grid oracle.
//! - [`solve`]: Newton, multi-start, gradient-play flows, continuation.
//! - [`olg`]: open-loop differential games in Mayer form.

pub mod autodiff;
pub mod calculus;
pub mod classify;
pub mod error;
pub mod game;
pub mod linalg;
pub mod ode;
pub mod olg;
pub mod solve;

pub use calculus::{game_form, game_jacobian, player_gradient, player_hessian, DerivMethod};
pub use classify::{classify_point, local_nash_oracle, Classification, EquilibriumReport, FlowStability, Tolerances};
pub use error::{Error, Result};
pub use game::{load_game, Builtin, Cost, GameDefinition, JointStrategy};
