//! Ready-made two-player open-loop games on `[0, 1]` with `x(0) = 0`.

use nalgebra::dmatrix;

use super::model::{Dynamics, OpenLoopGame, TerminalCost};
use crate::game::Polynomial;

pub const NAMES: [&str; 3] = ["linear_decay", "shared_target", "regularized_shared_target"];

/// `x' = -x + u_1 + u_2`, each player pulling `x(1)` toward their own target.
pub fn linear_decay(targets: [f64; 2], steps: usize) -> OpenLoopGame {
    OpenLoopGame::new(
        vec![0.0],
        1.0,
        steps,
        Dynamics::Linear {
            a: dmatrix![-1.0],
            b: vec![dmatrix![1.0], dmatrix![1.0]],
        },
        vec![1, 1],
        targets.iter().map(|t| TerminalCost::squared_distance(&[*t])).collect(),
    )
    .expect("well-formed builtin")
}

/// `x' = u_1 + u_2` with both players wanting `x(1) = theta`.
///
/// Every profile with `sum_k (u_1 + u_2) dt = theta` is critical.
pub fn shared_target(theta: f64, steps: usize) -> OpenLoopGame {
    OpenLoopGame::new(
        vec![0.0],
        1.0,
        steps,
        Dynamics::Linear {
            a: dmatrix![0.0],
            b: vec![dmatrix![1.0], dmatrix![1.0]],
        },
        vec![1, 1],
        vec![TerminalCost::squared_distance(&[theta]); 2],
    )
    .expect("well-formed builtin")
}

/// [`shared_target`] plus a control penalty `rho/2 int u_i^2`, carried by
/// extra states `y_i' = u_i^2 / 2` so the cost stays terminal:
/// `f_i = (x - theta)^2 / 2 + rho y_i`.
pub fn regularized_shared_target(theta: f64, rho: f64, steps: usize) -> OpenLoopGame {
    // z = [x, y1, y2, u1, u2]
    let comps = vec![
        Polynomial::from_terms(5, [(1.0, vec![0, 0, 0, 1, 0]), (1.0, vec![0, 0, 0, 0, 1])]),
        Polynomial::from_terms(5, [(0.5, vec![0, 0, 0, 2, 0])]),
        Polynomial::from_terms(5, [(0.5, vec![0, 0, 0, 0, 2])]),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .expect("well-formed builtin");
    let cost = |own: usize| {
        let mut y = vec![0, 0, 0];
        y[own] = 1;
        TerminalCost::Polynomial(
            Polynomial::from_terms(
                3,
                [
                    (0.5, vec![2, 0, 0]),
                    (-theta, vec![1, 0, 0]),
                    (0.5 * theta * theta, vec![0, 0, 0]),
                    (rho, y),
                ],
            )
            .expect("well-formed builtin"),
        )
    };
    OpenLoopGame::new(
        vec![0.0; 3],
        1.0,
        steps,
        Dynamics::Polynomial(comps),
        vec![1, 1],
        vec![cost(1), cost(2)],
    )
    .expect("well-formed builtin")
}
