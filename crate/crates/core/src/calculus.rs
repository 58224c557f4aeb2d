//! First and second derivatives of player costs.
//!
//! The game form `omega(u)` stacks each player's gradient with respect to
//! their own block. Its derivative `d omega(u)` has block `(i, j)` equal to
//! `D_j (D_i f_i)(u)`; it is generally not symmetric.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Dual, HyperDual};
use crate::error::{Error, Result};
use crate::game::{Cost, GameDefinition, JointStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivMethod {
    /// Closed-form derivatives of polynomial/quadratic costs or a registered provider.
    Analytic,
    /// Forward-mode dual / hyper-dual numbers.
    Dual,
    /// Second-order central differences.
    #[serde(rename = "fd")]
    CentralFd,
}

impl DerivMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DerivMethod::Analytic => "analytic",
            DerivMethod::Dual => "dual",
            DerivMethod::CentralFd => "fd",
        }
    }
}

impl fmt::Display for DerivMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DerivMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(DerivMethod::Analytic),
            "dual" => Ok(DerivMethod::Dual),
            "fd" | "central_fd" => Ok(DerivMethod::CentralFd),
            other => Err(Error::InvalidOption(format!(
                "unknown derivative method `{other}` (expected analytic, dual or fd)"
            ))),
        }
    }
}

/// Central-difference step for first derivatives.
pub fn fd_step(x: f64) -> f64 {
    1e-6_f64.max(1e-6 * x.abs())
}

/// Step for second differences of cost values; balances truncation against
/// the `eps / h^2` roundoff of the second-difference stencil.
pub fn fd_step_second(x: f64) -> f64 {
    1e-4_f64.max(1e-4 * x.abs())
}

/// `omega(u)`: per-player own-block gradients, stacked in player order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFormValue {
    stacked: Vec<f64>,
    dims: Vec<usize>,
    at_point: JointStrategy,
}

impl GameFormValue {
    pub fn stacked(&self) -> &[f64] {
        &self.stacked
    }

    pub fn into_stacked(self) -> Vec<f64> {
        self.stacked
    }

    pub fn at_point(&self) -> &JointStrategy {
        &self.at_point
    }

    pub fn block(&self, i: usize) -> &[f64] {
        let start: usize = self.dims[..i].iter().sum();
        &self.stacked[start..start + self.dims[i]]
    }

    pub fn blocks(&self) -> Vec<&[f64]> {
        (0..self.dims.len()).map(|i| self.block(i)).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.stacked)
    }
}

/// Largest absolute entry.
pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Symmetrized `D^2_ii f_i(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerHessian {
    pub player: usize,
    pub matrix: DMatrix<f64>,
}

/// `d omega(u)`; never symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct GameJacobian {
    pub matrix: DMatrix<f64>,
    pub at_point: JointStrategy,
}

fn unavailable(method: DerivMethod, player: usize) -> Error {
    Error::MethodUnavailable {
        method: method.as_str(),
        player,
    }
}

fn check_finite(values: &[f64], player: usize, u: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteDerivative {
            player,
            point: u.to_vec(),
        })
    }
}

fn central_difference(f: impl Fn(&[f64]) -> f64, u: &[f64], k: usize) -> f64 {
    let h = fd_step(u[k]);
    let mut x = u.to_vec();
    x[k] = u[k] + h;
    let xp = x[k];
    let fp = f(&x);
    x[k] = u[k] - h;
    let xm = x[k];
    let fm = f(&x);
    (fp - fm) / (xp - xm)
}

/// Gradient of `cost` over the joint coordinates in `coords`.
fn partials(cost: &Cost, player: usize, u: &[f64], coords: Range<usize>, method: DerivMethod) -> Result<Vec<f64>> {
    match method {
        DerivMethod::Analytic => {
            let g = cost
                .analytic_gradient(u)
                .ok_or_else(|| unavailable(method, player))?;
            Ok(g[coords].to_vec())
        }
        DerivMethod::Dual => coords
            .map(|k| {
                let x: Vec<Dual> = u
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| Dual::new(v, if j == k { 1.0 } else { 0.0 }))
                    .collect();
                cost.value_dual(&x)
                    .map(|d| d.dot)
                    .ok_or_else(|| unavailable(method, player))
            })
            .collect(),
        DerivMethod::CentralFd => Ok(coords.map(|k| central_difference(|x| cost.value(x), u, k)).collect()),
    }
}

/// Block of second partials of `cost`: rows over `rows`, columns over `cols`.
fn second_partials(
    cost: &Cost,
    player: usize,
    u: &[f64],
    rows: Range<usize>,
    cols: Range<usize>,
    method: DerivMethod,
) -> Result<DMatrix<f64>> {
    let (nr, nc) = (rows.len(), cols.len());
    match method {
        DerivMethod::Analytic => {
            let h = cost
                .analytic_hessian(u)
                .ok_or_else(|| unavailable(method, player))?;
            Ok(h.view((rows.start, cols.start), (nr, nc)).into_owned())
        }
        DerivMethod::Dual => {
            let mut out = DMatrix::zeros(nr, nc);
            for (r, a) in rows.clone().enumerate() {
                for (c, b) in cols.clone().enumerate() {
                    let x: Vec<HyperDual> = u
                        .iter()
                        .enumerate()
                        .map(|(j, &v)| HyperDual::seeded(v, j == a, j == b))
                        .collect();
                    out[(r, c)] = cost
                        .value_hyper(&x)
                        .ok_or_else(|| unavailable(method, player))?
                        .e12;
                }
            }
            Ok(out)
        }
        DerivMethod::CentralFd => {
            let mut out = DMatrix::zeros(nr, nc);
            if cost.analytic_gradient(u).is_some() {
                // columns by central differences of the analytic gradient
                let mut x = u.to_vec();
                for (c, b) in cols.clone().enumerate() {
                    let h = fd_step(u[b]);
                    x[b] = u[b] + h;
                    let xp = x[b];
                    let gp = cost.analytic_gradient(&x).expect("checked above");
                    x[b] = u[b] - h;
                    let xm = x[b];
                    let gm = cost.analytic_gradient(&x).expect("checked above");
                    x[b] = u[b];
                    for (r, a) in rows.clone().enumerate() {
                        out[(r, c)] = (gp[a] - gm[a]) / (xp - xm);
                    }
                }
            } else {
                for (r, a) in rows.clone().enumerate() {
                    for (c, b) in cols.clone().enumerate() {
                        out[(r, c)] = second_difference(cost, u, a, b);
                    }
                }
            }
            Ok(out)
        }
    }
}

fn second_difference(cost: &Cost, u: &[f64], a: usize, b: usize) -> f64 {
    let mut x = u.to_vec();
    let ha = fd_step_second(u[a]);
    if a == b {
        let f0 = cost.value(u);
        x[a] = u[a] + ha;
        let fp = cost.value(&x);
        x[a] = u[a] - ha;
        let fm = cost.value(&x);
        return (fp - 2.0 * f0 + fm) / (ha * ha);
    }
    let hb = fd_step_second(u[b]);
    let mut eval = |sa: f64, sb: f64| {
        x[a] = u[a] + sa * ha;
        x[b] = u[b] + sb * hb;
        cost.value(&x)
    };
    (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * ha * hb)
}

/// `D_i f_i(u)`: gradient of player `i`'s cost over their own block.
pub fn player_gradient(game: &GameDefinition, i: usize, u: &[f64], method: DerivMethod) -> Result<Vec<f64>> {
    game.check_player(i)?;
    game.check_point(u)?;
    let g = partials(game.cost(i), i, u, game.block(i), method)?;
    check_finite(&g, i, u)?;
    Ok(g)
}

/// `omega(u)`.
pub fn game_form(game: &GameDefinition, u: &[f64], method: DerivMethod) -> Result<GameFormValue> {
    game.check_point(u)?;
    let mut stacked = Vec::with_capacity(game.dim());
    for i in 0..game.n_players() {
        stacked.extend(player_gradient(game, i, u, method)?);
    }
    Ok(GameFormValue {
        stacked,
        dims: game.dims().to_vec(),
        at_point: JointStrategy::new(u.to_vec())?,
    })
}

/// `D^2_ii f_i(u)`, symmetrized as `(H + H') / 2`.
pub fn player_hessian(game: &GameDefinition, i: usize, u: &[f64], method: DerivMethod) -> Result<PlayerHessian> {
    game.check_player(i)?;
    game.check_point(u)?;
    let block = game.block(i);
    let h = second_partials(game.cost(i), i, u, block.clone(), block, method)?;
    check_finite(h.as_slice(), i, u)?;
    let matrix = (&h + h.transpose()) * 0.5;
    Ok(PlayerHessian { player: i, matrix })
}

/// `d omega(u)`.
pub fn game_jacobian(game: &GameDefinition, u: &[f64], method: DerivMethod) -> Result<GameJacobian> {
    game.check_point(u)?;
    let m = game.dim();
    let mut matrix = DMatrix::zeros(m, m);
    for i in 0..game.n_players() {
        let rows = game.block(i);
        let block = second_partials(game.cost(i), i, u, rows.clone(), 0..m, method)?;
        check_finite(block.as_slice(), i, u)?;
        matrix.rows_mut(rows.start, rows.len()).copy_from(&block);
    }
    Ok(GameJacobian {
        matrix,
        at_point: JointStrategy::new(u.to_vec())?,
    })
}
