//! JSON open-loop game configuration and CSV control profiles.
//!
//! ```json
//! { "players": 2, "dims": [1, 1], "state_dim": 1, "horizon": 1.0, "steps": 50,
//!   "x0": [0.0],
//!   "dynamics": {"linear": {"A": [[-1.0]], "B": [[[1.0]], [[1.0]]]}},
//!   "terminal_costs": [ {"quadratic": {"Q": [[1.0]], "target": [1.0]}},
//!                       {"quadratic": {"Q": [[1.0]], "target": [-1.0]}} ] }
//! ```
//!
//! Polynomial dynamics give one monomial list per state component over
//! `[x; u_1; ...; u_n]`; polynomial terminal costs are over `x`.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::model::{ControlProfile, Dynamics, OpenLoopGame, TerminalCost};
use crate::error::{Error, Result};
use crate::game::{Monomial, Polynomial};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OlgConfig {
    pub players: usize,
    /// Control dimension of each player.
    pub dims: Vec<usize>,
    pub state_dim: usize,
    pub horizon: f64,
    pub steps: usize,
    pub x0: Vec<f64>,
    pub dynamics: DynamicsSpec,
    pub terminal_costs: Vec<TerminalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DynamicsSpec {
    Linear {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "B")]
        b: Vec<Vec<Vec<f64>>>,
    },
    Polynomial(Vec<Vec<Monomial>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TerminalSpec {
    Quadratic {
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
        target: Vec<f64>,
    },
    Polynomial(Vec<Monomial>),
}

fn matrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Config(format!("{name} has ragged rows")));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

impl OlgConfig {
    pub fn build(&self) -> Result<OpenLoopGame> {
        if self.dims.len() != self.players {
            return Err(Error::Config(format!(
                "players = {} but dims has {} entries",
                self.players,
                self.dims.len()
            )));
        }
        if self.x0.len() != self.state_dim {
            return Err(Error::Config(format!(
                "x0 has length {}, state_dim is {}",
                self.x0.len(),
                self.state_dim
            )));
        }
        if self.terminal_costs.len() != self.players {
            return Err(Error::Config(format!(
                "expected {} terminal costs, got {}",
                self.players,
                self.terminal_costs.len()
            )));
        }
        let d = self.state_dim;
        let nz = d + self.dims.iter().sum::<usize>();
        let dynamics = match &self.dynamics {
            DynamicsSpec::Linear { a, b } => Dynamics::Linear {
                a: matrix(a, "A")?,
                b: b
                    .iter()
                    .enumerate()
                    .map(|(i, bi)| matrix(bi, &format!("B[{i}]")))
                    .collect::<Result<_>>()?,
            },
            DynamicsSpec::Polynomial(comps) => Dynamics::Polynomial(
                comps
                    .iter()
                    .map(|m| Polynomial::new(nz, m.clone()))
                    .collect::<Result<_>>()?,
            ),
        };
        let costs = self
            .terminal_costs
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let cost = match spec {
                    TerminalSpec::Quadratic { q, target } => {
                        if target.len() != d {
                            return Err(Error::Config(format!(
                                "terminal_costs[{i}]: target has length {}, expected {d}",
                                target.len()
                            )));
                        }
                        TerminalCost::Quadratic {
                            q: matrix(q, "Q")?,
                            target: DVector::from_column_slice(target),
                        }
                    }
                    TerminalSpec::Polynomial(m) => TerminalCost::Polynomial(Polynomial::new(d, m.clone())?),
                };
                Ok(cost)
            })
            .collect::<Result<Vec<_>>>()?;
        OpenLoopGame::new(self.x0.clone(), self.horizon, self.steps, dynamics, self.dims.clone(), costs)
    }
}

/// Parse and validate an open-loop game from JSON text.
pub fn load_olg(json: &str) -> Result<OpenLoopGame> {
    serde_json::from_str::<OlgConfig>(json)?.build()
}

/// Column names after `t`: `u{i}` for scalar controls, `u{i}_{c}` otherwise.
pub fn profile_header(olg: &OpenLoopGame) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for (i, &k) in olg.control_dims().iter().enumerate() {
        if k == 1 {
            h.push(format!("u{}", i + 1));
        } else {
            h.extend((1..=k).map(|c| format!("u{}_{c}", i + 1)));
        }
    }
    h
}

/// One row per interval: its start time, then every player's entries.
pub fn write_profile<W: Write>(olg: &OpenLoopGame, profile: &ControlProfile, out: W) -> Result<()> {
    olg.check_profile(profile)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(profile_header(olg))?;
    for k in 0..olg.steps() {
        let mut rec = vec![format!("{:?}", olg.time(k))];
        for u in profile.interval(k) {
            rec.extend(u.iter().map(|v| format!("{v:?}")));
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_profile`]; the time column is checked against the grid.
pub fn read_profile<R: Read>(olg: &OpenLoopGame, input: R) -> Result<ControlProfile> {
    let mut r = csv::Reader::from_reader(input);
    let width = 1 + olg.control_dims().iter().sum::<usize>();
    let mut data: Vec<Vec<f64>> = olg.control_dims().iter().map(|_| Vec::new()).collect();
    let mut rows = 0;
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != width {
            return Err(Error::Config(format!(
                "profile row {k} has {} columns, expected {width}",
                rec.len()
            )));
        }
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Config(format!("profile row {k}: {e}")))?;
        if k < olg.steps() && (vals[0] - olg.time(k)).abs() > 1e-9 * olg.horizon() {
            return Err(Error::Config(format!(
                "profile row {k} has t = {}, expected {}",
                vals[0],
                olg.time(k)
            )));
        }
        let mut col = 1;
        for (i, &ki) in olg.control_dims().iter().enumerate() {
            data[i].extend_from_slice(&vals[col..col + ki]);
            col += ki;
        }
        rows += 1;
    }
    if rows != olg.steps() {
        return Err(Error::Config(format!(
            "profile has {rows} rows, game has {} intervals",
            olg.steps()
        )));
    }
    let profile = ControlProfile::new(olg.steps(), olg.control_dims().to_vec(), data)?;
    olg.check_profile(&profile)?;
    Ok(profile)
}
