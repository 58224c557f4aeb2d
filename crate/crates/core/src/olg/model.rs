use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::calculus::fd_step;
use crate::error::{Error, Result};
use crate::game::Polynomial;

type DynamicsFn = dyn Fn(&[f64], &[&[f64]]) -> Vec<f64> + Send + Sync;

/// Right-hand side `h(x, u_1, ..., u_n)` of the state equation.
#[derive(Clone)]
pub enum Dynamics {
    /// `x' = A x + sum_i B_i u_i`.
    Linear { a: DMatrix<f64>, b: Vec<DMatrix<f64>> },
    /// One polynomial per state component over `z = [x; u_1; ...; u_n]`.
    Polynomial(Vec<Polynomial>),
    /// Arbitrary closure; Jacobians by central differences.
    Custom(Arc<DynamicsFn>),
}

impl fmt::Debug for Dynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dynamics::Linear { a, b } => f.debug_struct("Linear").field("a", a).field("b", b).finish(),
            Dynamics::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            Dynamics::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn stack(x: &[f64], u: &[&[f64]]) -> Vec<f64> {
    let mut z = x.to_vec();
    for ui in u {
        z.extend_from_slice(ui);
    }
    z
}

impl Dynamics {
    pub fn custom(h: impl Fn(&[f64], &[&[f64]]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Dynamics::Custom(Arc::new(h))
    }

    pub fn eval(&self, x: &[f64], u: &[&[f64]]) -> Vec<f64> {
        match self {
            Dynamics::Linear { a, b } => {
                let mut out = a * DVector::from_column_slice(x);
                for (bi, ui) in b.iter().zip(u) {
                    out += bi * DVector::from_column_slice(ui);
                }
                out.as_slice().to_vec()
            }
            Dynamics::Polynomial(comps) => {
                let z = stack(x, u);
                comps.iter().map(|p| p.value(&z)).collect()
            }
            Dynamics::Custom(h) => h(x, u),
        }
    }

    /// `dh/dx`, a `d x d` matrix.
    pub fn jac_x(&self, x: &[f64], u: &[&[f64]]) -> DMatrix<f64> {
        let d = x.len();
        match self {
            Dynamics::Linear { a, .. } => a.clone(),
            Dynamics::Polynomial(comps) => {
                let z = stack(x, u);
                DMatrix::from_fn(d, d, |r, c| comps[r].partial(&z, c))
            }
            Dynamics::Custom(_) => {
                let mut m = DMatrix::zeros(d, d);
                for c in 0..d {
                    let h = fd_step(x[c]);
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[c] += h;
                    xm[c] -= h;
                    let (fp, fm) = (self.eval(&xp, u), self.eval(&xm, u));
                    for r in 0..d {
                        m[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
                    }
                }
                m
            }
        }
    }

    /// `dh/du_i`, a `d x k_i` matrix.
    pub fn jac_u(&self, i: usize, x: &[f64], u: &[&[f64]]) -> DMatrix<f64> {
        let d = x.len();
        let k = u[i].len();
        match self {
            Dynamics::Linear { b, .. } => b[i].clone(),
            Dynamics::Polynomial(comps) => {
                let z = stack(x, u);
                let offset = d + u[..i].iter().map(|v| v.len()).sum::<usize>();
                DMatrix::from_fn(d, k, |r, c| comps[r].partial(&z, offset + c))
            }
            Dynamics::Custom(_) => {
                let mut m = DMatrix::zeros(d, k);
                for c in 0..k {
                    let h = fd_step(u[i][c]);
                    let mut up = u[i].to_vec();
                    let mut um = u[i].to_vec();
                    up[c] += h;
                    um[c] -= h;
                    let mut args: Vec<&[f64]> = u.to_vec();
                    args[i] = &up;
                    let fp = self.eval(x, &args);
                    args[i] = &um;
                    let fm = self.eval(x, &args);
                    for r in 0..d {
                        m[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
                    }
                }
                m
            }
        }
    }

    fn check(&self, d: usize, control_dims: &[usize]) -> Result<()> {
        match self {
            Dynamics::Linear { a, b } => {
                if a.shape() != (d, d) {
                    return Err(Error::InvalidGame(format!("A must be {d}x{d}, got {:?}", a.shape())));
                }
                if b.len() != control_dims.len() {
                    return Err(Error::InvalidGame(format!(
                        "expected {} input matrices, got {}",
                        control_dims.len(),
                        b.len()
                    )));
                }
                for (i, (bi, &k)) in b.iter().zip(control_dims).enumerate() {
                    if bi.shape() != (d, k) {
                        return Err(Error::InvalidGame(format!(
                            "B[{i}] must be {d}x{k}, got {:?}",
                            bi.shape()
                        )));
                    }
                }
                if a.iter().chain(b.iter().flat_map(|m| m.iter())).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidGame("dynamics matrices must be finite".into()));
                }
            }
            Dynamics::Polynomial(comps) => {
                if comps.len() != d {
                    return Err(Error::InvalidGame(format!(
                        "expected {d} dynamics components, got {}",
                        comps.len()
                    )));
                }
                let nz = d + control_dims.iter().sum::<usize>();
                if let Some(p) = comps.iter().find(|p| p.nvars() != nz) {
                    return Err(Error::InvalidGame(format!(
                        "dynamics polynomials must have {nz} variables, got {}",
                        p.nvars()
                    )));
                }
            }
            Dynamics::Custom(_) => {}
        }
        Ok(())
    }
}

/// Terminal cost `f_i(x(T))` of one player.
#[derive(Debug, Clone, PartialEq)]
pub enum TerminalCost {
    /// `(x - target)' Q (x - target) / 2` with `Q` symmetric.
    Quadratic { q: DMatrix<f64>, target: DVector<f64> },
    Polynomial(Polynomial),
}

impl TerminalCost {
    /// `|x - target|^2 / 2`.
    pub fn squared_distance(target: &[f64]) -> Self {
        let d = target.len();
        TerminalCost::Quadratic {
            q: DMatrix::identity(d, d),
            target: DVector::from_column_slice(target),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            TerminalCost::Quadratic { q, target } => {
                let e = DVector::from_column_slice(x) - target;
                0.5 * e.dot(&(q * &e))
            }
            TerminalCost::Polynomial(p) => p.value(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            TerminalCost::Quadratic { q, target } => {
                let e = DVector::from_column_slice(x) - target;
                (q * e).as_slice().to_vec()
            }
            TerminalCost::Polynomial(p) => p.gradient(x),
        }
    }

    fn check(&self, d: usize) -> Result<()> {
        match self {
            TerminalCost::Quadratic { q, target } => {
                if q.shape() != (d, d) || target.len() != d {
                    return Err(Error::InvalidGame(format!(
                        "quadratic terminal cost must be {d}-dimensional"
                    )));
                }
                for r in 0..d {
                    for c in r + 1..d {
                        if q[(r, c)] != q[(c, r)] {
                            return Err(Error::NonSymmetric {
                                name: "Q".into(),
                                row: r,
                                col: c,
                                upper: q[(r, c)],
                                lower: q[(c, r)],
                            });
                        }
                    }
                }
                Ok(())
            }
            TerminalCost::Polynomial(p) if p.nvars() != d => Err(Error::InvalidGame(format!(
                "terminal polynomial must have {d} variables, got {}",
                p.nvars()
            ))),
            TerminalCost::Polynomial(_) => Ok(()),
        }
    }
}

/// A differential game in Mayer form with open-loop controls.
#[derive(Debug, Clone)]
pub struct OpenLoopGame {
    state_dim: usize,
    horizon: f64,
    steps: usize,
    x0: Vec<f64>,
    dynamics: Dynamics,
    control_dims: Vec<usize>,
    terminal_costs: Vec<TerminalCost>,
}

impl OpenLoopGame {
    pub fn new(
        x0: Vec<f64>,
        horizon: f64,
        steps: usize,
        dynamics: Dynamics,
        control_dims: Vec<usize>,
        terminal_costs: Vec<TerminalCost>,
    ) -> Result<Self> {
        let d = x0.len();
        if d == 0 {
            return Err(Error::InvalidGame("state dimension must be positive".into()));
        }
        if let Some(k) = x0.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePoint(k));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidGame("horizon must be positive".into()));
        }
        if steps == 0 {
            return Err(Error::InvalidGame("steps must be at least 1".into()));
        }
        if control_dims.is_empty() || control_dims.contains(&0) {
            return Err(Error::InvalidGame("control dimensions must be positive".into()));
        }
        if terminal_costs.len() != control_dims.len() {
            return Err(Error::InvalidGame(format!(
                "{} players but {} terminal costs",
                control_dims.len(),
                terminal_costs.len()
            )));
        }
        dynamics.check(d, &control_dims)?;
        for c in &terminal_costs {
            c.check(d)?;
        }
        Ok(Self {
            state_dim: d,
            horizon,
            steps,
            x0,
            dynamics,
            control_dims,
            terminal_costs,
        })
    }

    /// Same game on a grid with `steps` intervals.
    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidGame("steps must be at least 1".into()));
        }
        Ok(Self { steps, ..self.clone() })
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Grid node `t_k = k T / N`.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.horizon / self.steps as f64
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn n_players(&self) -> usize {
        self.control_dims.len()
    }

    pub fn control_dims(&self) -> &[usize] {
        &self.control_dims
    }

    pub fn terminal_cost(&self, i: usize) -> &TerminalCost {
        &self.terminal_costs[i]
    }

    /// Number of scalar control unknowns, `N * sum_i k_i`.
    pub fn unknowns(&self) -> usize {
        self.steps * self.control_dims.iter().sum::<usize>()
    }

    pub fn check_player(&self, i: usize) -> Result<()> {
        if i >= self.n_players() {
            return Err(Error::PlayerOutOfRange {
                index: i,
                players: self.n_players(),
            });
        }
        Ok(())
    }

    pub fn check_profile(&self, u: &ControlProfile) -> Result<()> {
        if u.steps != self.steps || u.dims != self.control_dims {
            return Err(Error::InvalidGame(format!(
                "profile has {} steps and dims {:?}, game expects {} and {:?}",
                u.steps, u.dims, self.steps, self.control_dims
            )));
        }
        if let Some(k) = u.flatten().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePoint(k));
        }
        Ok(())
    }
}

/// Piecewise-constant controls: for each player, `N` vectors of length `k_i`
/// stored interval-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlProfile {
    steps: usize,
    dims: Vec<usize>,
    data: Vec<Vec<f64>>,
}

impl ControlProfile {
    pub fn new(steps: usize, dims: Vec<usize>, data: Vec<Vec<f64>>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::InvalidGame(format!(
                "{} players but {} control blocks",
                dims.len(),
                data.len()
            )));
        }
        for (i, (block, k)) in data.iter().zip(&dims).enumerate() {
            if block.len() != steps * k {
                return Err(Error::InvalidGame(format!(
                    "player {i} controls have {} entries, expected {}",
                    block.len(),
                    steps * k
                )));
            }
        }
        Ok(Self { steps, dims, data })
    }

    pub fn zeros(olg: &OpenLoopGame) -> Self {
        Self::constant(olg, &vec![0.0; olg.n_players()])
    }

    /// Every entry of player `i` set to `values[i]`.
    pub fn constant(olg: &OpenLoopGame, values: &[f64]) -> Self {
        let data = olg
            .control_dims()
            .iter()
            .zip(values)
            .map(|(k, &v)| vec![v; olg.steps() * k])
            .collect();
        Self {
            steps: olg.steps(),
            dims: olg.control_dims().to_vec(),
            data,
        }
    }

    /// Rebuild from the concatenation of all player blocks.
    pub fn from_flat(olg: &OpenLoopGame, flat: &[f64]) -> Result<Self> {
        if flat.len() != olg.unknowns() {
            return Err(Error::DimensionMismatch {
                expected: olg.unknowns(),
                got: flat.len(),
            });
        }
        let mut data = Vec::with_capacity(olg.n_players());
        let mut offset = 0;
        for k in olg.control_dims() {
            let len = olg.steps() * k;
            data.push(flat[offset..offset + len].to_vec());
            offset += len;
        }
        Ok(Self {
            steps: olg.steps(),
            dims: olg.control_dims().to_vec(),
            data,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// All entries of player `i`, interval-major.
    pub fn player(&self, i: usize) -> &[f64] {
        &self.data[i]
    }

    pub fn player_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i]
    }

    /// Control of player `i` on interval `k`.
    pub fn at(&self, i: usize, k: usize) -> &[f64] {
        let ki = self.dims[i];
        &self.data[i][k * ki..(k + 1) * ki]
    }

    /// Controls of all players on interval `k`.
    pub fn interval(&self, k: usize) -> Vec<&[f64]> {
        (0..self.dims.len()).map(|i| self.at(i, k)).collect()
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.data.concat()
    }
}

/// State at the `N + 1` grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl StateTrajectory {
    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("trajectory has N + 1 nodes")
    }

    /// Linear interpolation between nodes `k` and `k + 1`, `theta` in `[0, 1]`.
    pub fn interpolate(&self, k: usize, theta: f64) -> Vec<f64> {
        lerp(&self.states[k], &self.states[k + 1], theta)
    }
}

/// Costate (as a row vector) of one player at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CostateTrajectory {
    pub player: usize,
    pub times: Vec<f64>,
    pub costates: Vec<Vec<f64>>,
}

impl CostateTrajectory {
    pub fn interpolate(&self, k: usize, theta: f64) -> Vec<f64> {
        lerp(&self.costates[k], &self.costates[k + 1], theta)
    }
}

pub(crate) fn lerp(a: &[f64], b: &[f64], theta: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + theta * (y - x)).collect()
}
