//! Classification of joint strategies.
//!
//! Decision table, applied in order:
//!
//! | condition                                             | verdict                |
//! |-------------------------------------------------------|------------------------|
//! | `|omega|_inf > tol.crit`                              | `NotCritical`          |
//! | some own-Hessian eigenvalue `< -tol.eig`              | `SecondOrderViolated`  |
//! | some own-Hessian eigenvalue in `[-tol.eig, tol.eig]`  | `NecessaryOnly`        |
//! | otherwise                                             | `DifferentialNash`     |
//!
//! A differential Nash point is `degenerate` iff
//! `sigma_min(d omega) <= tol.sing * sigma_max(d omega)`. Its gradient-play
//! stability is `stable` iff every eigenvalue of `d omega` has real part
//! `> tol.eig`, `unstable` iff some real part is `< -tol.eig`, else `marginal`.

use std::fmt;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::calculus::{game_form, game_jacobian, player_hessian, sup_norm, DerivMethod};
use crate::error::{Error, Result};
use crate::game::{GameDefinition, JointStrategy};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Criticality threshold on `|omega|_inf`.
    pub crit: f64,
    /// Half-width of the eigenvalue sign band.
    pub eig: f64,
    /// Relative singular-value cutoff for degeneracy.
    pub sing: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            crit: 1e-8,
            eig: 1e-8,
            sing: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("crit", self.crit), ("eig", self.eig), ("sing", self.sing)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidOption(format!("tolerance `{name}` must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStability {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    NotCritical,
    /// Critical, but some own Hessian has a clearly negative eigenvalue: not a local Nash equilibrium.
    SecondOrderViolated,
    /// Critical with semidefinite own Hessians touching zero; second-order test inconclusive.
    NecessaryOnly,
    DifferentialNash {
        degenerate: bool,
        flow_stable: FlowStability,
    },
}

impl Classification {
    /// Short machine-readable verdict code.
    pub fn code(&self) -> &'static str {
        match self {
            Classification::NotCritical => "not_critical",
            Classification::SecondOrderViolated => "second_order_violated",
            Classification::NecessaryOnly => "necessary_only",
            Classification::DifferentialNash { degenerate: true, .. } => "dne_degenerate",
            Classification::DifferentialNash {
                flow_stable: FlowStability::Stable,
                ..
            } => "dne_stable",
            Classification::DifferentialNash {
                flow_stable: FlowStability::Unstable,
                ..
            } => "dne_unstable",
            Classification::DifferentialNash {
                flow_stable: FlowStability::Marginal,
                ..
            } => "dne_marginal",
        }
    }

    pub fn is_differential_nash(&self) -> bool {
        matches!(self, Classification::DifferentialNash { .. })
    }

    pub fn is_non_degenerate_nash(&self) -> bool {
        matches!(self, Classification::DifferentialNash { degenerate: false, .. })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::NotCritical => f.write_str("not critical"),
            Classification::SecondOrderViolated => f.write_str("critical, second-order condition violated"),
            Classification::NecessaryOnly => f.write_str("critical, necessary conditions only"),
            Classification::DifferentialNash { degenerate: true, .. } => {
                f.write_str("differential Nash (degenerate)")
            }
            Classification::DifferentialNash { flow_stable, .. } => {
                let s = match flow_stable {
                    FlowStability::Stable => "stable",
                    FlowStability::Unstable => "unstable",
                    FlowStability::Marginal => "marginal",
                };
                write!(f, "differential Nash (non-degenerate, {s})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub point: JointStrategy,
    pub omega: Vec<f64>,
    pub omega_norm: f64,
    /// Ascending eigenvalues of each player's own Hessian.
    pub hessian_spectra: Vec<Vec<f64>>,
    /// Non-increasing singular values of `d omega`.
    pub jacobian_singular_values: Vec<f64>,
    /// `(re, im)` pairs, sorted by real then imaginary part.
    pub jacobian_eigenvalues: Vec<(f64, f64)>,
    pub verdict: Classification,
    pub tolerances_used: Tolerances,
    pub method: DerivMethod,
}

impl EquilibriumReport {
    pub fn sigma_min(&self) -> f64 {
        self.jacobian_singular_values.last().copied().unwrap_or(0.0)
    }

    pub fn sigma_max(&self) -> f64 {
        self.jacobian_singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_ratio(&self) -> f64 {
        linalg::singular_ratio(&self.jacobian_singular_values)
    }

    /// Whether `d omega` is numerically singular, whatever the verdict tier.
    pub fn jacobian_degenerate(&self) -> bool {
        self.sigma_min() <= self.tolerances_used.sing * self.sigma_max()
    }

    pub fn min_hessian_eigenvalues(&self) -> Vec<f64> {
        self.hessian_spectra
            .iter()
            .map(|s| s.first().copied().unwrap_or(f64::NAN))
            .collect()
    }

    /// CSV header matching [`csv_record`](Self::csv_record).
    pub fn csv_header(m: usize, n_players: usize) -> Vec<String> {
        let mut h: Vec<String> = (1..=m).map(|k| format!("u{k}")).collect();
        h.push("omega_norm".into());
        h.extend((1..=n_players).map(|i| format!("min_hess_eig_{i}")));
        h.push("sigma_min".into());
        h.push("verdict".into());
        h
    }

    pub fn csv_record(&self) -> Vec<String> {
        let mut r: Vec<String> = self.point.iter().map(|x| fmt_num(*x)).collect();
        r.push(fmt_num(self.omega_norm));
        r.extend(self.min_hessian_eigenvalues().into_iter().map(fmt_num));
        r.push(fmt_num(self.sigma_min()));
        r.push(self.verdict.code().to_string());
        r
    }
}

/// Shortest round-tripping decimal representation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

/// Apply the decision table to precomputed derivative data.
///
/// `hessians` are the per-player own blocks (symmetrized here before
/// eigen-analysis); `jacobian` is `d omega` on the same coordinates.
pub fn classify_from_parts(
    point: &[f64],
    omega: &[f64],
    hessians: &[DMatrix<f64>],
    jacobian: &DMatrix<f64>,
    tol: &Tolerances,
    method: DerivMethod,
) -> Result<EquilibriumReport> {
    tol.validate()?;
    let omega_norm = sup_norm(omega);
    let hessian_spectra = hessians
        .iter()
        .map(|h| linalg::symmetric_eigenvalues(&((h + h.transpose()) * 0.5)))
        .collect::<Result<Vec<_>>>()?;
    let jacobian_singular_values = linalg::singular_values(jacobian)?;
    let eig = linalg::eigenvalues(jacobian)?;
    let verdict = decide(omega_norm, &hessian_spectra, &jacobian_singular_values, &eig, tol);
    Ok(EquilibriumReport {
        point: JointStrategy::new(point.to_vec())?,
        omega: omega.to_vec(),
        omega_norm,
        hessian_spectra,
        jacobian_singular_values,
        jacobian_eigenvalues: eig.iter().map(|z| (z.re, z.im)).collect(),
        verdict,
        tolerances_used: *tol,
        method,
    })
}

fn decide(
    omega_norm: f64,
    hessian_spectra: &[Vec<f64>],
    singular_values: &[f64],
    eig: &[Complex<f64>],
    tol: &Tolerances,
) -> Classification {
    if !(omega_norm <= tol.crit) {
        return Classification::NotCritical;
    }
    let all = || hessian_spectra.iter().flatten();
    if all().any(|&l| l < -tol.eig) {
        return Classification::SecondOrderViolated;
    }
    if all().any(|&l| l <= tol.eig) {
        return Classification::NecessaryOnly;
    }
    let degenerate = match (singular_values.first(), singular_values.last()) {
        (Some(&max), Some(&min)) => min <= tol.sing * max,
        _ => true,
    };
    let flow_stable = if eig.iter().all(|z| z.re > tol.eig) {
        FlowStability::Stable
    } else if eig.iter().any(|z| z.re < -tol.eig) {
        FlowStability::Unstable
    } else {
        FlowStability::Marginal
    };
    Classification::DifferentialNash {
        degenerate,
        flow_stable,
    }
}

/// Evaluate the game form, own Hessians, and game Jacobian at `u` and classify.
pub fn classify_point(
    game: &GameDefinition,
    u: &[f64],
    tol: &Tolerances,
    method: DerivMethod,
) -> Result<EquilibriumReport> {
    let omega = game_form(game, u, method)?;
    let hessians = (0..game.n_players())
        .map(|i| player_hessian(game, i, u, method).map(|h| h.matrix))
        .collect::<Result<Vec<_>>>()?;
    let jac = game_jacobian(game, u, method)?;
    classify_from_parts(u, omega.stacked(), &hessians, &jac.matrix, tol, method)
}

/// A unilateral deviation that strictly lowers a player's cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub player: usize,
    /// The deviating player's block.
    pub deviation: Vec<f64>,
    pub cost_at_point: f64,
    pub cost_at_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleVerdict {
    ConfirmedStrict,
    ViolatedBy(Witness),
    Inconclusive,
}

/// Largest joint dimension the grid oracle accepts.
pub const ORACLE_MAX_DIM: usize = 4;

/// Brute-force check of the local Nash inequalities on a grid.
///
/// For each player, every grid point of the cube `[-radius, radius]^{m_i}`
/// lying in the Euclidean ball is tried as a unilateral deviation with the
/// other blocks held fixed. The strongest strict improvement found is
/// returned as a witness; ties with no improvement give `Inconclusive`.
pub fn local_nash_oracle(
    game: &GameDefinition,
    u: &[f64],
    radius: f64,
    grid_points_per_axis: usize,
) -> Result<OracleVerdict> {
    game.check_point(u)?;
    if game.dim() > ORACLE_MAX_DIM {
        return Err(Error::OracleRefused(format!(
            "joint dimension {} exceeds {ORACLE_MAX_DIM}",
            game.dim()
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::OracleRefused("radius must be positive".into()));
    }
    if grid_points_per_axis < 3 || grid_points_per_axis.is_multiple_of(2) {
        return Err(Error::OracleRefused("grid points per axis must be odd and at least 3".into()));
    }
    let g = grid_points_per_axis;
    let center = (g - 1) / 2;
    let spacing = 2.0 * radius / (g - 1) as f64;

    let mut best: Option<Witness> = None;
    let mut tie = false;
    for i in 0..game.n_players() {
        let block = game.block(i);
        let mi = block.len();
        let base = game.eval_cost(i, u)?;
        let mut x = u.to_vec();
        let total = g.pow(mi as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut offsets = Vec::with_capacity(mi);
            for _ in 0..mi {
                offsets.push((rem % g) as f64 - center as f64);
                rem /= g;
            }
            if offsets.iter().all(|&o| o == 0.0) {
                continue;
            }
            let offsets: Vec<f64> = offsets.iter().map(|o| o * spacing).collect();
            let norm = offsets.iter().map(|o| o * o).sum::<f64>().sqrt();
            if norm > radius * (1.0 + 1e-12) {
                continue;
            }
            for (k, o) in block.clone().zip(&offsets) {
                x[k] = u[k] + o;
            }
            let f = game.cost(i).value(&x);
            if !f.is_finite() {
                return Err(Error::NonFiniteCost {
                    player: i,
                    point: x.clone(),
                });
            }
            if f < base {
                let improvement = base - f;
                if best
                    .as_ref()
                    .is_none_or(|w| improvement > w.cost_at_point - w.cost_at_deviation)
                {
                    best = Some(Witness {
                        player: i,
                        deviation: x[block.clone()].to_vec(),
                        cost_at_point: base,
                        cost_at_deviation: f,
                    });
                }
            } else if f == base {
                tie = true;
            }
        }
    }
    Ok(match best {
        Some(w) => OracleVerdict::ViolatedBy(w),
        None if tie => OracleVerdict::Inconclusive,
        None => OracleVerdict::ConfirmedStrict,
    })
}
