use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adjoint::ol_game_form;
use super::model::{ControlProfile, OpenLoopGame};
use crate::calculus::{sup_norm, DerivMethod};
use crate::classify::{classify_from_parts, EquilibriumReport, Tolerances};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlPlayOptions {
    pub step_size: f64,
    pub max_iters: usize,
    /// Stop once the sup-norm of the game form is at or below this.
    pub tol: f64,
    /// Report divergence once the sup-norm exceeds this.
    pub divergence_bound: f64,
}

impl Default for OlPlayOptions {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            max_iters: 1000,
            tol: 1e-8,
            divergence_bound: 1e10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OlPlayStatus {
    Converged,
    MaxIters,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlPlayResult {
    pub profile: ControlProfile,
    /// Game-form sup-norm at each visited iterate, starting with the initial one.
    pub norms: Vec<f64>,
    pub iterations: usize,
    pub status: OlPlayStatus,
}

/// Simultaneous gradient steps `u_i <- u_i - alpha g_i` on every player.
pub fn ol_gradient_play(olg: &OpenLoopGame, controls0: &ControlProfile, opts: &OlPlayOptions) -> Result<OlPlayResult> {
    if !(opts.step_size > 0.0 && opts.step_size.is_finite()) {
        return Err(Error::InvalidOption("step size must be positive".into()));
    }
    if !(opts.tol >= 0.0) || !(opts.divergence_bound > opts.tol) {
        return Err(Error::InvalidOption("need 0 <= tol < divergence_bound".into()));
    }
    olg.check_profile(controls0)?;
    let mut u = controls0.clone();
    let mut norms = Vec::new();
    let mut iterations = 0;
    let status = loop {
        let w = ol_game_form(olg, &u)?;
        let norm = sup_norm(&w.flatten());
        norms.push(norm);
        if norm <= opts.tol {
            break OlPlayStatus::Converged;
        }
        if norm > opts.divergence_bound {
            break OlPlayStatus::Diverged;
        }
        if iterations == opts.max_iters {
            break OlPlayStatus::MaxIters;
        }
        for i in 0..olg.n_players() {
            for (ui, gi) in u.player_mut(i).iter_mut().zip(w.player(i)) {
                *ui -= opts.step_size * gi;
            }
        }
        if u.flatten().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: None });
        }
        iterations += 1;
    };
    Ok(OlPlayResult {
        profile: u,
        norms,
        iterations,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlClassifyOptions {
    /// Central-difference step on each control entry.
    pub fd_step: f64,
    /// Refuse problems with more than this many control unknowns.
    pub max_unknowns: usize,
    pub tolerances: Tolerances,
}

impl Default for OlClassifyOptions {
    fn default() -> Self {
        Self {
            fd_step: 1e-4,
            max_unknowns: 400,
            tolerances: Tolerances::default(),
        }
    }
}

/// Discretized game Jacobian over all `N * sum_i k_i` control entries,
/// by central differences of [`ol_game_form`].
pub fn ol_game_jacobian(olg: &OpenLoopGame, controls: &ControlProfile, fd_step: f64) -> Result<DMatrix<f64>> {
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::InvalidOption("fd_step must be positive".into()));
    }
    olg.check_profile(controls)?;
    let flat = controls.flatten();
    let m = flat.len();
    let columns = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut plus = flat.clone();
            let mut minus = flat.clone();
            plus[j] += fd_step;
            minus[j] -= fd_step;
            let wp = ol_game_form(olg, &ControlProfile::from_flat(olg, &plus)?)?.flatten();
            let wm = ol_game_form(olg, &ControlProfile::from_flat(olg, &minus)?)?.flatten();
            Ok(wp.iter().zip(&wm).map(|(a, b)| (a - b) / (2.0 * fd_step)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(m, m, |r, c| columns[c][r]))
}

/// Classify a control profile on the discretized strategy space.
///
/// The point in the report is the flattened profile; verdicts refer to the
/// grid with `olg.steps()` intervals.
pub fn ol_classify(olg: &OpenLoopGame, controls: &ControlProfile, opts: &OlClassifyOptions) -> Result<EquilibriumReport> {
    let size = olg.unknowns();
    if size > opts.max_unknowns {
        return Err(Error::DimensionGuard {
            size,
            cap: opts.max_unknowns,
        });
    }
    let omega = ol_game_form(olg, controls)?.flatten();
    let jac = ol_game_jacobian(olg, controls, opts.fd_step)?;
    let mut hessians = Vec::with_capacity(olg.n_players());
    let mut offset = 0;
    for k in olg.control_dims() {
        let len = olg.steps() * k;
        hessians.push(jac.view((offset, offset), (len, len)).into_owned());
        offset += len;
    }
    classify_from_parts(
        &controls.flatten(),
        &omega,
        &hessians,
        &jac,
        &opts.tolerances,
        DerivMethod::CentralFd,
    )
}
