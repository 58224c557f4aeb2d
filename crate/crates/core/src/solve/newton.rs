use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::calculus::{game_form, game_jacobian, sup_norm, DerivMethod};
use crate::classify::{classify_point, EquilibriumReport, Tolerances};
use crate::error::{Error, Result};
use crate::game::{GameDefinition, JointStrategy};
use crate::linalg;

/// Damped Newton iteration on `omega(u) = 0` with `d omega` as Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub max_iters: usize,
    /// Stop once `|omega|_inf <= residual_tol`.
    pub residual_tol: f64,
    /// Backtracking factor in (0, 1).
    pub damping: f64,
    pub max_halvings: usize,
    /// Relative `sigma_min / sigma_max` cutoff below which the linear solve is refused.
    pub singular_tol: f64,
    pub method: DerivMethod,
    /// Used to classify the converged point.
    pub tolerances: Tolerances,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iters: 50,
            residual_tol: 1e-10,
            damping: 0.5,
            max_halvings: 20,
            singular_tol: 1e-12,
            method: DerivMethod::Analytic,
            tolerances: Tolerances::default(),
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidOption("max_iters must be positive".into()));
        }
        if !(self.residual_tol > 0.0) || !(self.singular_tol > 0.0) {
            return Err(Error::InvalidOption("newton tolerances must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidOption("damping must lie in (0, 1)".into()));
        }
        self.tolerances.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonSolution {
    pub point: JointStrategy,
    pub report: EquilibriumReport,
    pub iterations: usize,
    /// `|omega|_inf` at every iterate, starting with `u0`.
    pub residuals: Vec<f64>,
}

fn residual(game: &GameDefinition, u: &[f64], method: DerivMethod) -> Result<Vec<f64>> {
    let w = game_form(game, u, method)?.into_stacked();
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { time: None });
    }
    Ok(w)
}

/// Solve `omega(u) = 0` from `u0`.
///
/// Each step solves `d omega(u_k) delta = -omega(u_k)` and backtracks by
/// `damping` until the residual decreases; if no trial within
/// `max_halvings` decreases it, the full step is taken.
pub fn newton_solve(game: &GameDefinition, u0: &[f64], opts: &NewtonOptions) -> Result<NewtonSolution> {
    opts.validate()?;
    game.check_point(u0)?;
    let mut u = DVector::from_column_slice(u0);
    let mut w = residual(game, u.as_slice(), opts.method)?;
    let mut r = sup_norm(&w);
    let mut residuals = vec![r];
    for iter in 0..=opts.max_iters {
        if r <= opts.residual_tol {
            let report = classify_point(game, u.as_slice(), &opts.tolerances, opts.method)?;
            return Ok(NewtonSolution {
                point: JointStrategy::new(u.as_slice().to_vec())?,
                report,
                iterations: iter,
                residuals,
            });
        }
        if iter == opts.max_iters {
            break;
        }
        let jac = game_jacobian(game, u.as_slice(), opts.method)?.matrix;
        let ratio = linalg::singular_ratio(&linalg::singular_values(&jac)?);
        if ratio <= opts.singular_tol {
            return Err(Error::SingularJacobian { iteration: iter, ratio });
        }
        let rhs = -DVector::from_vec(w.clone());
        let delta = linalg::solve(&jac, &rhs).ok_or(Error::SingularJacobian { iteration: iter, ratio })?;

        let mut accepted = None;
        let mut t = 1.0;
        for _ in 0..=opts.max_halvings {
            let cand = &u + &delta * t;
            if let Ok(wc) = residual(game, cand.as_slice(), opts.method) {
                let rc = sup_norm(&wc);
                if rc < r {
                    accepted = Some((cand, wc, rc));
                    break;
                }
            }
            t *= opts.damping;
        }
        let (next, wn, rn) = match accepted {
            Some(a) => a,
            None => {
                let cand = &u + &delta;
                let wc = residual(game, cand.as_slice(), opts.method)?;
                let rc = sup_norm(&wc);
                (cand, wc, rc)
            }
        };
        u = next;
        w = wn;
        r = rn;
        residuals.push(r);
    }
    Err(Error::MaxIters {
        iterations: opts.max_iters,
        residual: r,
    })
}
