use nalgebra::DVector;
use rayon::prelude::*;

use super::model::{ControlProfile, CostateTrajectory, OpenLoopGame, StateTrajectory};
use crate::error::{Error, Result};
use crate::ode::rk4_step;

fn finite_or(v: Vec<f64>, t: f64) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite { time: Some(t) })
    }
}

/// Integrate the state with RK4, holding each interval's controls fixed.
pub fn simulate_state(olg: &OpenLoopGame, controls: &ControlProfile) -> Result<StateTrajectory> {
    olg.check_profile(controls)?;
    let dt = olg.dt();
    let mut states = Vec::with_capacity(olg.steps() + 1);
    let mut x = olg.x0().to_vec();
    states.push(x.clone());
    for k in 0..olg.steps() {
        let u = controls.interval(k);
        let mut rhs = |_t: f64, x: &[f64]| Ok(olg.dynamics().eval(x, &u));
        x = finite_or(rk4_step(&mut rhs, olg.time(k), &x, dt)?, olg.time(k + 1))?;
        states.push(x.clone());
    }
    Ok(StateTrajectory {
        times: (0..=olg.steps()).map(|k| olg.time(k)).collect(),
        states,
    })
}

/// Integrate `p' = -p dh/dx` backward from `p(T) = grad f_i(x(T))`.
///
/// Within interval `k` the state Jacobian is taken at the linear interpolant
/// of the stored nodes and the interval's controls.
pub fn simulate_costate(
    olg: &OpenLoopGame,
    i: usize,
    state: &StateTrajectory,
    controls: &ControlProfile,
) -> Result<CostateTrajectory> {
    olg.check_player(i)?;
    olg.check_profile(controls)?;
    if state.states.len() != olg.steps() + 1 {
        return Err(Error::DimensionMismatch {
            expected: olg.steps() + 1,
            got: state.states.len(),
        });
    }
    let n = olg.steps();
    let dt = olg.dt();
    let mut costates = vec![Vec::new(); n + 1];
    let mut p = finite_or(olg.terminal_cost(i).gradient(state.terminal()), olg.horizon())?;
    costates[n] = p.clone();
    for k in (0..n).rev() {
        let u = controls.interval(k);
        let t_k = olg.time(k);
        let mut rhs = |t: f64, p: &[f64]| {
            let theta = ((t - t_k) / dt).clamp(0.0, 1.0);
            let jac = olg.dynamics().jac_x(&state.interpolate(k, theta), &u);
            let out = -(jac.transpose() * DVector::from_column_slice(p));
            Ok(out.as_slice().to_vec())
        };
        p = finite_or(rk4_step(&mut rhs, olg.time(k + 1), &p, -dt)?, t_k)?;
        costates[k] = p.clone();
    }
    Ok(CostateTrajectory {
        player: i,
        times: state.times.clone(),
        costates,
    })
}

fn gradient_from(
    olg: &OpenLoopGame,
    i: usize,
    state: &StateTrajectory,
    costate: &CostateTrajectory,
    controls: &ControlProfile,
) -> Result<Vec<f64>> {
    let h = olg.dynamics();
    let mut g = Vec::with_capacity(olg.steps() * olg.control_dims()[i]);
    for k in 0..olg.steps() {
        let u = controls.interval(k);
        let (x0, x1) = (&state.states[k], &state.states[k + 1]);
        let p0 = DVector::from_column_slice(&costate.costates[k]);
        let p1 = DVector::from_column_slice(&costate.costates[k + 1]);
        // cubic Hermite midpoint of the costate, using p' = -p dh/dx at both nodes
        let dp0 = h.jac_x(x0, &u).transpose() * &p0;
        let dp1 = h.jac_x(x1, &u).transpose() * &p1;
        let p_mid = (&p0 + &p1) * 0.5 + (dp1 - dp0) * (olg.dt() / 8.0);
        let b = h.jac_u(i, &state.interpolate(k, 0.5), &u);
        g.extend((b.transpose() * p_mid).iter());
    }
    finite_or(g, olg.horizon())
}

/// Per-interval gradient of player `i`'s cost with respect to their own
/// controls, `p_i(t) dh/du_i` at each interval midpoint.
///
/// The state at the midpoint is the linear interpolant of the nodes.
///
/// Entries carry no quadrature weight: a finite difference of the rolled-out
/// cost with respect to one interval entry equals this value times `T / N`.
pub fn control_gradient(olg: &OpenLoopGame, i: usize, controls: &ControlProfile) -> Result<Vec<f64>> {
    olg.check_player(i)?;
    let state = simulate_state(olg, controls)?;
    let costate = simulate_costate(olg, i, &state, controls)?;
    gradient_from(olg, i, &state, &costate, controls)
}

/// All players' control gradients, shaped like a control profile.
pub fn ol_game_form(olg: &OpenLoopGame, controls: &ControlProfile) -> Result<ControlProfile> {
    let state = simulate_state(olg, controls)?;
    let blocks = (0..olg.n_players())
        .into_par_iter()
        .map(|i| {
            let costate = simulate_costate(olg, i, &state, controls)?;
            gradient_from(olg, i, &state, &costate, controls)
        })
        .collect::<Result<Vec<_>>>()?;
    ControlProfile::new(olg.steps(), olg.control_dims().to_vec(), blocks)
}

/// Terminal cost of player `i` after rolling out `controls`.
pub fn rollout_cost(olg: &OpenLoopGame, i: usize, controls: &ControlProfile) -> Result<f64> {
    olg.check_player(i)?;
    let state = simulate_state(olg, controls)?;
    let v = olg.terminal_cost(i).value(state.terminal());
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { time: Some(olg.horizon()) })
    }
}
