//! Gradient play: the uncoupled dynamics `u' = -omega(u)`.
//!
//! Block `i` of the vector field depends only on `f_i`, so each player
//! descends their own cost using only their own gradient.

use serde::{Deserialize, Serialize};

use crate::calculus::{game_form, sup_norm, DerivMethod};
use crate::error::{Error, Result};
use crate::game::GameDefinition;
use crate::ode::{dopri5_step, error_norm, rk4_step};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepControl {
    Rk4 { dt: f64 },
    Rk45 { rtol: f64, atol: f64 },
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl::Rk45 { rtol: 1e-8, atol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub step: StepControl,
    pub t_max: f64,
    /// Converged once `|omega|_inf <= tol_stop`.
    pub tol_stop: f64,
    /// Diverged once `|u|_inf >= norm_bound`.
    pub norm_bound: f64,
    pub method: DerivMethod,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            step: StepControl::default(),
            t_max: 20.0,
            tol_stop: 1e-10,
            norm_bound: 1e6,
            method: DerivMethod::Analytic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowOutcome {
    Converged { point: Vec<f64> },
    Diverged { norm: f64 },
    MaxTime,
}

impl FlowOutcome {
    pub fn code(&self) -> &'static str {
        match self {
            FlowOutcome::Converged { .. } => "converged",
            FlowOutcome::Diverged { .. } => "diverged",
            FlowOutcome::MaxTime => "max_time",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub omega_norms: Vec<f64>,
    pub outcome: FlowOutcome,
}

impl FlowTrajectory {
    pub fn final_point(&self) -> &[f64] {
        self.points.last().expect("trajectory holds at least the initial state")
    }

    /// Header `t, u1..um, omega_norm` for CSV output.
    pub fn csv_header(m: usize) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend((1..=m).map(|k| format!("u{k}")));
        h.push("omega_norm".into());
        h
    }

    pub fn csv_records(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        self.times
            .iter()
            .zip(&self.points)
            .zip(&self.omega_norms)
            .map(|((t, u), w)| {
                let mut r = vec![format!("{t:?}")];
                r.extend(u.iter().map(|x| format!("{x:?}")));
                r.push(format!("{w:?}"));
                r
            })
    }
}

impl FlowOptions {
    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidOption("t_max must be positive".into()));
        }
        if !(self.tol_stop >= 0.0) || !(self.norm_bound > 0.0) {
            return Err(Error::InvalidOption("stop thresholds must be non-negative".into()));
        }
        match self.step {
            StepControl::Rk4 { dt } if !(dt > 0.0 && dt.is_finite()) => {
                Err(Error::InvalidOption("dt must be positive".into()))
            }
            StepControl::Rk45 { rtol, atol } if !(rtol > 0.0 && atol > 0.0) => {
                Err(Error::InvalidOption("rk45 tolerances must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

struct Recorder<'a> {
    game: &'a GameDefinition,
    opts: &'a FlowOptions,
    traj: FlowTrajectory,
}

impl Recorder<'_> {
    /// Record a state; returns `true` when a stop rule fires.
    fn push(&mut self, t: f64, u: Vec<f64>) -> Result<bool> {
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                time: self.traj.times.last().copied(),
            });
        }
        let w = sup_norm(game_form(self.game, &u, self.opts.method)?.stacked());
        if !w.is_finite() {
            return Err(Error::NonFinite {
                time: self.traj.times.last().copied(),
            });
        }
        let norm = sup_norm(&u);
        self.traj.times.push(t);
        self.traj.omega_norms.push(w);
        if w <= self.opts.tol_stop {
            self.traj.outcome = FlowOutcome::Converged { point: u.clone() };
            self.traj.points.push(u);
            return Ok(true);
        }
        self.traj.points.push(u);
        if norm >= self.opts.norm_bound {
            self.traj.outcome = FlowOutcome::Diverged { norm };
            return Ok(true);
        }
        Ok(false)
    }
}

/// Integrate gradient play from `u0` until a stop rule fires or `t_max`.
pub fn gradient_play(game: &GameDefinition, u0: &[f64], opts: &FlowOptions) -> Result<FlowTrajectory> {
    opts.validate()?;
    game.check_point(u0)?;
    let mut rhs = |_t: f64, u: &[f64]| -> Result<Vec<f64>> {
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { time: None });
        }
        Ok(game_form(game, u, opts.method)?.into_stacked().into_iter().map(|w| -w).collect())
    };
    let mut rec = Recorder {
        game,
        opts,
        traj: FlowTrajectory {
            times: Vec::new(),
            points: Vec::new(),
            omega_norms: Vec::new(),
            outcome: FlowOutcome::MaxTime,
        },
    };
    if rec.push(0.0, u0.to_vec())? {
        return Ok(rec.traj);
    }
    let with_time = |e: Error, t: f64| match e {
        Error::NonFinite { .. } => Error::NonFinite { time: Some(t) },
        other => other,
    };

    match opts.step {
        StepControl::Rk4 { dt } => {
            let n = (opts.t_max / dt).round().max(1.0) as usize;
            let n = if (n as f64) * dt < opts.t_max * (1.0 - 1e-12) { n + 1 } else { n };
            let mut u = u0.to_vec();
            for k in 0..n {
                let t = k as f64 * dt;
                let t_next = ((k + 1) as f64 * dt).min(opts.t_max);
                u = rk4_step(&mut rhs, t, &u, t_next - t).map_err(|e| with_time(e, t))?;
                if rec.push(t_next, u.clone())? {
                    break;
                }
            }
        }
        StepControl::Rk45 { rtol, atol } => {
            let mut t = 0.0;
            let mut u = u0.to_vec();
            let mut h = (opts.t_max * 1e-3).min(1e-2);
            let h_min = opts.t_max * 1e-14;
            while t < opts.t_max {
                h = h.min(opts.t_max - t);
                let (u_new, err) = dopri5_step(&mut rhs, t, &u, h).map_err(|e| with_time(e, t))?;
                let en = error_norm(&err, &u, &u_new, rtol, atol);
                if !en.is_finite() {
                    return Err(Error::NonFinite { time: Some(t) });
                }
                if en <= 1.0 {
                    t = if opts.t_max - t - h <= h_min { opts.t_max } else { t + h };
                    u = u_new;
                    if rec.push(t, u.clone())? {
                        break;
                    }
                }
                let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                h *= factor;
                if h < h_min {
                    return Err(Error::NonFinite { time: Some(t) });
                }
            }
        }
    }
    Ok(rec.traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Builtin;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn continuum_flow_projects_onto_the_line() {
        let g = Builtin::BettySue.game();
        for step in [StepControl::default(), StepControl::Rk4 { dt: 0.01 }] {
            let opts = FlowOptions { step, ..Default::default() };
            let tr = gradient_play(&g, &[1.0, 0.0], &opts).unwrap();
            assert!(dist(tr.final_point(), &[0.5, 0.5]) < 1e-6, "{step:?}");
            assert!(tr.omega_norms.last().unwrap() < &1e-7, "{:?}", tr.omega_norms.last());
            assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn saddle_flow_diverges_along_unstable_direction() {
        let g = Builtin::IncentiveGame { a: -0.5, tau: 0.0 }.game();
        let opts = FlowOptions {
            t_max: 30.0,
            norm_bound: 1e3,
            ..Default::default()
        };
        let tr = gradient_play(&g, &[0.01, 0.01], &opts).unwrap();
        assert!(matches!(tr.outcome, FlowOutcome::Diverged { .. }));
        // growth rate 0.5: 0.01 e^{0.5 t} = 1e3 at t = 2 ln(1e5)
        let t_hit = 2.0 * 1e5f64.ln();
        let n = tr.times.len();
        assert!(tr.times[n - 2] < t_hit + 0.01 && t_hit - 0.01 < tr.times[n - 1], "{:?}", &tr.times[n - 2..]);
    }

    #[test]
    fn rk4_lands_on_t_max() {
        let g = Builtin::IncentiveGame { a: 1.0, tau: 20.0 }.game();
        let opts = FlowOptions {
            step: StepControl::Rk4 { dt: 0.3 },
            t_max: 1.0,
            ..Default::default()
        };
        let tr = gradient_play(&g, &[0.0, 0.0], &opts).unwrap();
        assert_eq!(*tr.times.last().unwrap(), 1.0);
        assert_eq!(tr.outcome, FlowOutcome::MaxTime);
    }

    #[test]
    fn invalid_options() {
        let g = Builtin::BettySue.game();
        let opts = FlowOptions { t_max: 0.0, ..Default::default() };
        assert!(gradient_play(&g, &[0.0, 0.0], &opts).is_err());
        let opts = FlowOptions {
            step: StepControl::Rk4 { dt: -1.0 },
            ..Default::default()
        };
        assert!(gradient_play(&g, &[0.0, 0.0], &opts).is_err());
    }
}
