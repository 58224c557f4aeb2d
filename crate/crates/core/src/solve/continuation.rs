//! Tracking a non-degenerate equilibrium of `f_i + s * zeta_i` as `s` varies.
//!
//! Predictor: the implicit-function tangent `sigma'(s)` solving
//! `d omega_s(sigma) sigma' = -d/ds omega_s(sigma)`, where
//! `d/ds omega_s` is the game form of the perturbations themselves.
//! Corrector: Newton on the perturbed game. Folds are flagged, not traversed.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::newton::{newton_solve, NewtonOptions};
use crate::calculus::{game_form, game_jacobian};
use crate::classify::{classify_point, EquilibriumReport};
use crate::error::{Error, Result};
use crate::game::{Cost, GameDefinition};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    /// `(s_min, s_max)`; must contain 0.
    pub s_range: (f64, f64),
    pub ds: f64,
    pub newton: NewtonOptions,
    /// `sigma_min / sigma_max` of `d omega_s` below which a fold is declared.
    pub fold_tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            s_range: (0.0, 1.0),
            ds: 0.1,
            newton: NewtonOptions::default(),
            fold_tol: 1e-8,
        }
    }
}

type PathPoint = (f64, Vec<f64>, EquilibriumReport);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathStatus {
    Complete,
    FoldDetected { s: f64 },
    LostTrack { s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationPath {
    pub s_values: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub reports: Vec<EquilibriumReport>,
    pub status: PathStatus,
}

impl ContinuationPath {
    /// Header `s, sigma_1..sigma_m, sigma_min, verdict`.
    pub fn csv_header(m: usize) -> Vec<String> {
        let mut h = vec!["s".to_string()];
        h.extend((1..=m).map(|k| format!("sigma{k}")));
        h.push("sigma_min".into());
        h.push("verdict".into());
        h
    }

    pub fn csv_records(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        self.s_values
            .iter()
            .zip(&self.points)
            .zip(&self.reports)
            .map(|((s, p), r)| {
                let mut rec = vec![format!("{s:?}")];
                rec.extend(p.iter().map(|x| format!("{x:?}")));
                rec.push(format!("{:?}", r.sigma_min()));
                rec.push(r.verdict.code().to_string());
                rec
            })
    }
}

struct Tracker<'a> {
    game: &'a GameDefinition,
    zeta: &'a [Cost],
    zeta_game: GameDefinition,
    opts: &'a ContinuationOptions,
}

impl Tracker<'_> {
    /// `sigma'(s)` at `u`, or `None` when `d omega_s` is numerically singular.
    fn tangent(&self, s: f64, u: &[f64]) -> Result<Option<DVector<f64>>> {
        let perturbed = self.game.perturbed(self.zeta, s)?;
        let jac = game_jacobian(&perturbed, u, self.opts.newton.method)?.matrix;
        if linalg::singular_ratio(&linalg::singular_values(&jac)?) < self.opts.fold_tol {
            return Ok(None);
        }
        let ds_omega = game_form(&self.zeta_game, u, self.opts.newton.method)?.into_stacked();
        Ok(linalg::solve(&jac, &-DVector::from_vec(ds_omega)))
    }

    /// Trace from `(0, u0)` to `s_end` on the grid `k * ds`.
    fn branch(&self, u0: &[f64], s_end: f64) -> Result<(Vec<PathPoint>, PathStatus)> {
        let dir = s_end.signum();
        let mut out = Vec::new();
        if s_end == 0.0 {
            return Ok((out, PathStatus::Complete));
        }
        let mut s = 0.0;
        let mut u = u0.to_vec();
        let mut k = 0usize;
        while s * dir < s_end * dir {
            k += 1;
            let mut s_next = dir * k as f64 * self.opts.ds;
            if s_next * dir > s_end * dir || (s_end - s_next).abs() < 1e-12 * self.opts.ds {
                s_next = s_end;
            }
            let Some(tangent) = self.tangent(s, &u)? else {
                return Ok((out, PathStatus::FoldDetected { s }));
            };
            let predicted: Vec<f64> = u
                .iter()
                .zip(tangent.iter())
                .map(|(x, t)| x + (s_next - s) * t)
                .collect();
            let perturbed = self.game.perturbed(self.zeta, s_next)?;
            let sol = match newton_solve(&perturbed, &predicted, &self.opts.newton) {
                Ok(sol) => sol,
                Err(Error::SingularJacobian { .. }) => {
                    return Ok((out, PathStatus::FoldDetected { s: s_next }))
                }
                Err(e) if e.is_input_error() => return Err(e),
                Err(_) => return Ok((out, PathStatus::LostTrack { s: s_next })),
            };
            if sol.report.sigma_ratio() < self.opts.fold_tol {
                return Ok((out, PathStatus::FoldDetected { s: s_next }));
            }
            if !sol.report.verdict.is_non_degenerate_nash() {
                return Ok((out, PathStatus::LostTrack { s: s_next }));
            }
            u = sol.point.to_vec();
            s = s_next;
            out.push((s, u.clone(), sol.report));
        }
        Ok((out, PathStatus::Complete))
    }
}

/// Follow the equilibrium `u_star` of `game` under the perturbation family
/// `f_i + s * zeta_i` over `opts.s_range`.
///
/// Refused unless `u_star` is a non-degenerate differential Nash equilibrium
/// of the unperturbed game.
pub fn continue_path(
    game: &GameDefinition,
    zeta: &[Cost],
    u_star: &[f64],
    opts: &ContinuationOptions,
) -> Result<ContinuationPath> {
    let (s_min, s_max) = opts.s_range;
    if !(s_min <= 0.0 && 0.0 <= s_max && s_min.is_finite() && s_max.is_finite()) {
        return Err(Error::InvalidOption("s_range must be finite and contain 0".into()));
    }
    if !(opts.ds > 0.0 && opts.ds.is_finite()) {
        return Err(Error::InvalidOption("ds must be positive".into()));
    }
    opts.newton.validate()?;
    game.check_point(u_star)?;
    let zeta_game = GameDefinition::new(game.dims().to_vec(), zeta.to_vec())?;

    let start = classify_point(game, u_star, &opts.newton.tolerances, opts.newton.method)?;
    if !start.verdict.is_non_degenerate_nash() {
        return Err(Error::ContinuationRefused(format!(
            "initial point is not a non-degenerate differential Nash equilibrium ({})",
            start.verdict
        )));
    }
    if start.omega_norm > opts.newton.residual_tol {
        return Err(Error::ContinuationRefused(format!(
            "initial point has residual {:e} above {:e}",
            start.omega_norm, opts.newton.residual_tol
        )));
    }

    let tracker = Tracker {
        game,
        zeta,
        zeta_game,
        opts,
    };
    let (down, down_status) = tracker.branch(u_star, s_min)?;
    let (up, up_status) = tracker.branch(u_star, s_max)?;

    let mut path = ContinuationPath {
        s_values: Vec::new(),
        points: Vec::new(),
        reports: Vec::new(),
        status: match (up_status, down_status) {
            (PathStatus::Complete, d) => d,
            (u, _) => u,
        },
    };
    let origin = std::iter::once((0.0, u_star.to_vec(), start));
    for (s, p, r) in down.into_iter().rev().chain(origin).chain(up) {
        path.s_values.push(s);
        path.points.push(p);
        path.reports.push(r);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Builtin, Polynomial};

    fn own_linear() -> Vec<Cost> {
        vec![
            Cost::Polynomial(Polynomial::coordinate(2, 0)),
            Cost::Polynomial(Polynomial::coordinate(2, 1)),
        ]
    }

    #[test]
    fn affine_game_tracks_exactly() {
        let g = Builtin::IncentiveGame { a: 1.0, tau: 20.0 }.game();
        let path = continue_path(&g, &own_linear(), &[20.0, 20.0], &ContinuationOptions::default()).unwrap();
        assert_eq!(path.status, PathStatus::Complete);
        assert_eq!(path.s_values.len(), 11);
        for (s, p) in path.s_values.iter().zip(&path.points) {
            for x in p {
                assert!((x - (20.0 - s)).abs() < 1e-12, "s={s}: {p:?}");
            }
        }
        assert_eq!(*path.s_values.last().unwrap(), 1.0);
    }

    #[test]
    fn two_sided_range() {
        let g = Builtin::IncentiveGame { a: 1.0, tau: 20.0 }.game();
        let opts = ContinuationOptions {
            s_range: (-0.5, 0.25),
            ..Default::default()
        };
        let path = continue_path(&g, &own_linear(), &[20.0, 20.0], &opts).unwrap();
        assert!(path.s_values.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(path.s_values.first(), Some(&-0.5));
        assert_eq!(path.s_values.last(), Some(&0.25));
    }

    #[test]
    fn zero_perturbation_is_constant() {
        let g = Builtin::BettySueAsym { a: 2.0 }.game();
        let zeta = vec![Cost::Polynomial(Polynomial::zero(2)); 2];
        let path = continue_path(&g, &zeta, &[0.0, 0.0], &ContinuationOptions::default()).unwrap();
        assert!(path.points.iter().all(|p| p == &vec![0.0, 0.0]));
    }

    #[test]
    fn degenerate_start_is_refused() {
        let g = Builtin::BettySue.game();
        assert!(matches!(
            continue_path(&g, &own_linear(), &[0.0, 0.0], &ContinuationOptions::default()),
            Err(Error::ContinuationRefused(_))
        ));
    }

    #[test]
    fn fold_is_detected() {
        // f_1 = u1^3/3 - u1 + s * u1: critical points u1^2 = 1 - s merge at s = 1
        let f1 = Polynomial::from_terms(2, [(1.0 / 3.0, vec![3, 0]), (-1.0, vec![1, 0])]).unwrap();
        let f2 = Polynomial::from_terms(2, [(1.0, vec![0, 2])]).unwrap();
        let g = GameDefinition::new(vec![1, 1], vec![Cost::Polynomial(f1), Cost::Polynomial(f2)]).unwrap();
        let zeta = vec![
            Cost::Polynomial(Polynomial::coordinate(2, 0)),
            Cost::Polynomial(Polynomial::zero(2)),
        ];
        let opts = ContinuationOptions {
            s_range: (0.0, 2.0),
            ds: 0.03,
            ..Default::default()
        };
        let path = continue_path(&g, &zeta, &[1.0, 0.0], &opts).unwrap();
        match path.status {
            PathStatus::FoldDetected { s } | PathStatus::LostTrack { s } => assert!(s > 0.98 && s < 1.03, "{s}"),
            PathStatus::Complete => panic!("walked through a fold"),
        }
        for (s, p) in path.s_values.iter().zip(&path.points) {
            assert!((p[0] - (1.0 - s).sqrt()).abs() < 1e-9, "{s} {p:?}");
            assert_eq!(p[1], 0.0);
        }
    }
}
