//! The two-player thermostat game family and its variants.
//!
//! Base game: `f1 = u1^2/2 - u1 u2`, `f2 = u2^2/2 - u1 u2`, scalar strategies.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::cost::{Cost, Polynomial, QuadraticCost};
use super::GameDefinition;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    BettySue,
    /// Player 1's coupling scaled: `f1 = u1^2/2 - a u1 u2`.
    BettySueAsym { a: f64 },
    /// Player 1 gets an extra linear term: `f1 = u1^2/2 - u1 u2 + eps u1`.
    BettySuePerturbed { eps: f64 },
    /// Both costs augmented with `(a/2)(u_i - tau)^2`.
    IncentiveGame { a: f64, tau: f64 },
}

impl Builtin {
    pub const NAMES: [&'static str; 4] = [
        "betty_sue",
        "betty_sue_asym",
        "betty_sue_perturbed",
        "incentive_game",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::BettySue => "betty_sue",
            Builtin::BettySueAsym { .. } => "betty_sue_asym",
            Builtin::BettySuePerturbed { .. } => "betty_sue_perturbed",
            Builtin::IncentiveGame { .. } => "incentive_game",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            Builtin::BettySue => vec![],
            Builtin::BettySueAsym { a } => vec![("a", a)],
            Builtin::BettySuePerturbed { eps } => vec![("eps", eps)],
            Builtin::IncentiveGame { a, tau } => vec![("a", a), ("tau", tau)],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Resolve a builtin by name. Unknown parameter keys are rejected.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "betty_sue" => &[],
            "betty_sue_asym" => &["a"],
            "betty_sue_perturbed" => &["eps", "epsilon"],
            "incentive_game" => &["a", "tau"],
            _ => return Err(Error::UnknownBuiltin(name.to_string())),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Config(format!(
                "builtin `{name}` does not take parameter `{k}`"
            )));
        }
        let get = |key: &str| -> Result<f64> {
            let v = params
                .get(key)
                .copied()
                .ok_or_else(|| Error::Config(format!("builtin `{name}` requires parameter `{key}`")))?;
            if !v.is_finite() {
                return Err(Error::Config(format!("parameter `{key}` must be finite")));
            }
            Ok(v)
        };
        Ok(match name {
            "betty_sue" => Builtin::BettySue,
            "betty_sue_asym" => Builtin::BettySueAsym { a: get("a")? },
            "betty_sue_perturbed" => Builtin::BettySuePerturbed {
                eps: get("eps").or_else(|_| get("epsilon"))?,
            },
            _ => Builtin::IncentiveGame {
                a: get("a")?,
                tau: get("tau")?,
            },
        })
    }

    /// Monomial coefficients `(u1^2, u1 u2, u1, 1)` of player 1 and
    /// `(u2^2, u1 u2, u2, 1)` of player 2.
    fn coefficients(&self) -> [[f64; 4]; 2] {
        match *self {
            Builtin::BettySue => [[0.5, -1.0, 0.0, 0.0], [0.5, -1.0, 0.0, 0.0]],
            Builtin::BettySueAsym { a } => [[0.5, -a, 0.0, 0.0], [0.5, -1.0, 0.0, 0.0]],
            Builtin::BettySuePerturbed { eps } => [[0.5, -1.0, eps, 0.0], [0.5, -1.0, 0.0, 0.0]],
            Builtin::IncentiveGame { a, tau } => {
                // u_i^2/2 - u1 u2 + (a/2)(u_i^2 - 2 tau u_i + tau^2)
                let own = [0.5 * (1.0 + a), -1.0, -a * tau, 0.5 * a * tau * tau];
                [own, own]
            }
        }
    }

    pub fn game(&self) -> GameDefinition {
        let [c1, c2] = self.coefficients();
        let p1 = Polynomial::from_terms(
            2,
            [
                (c1[0], vec![2, 0]),
                (c1[1], vec![1, 1]),
                (c1[2], vec![1, 0]),
                (c1[3], vec![0, 0]),
            ],
        );
        let p2 = Polynomial::from_terms(
            2,
            [
                (c2[0], vec![0, 2]),
                (c2[1], vec![1, 1]),
                (c2[2], vec![0, 1]),
                (c2[3], vec![0, 0]),
            ],
        );
        let costs = vec![
            Cost::Polynomial(p1.expect("builtin polynomial is well formed")),
            Cost::Polynomial(p2.expect("builtin polynomial is well formed")),
        ];
        GameDefinition::new(vec![1, 1], costs)
            .and_then(|g| g.with_labels(vec!["betty".into(), "sue".into()]))
            .expect("builtin game is well formed")
    }

    /// The same game as explicit quadratic forms.
    pub fn quadratic_game(&self) -> QuadraticGame {
        let [c1, c2] = self.coefficients();
        let p1 = QuadraticCost::from_rows(
            &[vec![2.0 * c1[0], c1[1]], vec![c1[1], 0.0]],
            &[c1[2], 0.0],
            c1[3],
        );
        let p2 = QuadraticCost::from_rows(
            &[vec![0.0, c2[1]], vec![c2[1], 2.0 * c2[0]]],
            &[0.0, c2[2]],
            c2[3],
        );
        QuadraticGame {
            dims: vec![1, 1],
            players: vec![p1.expect("symmetric"), p2.expect("symmetric")],
        }
    }
}

/// A game in which every cost is `1/2 u'A_i u + b_i'u + c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGame {
    pub dims: Vec<usize>,
    pub players: Vec<QuadraticCost>,
}

impl QuadraticGame {
    pub fn new(dims: Vec<usize>, players: Vec<QuadraticCost>) -> Result<Self> {
        let g = Self { dims, players };
        g.to_game()?;
        Ok(g)
    }

    pub fn to_game(&self) -> Result<GameDefinition> {
        GameDefinition::new(
            self.dims.clone(),
            self.players.iter().cloned().map(Cost::Quadratic).collect(),
        )
    }

    /// Stacked own-block rows of `A_i u + b_i`, i.e. the game form.
    pub fn game_form(&self, u: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(u.len());
        let mut off = 0;
        for (q, &d) in self.players.iter().zip(&self.dims) {
            let g = q.gradient(u);
            out.rows_mut(off, d).copy_from_slice(&g[off..off + d]);
            off += d;
        }
        out
    }

    /// Own-block rows of `A_i`, stacked; constant in `u`.
    pub fn jacobian(&self) -> DMatrix<f64> {
        let m: usize = self.dims.iter().sum();
        let mut out = DMatrix::zeros(m, m);
        let mut off = 0;
        for (q, &d) in self.players.iter().zip(&self.dims) {
            out.rows_mut(off, d).copy_from(&q.a().rows(off, d));
            off += d;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same_costs(a: &GameDefinition, b: &GameDefinition) {
        for u in [[0.0, 0.0], [1.0, -2.0], [3.5, 7.25], [-10.0, 4.0]] {
            for i in 0..2 {
                assert_eq!(a.eval_cost(i, &u).unwrap(), b.eval_cost(i, &u).unwrap());
            }
        }
    }

    #[test]
    fn betty_sue_values() {
        let g = Builtin::BettySue.game();
        assert_eq!(g.eval_cost(0, &[1.0, 1.0]).unwrap(), -0.5);
        assert_eq!(g.eval_cost(1, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(g.eval_cost(1, &[2.0, 3.0]).unwrap(), 4.5 - 6.0);
    }

    #[test]
    fn incentive_value_at_target() {
        let g = Builtin::IncentiveGame { a: 1.0, tau: 20.0 }.game();
        assert_eq!(g.eval_cost(0, &[20.0, 20.0]).unwrap(), -200.0);
    }

    #[test]
    fn degenerate_parameters_recover_base_game() {
        let base = Builtin::BettySue.game();
        same_costs(&base, &Builtin::BettySueAsym { a: 1.0 }.game());
        same_costs(&base, &Builtin::BettySuePerturbed { eps: 0.0 }.game());
        same_costs(&base, &Builtin::IncentiveGame { a: 0.0, tau: 5.0 }.game());
    }

    #[test]
    fn from_name_validates() {
        let mut p = BTreeMap::new();
        assert_eq!(Builtin::from_name("betty_sue", &p).unwrap(), Builtin::BettySue);
        assert!(matches!(
            Builtin::from_name("prisoners", &p),
            Err(Error::UnknownBuiltin(_))
        ));
        assert!(Builtin::from_name("incentive_game", &p).is_err());
        p.insert("a".into(), 1.0);
        p.insert("tau".into(), 20.0);
        assert_eq!(
            Builtin::from_name("incentive_game", &p).unwrap(),
            Builtin::IncentiveGame { a: 1.0, tau: 20.0 }
        );
        p.insert("zeta".into(), 0.0);
        assert!(Builtin::from_name("incentive_game", &p).is_err());
    }

    #[test]
    fn quadratic_jacobian_of_incentive_game() {
        let q = Builtin::IncentiveGame { a: 1.0, tau: 20.0 }.quadratic_game();
        assert_eq!(q.jacobian(), DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
        assert_eq!(q.game_form(&[20.0, 20.0]).as_slice(), &[0.0, 0.0]);
    }
}
