//! JSON game configuration.
//!
//! ```json
//! { "players": 2, "dims": [1, 1],
//!   "costs": [ {"polynomial": [[0.5, [2, 0]], [-1.0, [1, 1]]]},
//!              {"quadratic": {"A": [[0, -1], [-1, 1]], "b": [0, 0], "c": 0}} ] }
//! ```
//!
//! A single `{"builtin": name, "params": {...}}` entry defines the whole game.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::builtin::Builtin;
use super::cost::{Cost, Monomial, Polynomial, QuadraticCost};
use super::GameDefinition;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub players: usize,
    pub dims: Vec<usize>,
    pub costs: Vec<CostSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostSpec {
    Builtin {
        builtin: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Polynomial {
        polynomial: Vec<Monomial>,
    },
    Quadratic {
        quadratic: QuadraticSpec,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub c: f64,
}

impl CostSpec {
    /// Compile a per-player entry into a cost on `m` joint coordinates.
    pub fn compile(&self, m: usize) -> Result<Cost> {
        match self {
            CostSpec::Builtin { builtin, .. } => Err(Error::Config(format!(
                "builtin `{builtin}` defines a whole game and cannot be used as a single cost"
            ))),
            CostSpec::Polynomial { polynomial } => {
                Polynomial::new(m, polynomial.clone()).map(Cost::Polynomial)
            }
            CostSpec::Quadratic { quadratic } => {
                if quadratic.b.len() != m {
                    return Err(Error::Config(format!(
                        "quadratic b has length {}, expected {m}",
                        quadratic.b.len()
                    )));
                }
                QuadraticCost::from_rows(&quadratic.a, &quadratic.b, quadratic.c).map(Cost::Quadratic)
            }
        }
    }
}

impl GameConfig {
    pub fn build(&self) -> Result<GameDefinition> {
        if self.players == 0 {
            return Err(Error::Config("`players` must be at least 1".into()));
        }
        if self.dims.len() != self.players {
            return Err(Error::Config(format!(
                "`dims` has {} entries for {} players",
                self.dims.len(),
                self.players
            )));
        }
        let game = match self.costs.as_slice() {
            [CostSpec::Builtin { builtin, params }] => {
                let game = Builtin::from_name(builtin, params)?.game();
                if game.dims() != self.dims.as_slice() {
                    return Err(Error::Config(format!(
                        "builtin `{builtin}` has dims {:?}, config declares {:?}",
                        game.dims(),
                        self.dims
                    )));
                }
                game
            }
            specs => {
                if specs.len() != self.players {
                    return Err(Error::Config(format!(
                        "`costs` has {} entries for {} players",
                        specs.len(),
                        self.players
                    )));
                }
                let m: usize = self.dims.iter().sum();
                let costs = specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.compile(m).map_err(|e| prefix(e, i)))
                    .collect::<Result<Vec<_>>>()?;
                GameDefinition::new(self.dims.clone(), costs)?
            }
        };
        let game = match &self.labels {
            Some(l) => game.with_labels(l.clone())?,
            None => game,
        };
        match &self.domain {
            Some(d) => game.with_domain(d.clone()),
            None => Ok(game),
        }
    }
}

fn prefix(e: Error, i: usize) -> Error {
    match e {
        Error::NonSymmetric {
            name,
            row,
            col,
            upper,
            lower,
        } => Error::NonSymmetric {
            name: format!("costs[{i}].{name}"),
            row,
            col,
            upper,
            lower,
        },
        Error::Config(s) | Error::InvalidGame(s) => Error::Config(format!("costs[{i}]: {s}")),
        other => other,
    }
}

/// Parse and validate a JSON game configuration.
pub fn load_game(config_text: &str) -> Result<GameDefinition> {
    let cfg: GameConfig = serde_json::from_str(config_text)?;
    cfg.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_config() {
        let g = load_game(r#"{"players":2,"dims":[1,1],"costs":[{"builtin":"betty_sue"}]}"#).unwrap();
        assert_eq!(g.eval_cost(0, &[1.0, 1.0]).unwrap(), -0.5);
        let g = load_game(
            r#"{"players":2,"dims":[1,1],"costs":[{"builtin":"incentive_game","params":{"a":1,"tau":20}}]}"#,
        )
        .unwrap();
        assert_eq!(g.eval_cost(0, &[20.0, 20.0]).unwrap(), -200.0);
    }

    #[test]
    fn single_player_polynomial() {
        let g = load_game(r#"{"players":1,"dims":[1],"costs":[{"polynomial":[[1.0,[2]]]}]}"#).unwrap();
        assert_eq!(g.n_players(), 1);
        assert_eq!(g.eval_cost(0, &[3.0]).unwrap(), 9.0);
    }

    #[test]
    fn quadratic_config() {
        let g = load_game(
            r#"{"players":2,"dims":[1,1],"costs":[
                {"quadratic":{"A":[[1,-1],[-1,0]],"b":[0,0],"c":0}},
                {"quadratic":{"A":[[0,-1],[-1,1]],"b":[0,0]}}]}"#,
        )
        .unwrap();
        assert_eq!(g.eval_cost(0, &[1.0, 1.0]).unwrap(), -0.5);
    }

    #[test]
    fn asymmetric_quadratic_is_rejected_with_index() {
        let err = load_game(
            r#"{"players":2,"dims":[1,1],"costs":[
                {"quadratic":{"A":[[1,-1],[-2,0]],"b":[0,0],"c":0}},
                {"quadratic":{"A":[[0,-1],[-1,1]],"b":[0,0],"c":0}}]}"#,
        )
        .unwrap_err();
        match err {
            Error::NonSymmetric { name, row, col, .. } => {
                assert_eq!(name, "costs[0].A");
                assert_eq!((row, col), (0, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_violations() {
        // missing key
        assert!(load_game(r#"{"players":2,"costs":[{"builtin":"betty_sue"}]}"#).is_err());
        // wrong arity
        assert!(load_game(r#"{"players":2,"dims":[1],"costs":[{"builtin":"betty_sue"}]}"#).is_err());
        assert!(load_game(r#"{"players":1,"dims":[1],"costs":[{"polynomial":[[1.0,[2,1]]]}]}"#).is_err());
        assert!(load_game(
            r#"{"players":2,"dims":[1,1],"costs":[{"polynomial":[[1.0,[2,0]]]}]}"#
        )
        .is_err());
        // unknown builtin
        assert!(matches!(
            load_game(r#"{"players":2,"dims":[1,1],"costs":[{"builtin":"chicken"}]}"#),
            Err(Error::UnknownBuiltin(_))
        ));
        // unknown top-level key
        assert!(load_game(r#"{"players":1,"dims":[1],"costs":[{"polynomial":[]}],"x":1}"#).is_err());
    }
}
