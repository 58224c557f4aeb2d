//! Finite-dimensional continuous games.
//!
//! Each player `i` picks a block `u_i` in `R^{m_i}`; the joint strategy is the
//! stacked vector `u = (u_1, ..., u_n)` of length `m = sum m_i`. Player `i`
//! minimizes `f_i(u)`. Player indices are zero-based throughout the API.

mod builtin;
mod config;
mod cost;

use std::ops::{Deref, Range};

use serde::{Deserialize, Serialize};

pub use builtin::{Builtin, QuadraticGame};
pub use config::{load_game, CostSpec, GameConfig, QuadraticSpec};
pub use cost::{Cost, CostFunction, FnCost, Monomial, Polynomial, PolynomialCost, QuadraticCost};

use crate::error::{Error, Result};

/// Block layout of a joint strategy vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl Partition {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidGame(format!(
                "player {i} has an empty strategy space"
            )));
        }
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        offsets.push(0);
        for d in &dims {
            offsets.push(offsets.last().unwrap() + d);
        }
        Ok(Self { dims, offsets })
    }

    pub fn n_players(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn block(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Player owning joint coordinate `k`.
    pub fn owner(&self, k: usize) -> usize {
        self.offsets.partition_point(|&o| o <= k) - 1
    }
}

/// A finite joint strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JointStrategy(Vec<f64>);

impl JointStrategy {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePoint(k));
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for JointStrategy {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// An n-player continuous game with Euclidean strategy spaces.
///
/// Immutable after construction; evaluators must be pure, so a definition
/// can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct GameDefinition {
    partition: Partition,
    costs: Vec<Cost>,
    labels: Option<Vec<String>>,
    domain: Option<Vec<(f64, f64)>>,
}

impl GameDefinition {
    pub fn new(dims: Vec<usize>, costs: Vec<Cost>) -> Result<Self> {
        let partition = Partition::new(dims)?;
        if costs.len() != partition.n_players() {
            return Err(Error::InvalidGame(format!(
                "{} costs given for {} players",
                costs.len(),
                partition.n_players()
            )));
        }
        let m = partition.total();
        for (i, c) in costs.iter().enumerate() {
            if let Some(d) = c.declared_dim() {
                if d != m {
                    return Err(Error::InvalidGame(format!(
                        "cost of player {i} is defined on {d} variables, joint dimension is {m}"
                    )));
                }
            }
        }
        Ok(Self {
            partition,
            costs,
            labels: None,
            domain: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_players() {
            return Err(Error::InvalidGame("one label per player is required".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Restrict evaluation to a box; points outside are rejected.
    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Result<Self> {
        if domain.len() != self.dim() || domain.iter().any(|(lo, hi)| !(lo <= hi)) {
            return Err(Error::InvalidGame("domain must give lo <= hi per coordinate".into()));
        }
        self.domain = Some(domain);
        Ok(self)
    }

    pub fn n_players(&self) -> usize {
        self.partition.n_players()
    }

    pub fn dims(&self) -> &[usize] {
        self.partition.dims()
    }

    /// Joint dimension `m`.
    pub fn dim(&self) -> usize {
        self.partition.total()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn block(&self, i: usize) -> Range<usize> {
        self.partition.block(i)
    }

    pub fn cost(&self, i: usize) -> &Cost {
        &self.costs[i]
    }

    pub fn costs(&self) -> &[Cost] {
        &self.costs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
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

    pub fn check_point(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            });
        }
        if let Some(k) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinitePoint(k));
        }
        if let Some(domain) = &self.domain {
            if let Some(k) = u
                .iter()
                .zip(domain)
                .position(|(x, (lo, hi))| x < lo || x > hi)
            {
                return Err(Error::OutsideDomain(k));
            }
        }
        Ok(())
    }

    /// `f_i(u)`.
    pub fn eval_cost(&self, i: usize, u: &[f64]) -> Result<f64> {
        self.check_player(i)?;
        self.check_point(u)?;
        let v = self.costs[i].value(u);
        if !v.is_finite() {
            return Err(Error::NonFiniteCost {
                player: i,
                point: u.to_vec(),
            });
        }
        Ok(v)
    }

    /// The game with costs `f_i + s * zeta_i`.
    pub fn perturbed(&self, zeta: &[Cost], s: f64) -> Result<GameDefinition> {
        if zeta.len() != self.n_players() {
            return Err(Error::InvalidGame(format!(
                "{} perturbations given for {} players",
                zeta.len(),
                self.n_players()
            )));
        }
        let costs = self
            .costs
            .iter()
            .zip(zeta)
            .map(|(f, z)| f.perturbed_by(z, s))
            .collect();
        let mut g = GameDefinition::new(self.dims().to_vec(), costs)?;
        g.labels = self.labels.clone();
        g.domain = self.domain.clone();
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_blocks_cover_the_joint_vector() {
        let p = Partition::new(vec![2, 1, 3]).unwrap();
        assert_eq!(p.total(), 6);
        assert_eq!(p.block(1), 2..3);
        assert_eq!(p.block(2), 3..6);
        assert_eq!((0..6).map(|k| p.owner(k)).collect::<Vec<_>>(), [0, 0, 1, 2, 2, 2]);
        let sum: usize = (0..3).map(|i| p.block(i).len()).sum();
        assert_eq!(sum, p.total());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![1, 0]).is_err());
        let c = Cost::Polynomial(Polynomial::zero(2));
        assert!(GameDefinition::new(vec![1, 1], vec![c.clone()]).is_err());
        assert!(GameDefinition::new(vec![1, 2], vec![c.clone(), c]).is_err());
    }

    #[test]
    fn eval_cost_checks_inputs() {
        let g = Builtin::BettySue.game();
        assert!(matches!(
            g.eval_cost(2, &[0.0, 0.0]),
            Err(Error::PlayerOutOfRange { .. })
        ));
        assert!(matches!(
            g.eval_cost(0, &[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            g.eval_cost(0, &[f64::NAN, 0.0]),
            Err(Error::NonFinitePoint(0))
        ));
        let g = g.with_domain(vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        assert!(matches!(g.eval_cost(0, &[0.0, 2.0]), Err(Error::OutsideDomain(1))));
    }

    #[test]
    fn non_finite_cost_is_reported_with_point() {
        let g = GameDefinition::new(vec![1], vec![Cost::from_fn(|u| 1.0 / u[0])]).unwrap();
        match g.eval_cost(0, &[0.0]) {
            Err(Error::NonFiniteCost { player, point }) => {
                assert_eq!(player, 0);
                assert_eq!(point, vec![0.0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn joint_strategy_rejects_non_finite() {
        assert!(JointStrategy::new(vec![1.0, f64::INFINITY]).is_err());
        assert_eq!(&*JointStrategy::new(vec![1.0, 2.0]).unwrap(), &[1.0, 2.0]);
    }
}
