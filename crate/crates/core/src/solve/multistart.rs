use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::newton::{newton_solve, NewtonOptions};
use super::sampling::{halton_box, MAX_DIM};
use crate::classify::EquilibriumReport;
use crate::error::{Error, Result};
use crate::game::{GameDefinition, JointStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiStartOptions {
    pub k: usize,
    pub seed: u64,
    pub dedup_radius: f64,
    pub newton: NewtonOptions,
}

impl Default for MultiStartOptions {
    fn default() -> Self {
        Self {
            k: 64,
            seed: 0,
            dedup_radius: 1e-6,
            newton: NewtonOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub point: JointStrategy,
    pub report: EquilibriumReport,
    /// Number of starts that converged to this root.
    pub hits: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureTally {
    pub converged: usize,
    pub singular_jacobian: usize,
    pub max_iters: usize,
    pub non_finite: usize,
    pub other: usize,
}

impl FailureTally {
    pub fn failures(&self) -> usize {
        self.singular_jacobian + self.max_iters + self.non_finite + self.other
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStartResult {
    pub roots: Vec<Root>,
    pub tally: FailureTally,
}

/// Newton from `k` low-discrepancy starts in `bounds`.
///
/// Starts run in parallel; results are collected in start order, merged
/// when closer than `dedup_radius`, then sorted by residual and
/// lexicographically by coordinates, so output never depends on scheduling.
pub fn multi_start(game: &GameDefinition, bounds: &[(f64, f64)], opts: &MultiStartOptions) -> Result<MultiStartResult> {
    if bounds.len() != game.dim() {
        return Err(Error::DimensionMismatch {
            expected: game.dim(),
            got: bounds.len(),
        });
    }
    if bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        return Err(Error::InvalidOption("box must be finite with lo <= hi".into()));
    }
    if bounds.len() > MAX_DIM {
        return Err(Error::InvalidOption(format!("multi-start supports at most {MAX_DIM} dimensions")));
    }
    if opts.k == 0 {
        return Err(Error::InvalidOption("k must be at least 1".into()));
    }
    opts.newton.validate()?;

    let starts = halton_box(bounds, opts.k, opts.seed);
    let outcomes: Vec<_> = starts
        .par_iter()
        .map(|u0| newton_solve(game, u0, &opts.newton))
        .collect();

    let mut tally = FailureTally::default();
    let mut roots: Vec<Root> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(sol) => {
                tally.converged += 1;
                let dup = roots.iter_mut().find(|r| distance(&r.point, &sol.point) < opts.dedup_radius);
                match dup {
                    Some(r) => r.hits += 1,
                    None => roots.push(Root {
                        point: sol.point,
                        report: sol.report,
                        hits: 1,
                    }),
                }
            }
            Err(Error::SingularJacobian { .. }) => tally.singular_jacobian += 1,
            Err(Error::MaxIters { .. }) => tally.max_iters += 1,
            Err(Error::NonFinite { .. }) | Err(Error::NonFiniteCost { .. }) | Err(Error::NonFiniteDerivative { .. }) => {
                tally.non_finite += 1
            }
            Err(_) => tally.other += 1,
        }
    }
    roots.sort_by(|a, b| {
        a.report
            .omega_norm
            .total_cmp(&b.report.omega_norm)
            .then_with(|| lexicographic(&a.point, &b.point))
    });
    Ok(MultiStartResult { roots, tally })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}
