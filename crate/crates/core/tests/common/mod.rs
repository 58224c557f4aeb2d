#![allow(dead_code)]

use local_nash::game::{Builtin, Polynomial};
use local_nash::olg::{Dynamics, OpenLoopGame, TerminalCost};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Sup-norm relative error `|a - b|_inf / max(|a|_inf, |b|_inf)`.
pub fn sup_rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = a.iter().chain(b).map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Every builtin family at a few parameter values.
pub fn builtin_games() -> Vec<Builtin> {
    vec![
        Builtin::BettySue,
        Builtin::BettySueAsym { a: 0.5 },
        Builtin::BettySueAsym { a: 2.0 },
        Builtin::BettySueAsym { a: -1.0 },
        Builtin::BettySuePerturbed { eps: 0.1 },
        Builtin::BettySuePerturbed { eps: -0.01 },
        Builtin::IncentiveGame { a: 1.0, tau: 20.0 },
        Builtin::IncentiveGame { a: -0.5, tau: 20.0 },
        Builtin::IncentiveGame { a: 0.0, tau: 20.0 },
    ]
}

/// Known critical points of a builtin, if any.
pub fn equilibria(b: &Builtin, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    match *b {
        Builtin::BettySue => {
            let q = rng.gen_range(-10.0..10.0);
            vec![[q, q]]
        }
        Builtin::BettySueAsym { a } if a != 1.0 => vec![[0.0, 0.0]],
        Builtin::BettySueAsym { .. } => {
            let q = rng.gen_range(-10.0..10.0);
            vec![[q, q]]
        }
        Builtin::BettySuePerturbed { .. } => vec![],
        Builtin::IncentiveGame { a, tau } if a != 0.0 => vec![[tau, tau]],
        Builtin::IncentiveGame { .. } => {
            let q = rng.gen_range(-10.0..10.0);
            vec![[q, q]]
        }
    }
}

pub fn uniform(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(lo..hi)).collect()
}

/// A mildly nonlinear two-player game on a 2-dimensional state:
/// `x_j' = -x_j + (random quadratic in x, u)`, quadratic terminal costs.
pub fn random_polynomial_olg(seed: u64, steps: usize) -> OpenLoopGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nz = 4; // [x1, x2, u1, u2]
    let mut exponents = Vec::new();
    for a in 0..nz {
        let mut e = vec![0u32; nz];
        e[a] = 1;
        exponents.push(e.clone());
        for b in a..nz {
            let mut e2 = e.clone();
            e2[b] += 1;
            exponents.push(e2);
        }
    }
    let comps = (0..2)
        .map(|j| {
            let mut terms: Vec<(f64, Vec<u32>)> = exponents
                .iter()
                .map(|e| (rng.gen_range(-0.3..0.3), e.clone()))
                .collect();
            let mut damp = vec![0u32; nz];
            damp[j] = 1;
            terms.push((-1.0, damp));
            Polynomial::from_terms(nz, terms).unwrap()
        })
        .collect();
    let costs = (0..2)
        .map(|_| {
            let l = DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0));
            let q = &l * l.transpose() + DMatrix::identity(2, 2) * 0.5;
            let q = (&q + q.transpose()) * 0.5;
            TerminalCost::Quadratic {
                q,
                target: DVector::from_vec(uniform(&mut rng, 2, -1.0, 1.0)),
            }
        })
        .collect();
    let x0 = uniform(&mut rng, 2, -0.5, 0.5);
    OpenLoopGame::new(x0, 1.0, steps, Dynamics::Polynomial(comps), vec![1, 1], costs).unwrap()
}
