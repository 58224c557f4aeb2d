mod common;

use common::close;
use local_nash::game::{Builtin, Cost, GameDefinition, Polynomial, QuadraticCost, QuadraticGame};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn symmetric(m: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-3.0..3.0f64, m * m).prop_map(move |v| {
        let a = DMatrix::from_vec(m, m, v);
        (&a + a.transpose()) * 0.5
    })
}

fn quadratic_and_points() -> impl Strategy<Value = (QuadraticCost, Vec<Vec<f64>>)> {
    (1usize..5).prop_flat_map(|m| {
        (
            symmetric(m),
            prop::collection::vec(-3.0..3.0f64, m),
            -5.0..5.0f64,
            prop::collection::vec(prop::collection::vec(-10.0..10.0f64, m), 100),
        )
            .prop_map(|(a, b, c, pts)| (QuadraticCost::new(a, DVector::from_vec(b), c).unwrap(), pts))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quadratic_and_polynomial_forms_agree((q, points) in quadratic_and_points()) {
        let p = Polynomial::from_quadratic(&q);
        for u in &points {
            prop_assert!(close(q.eval(u.as_slice()), p.value(u), 1e-12));
            let (gq, gp) = (q.gradient(u), p.gradient(u));
            for (a, b) in gq.iter().zip(&gp) {
                prop_assert!(close(*a, *b, 1e-12));
            }
        }
    }

    #[test]
    fn builtin_costs_are_pure(u1 in -50.0..50.0f64, u2 in -50.0..50.0f64) {
        for b in common::builtin_games() {
            let g = b.game();
            for i in 0..2 {
                let first = g.eval_cost(i, &[u1, u2]).unwrap();
                prop_assert_eq!(first.to_bits(), g.eval_cost(i, &[u1, u2]).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn partition_is_consistent(dims in prop::collection::vec(1usize..4, 1..5)) {
        let m: usize = dims.iter().sum();
        let costs = vec![Cost::Polynomial(Polynomial::zero(m)); dims.len()];
        let g = GameDefinition::new(dims.clone(), costs).unwrap();
        prop_assert_eq!(g.dim(), m);
        let mut next = 0;
        for i in 0..dims.len() {
            let r = g.block(i);
            prop_assert_eq!(r.start, next);
            prop_assert_eq!(r.len(), dims[i]);
            next = r.end;
        }
        prop_assert_eq!(next, m);
        let w = local_nash::game_form(&g, &vec![0.5; m], local_nash::DerivMethod::Analytic).unwrap();
        prop_assert_eq!(w.stacked().len(), m);
    }
}

#[test]
fn builtin_quadratic_forms_match_polynomial_forms() {
    for b in common::builtin_games() {
        let poly = b.game();
        let quad = b.quadratic_game().to_game().unwrap();
        for u in [[0.0, 0.0], [3.0, -7.5], [20.0, 20.0], [-1e3, 2.5e2]] {
            for i in 0..2 {
                let (a, c) = (poly.eval_cost(i, &u).unwrap(), quad.eval_cost(i, &u).unwrap());
                assert!(close(a, c, 1e-12), "{} player {i} at {u:?}: {a} vs {c}", b.name());
            }
        }
    }
}

#[test]
fn quadratic_game_helpers_agree_with_costs() {
    let q = Builtin::IncentiveGame { a: 1.0, tau: 20.0 }.quadratic_game();
    let j = q.jacobian();
    assert_eq!(j, nalgebra::dmatrix![2.0, -1.0; -1.0, 2.0]);
    let g = QuadraticGame::new(q.dims.clone(), q.players.clone()).unwrap();
    assert_eq!(g.game_form(&[20.0, 20.0]).as_slice(), &[0.0, 0.0]);
}
