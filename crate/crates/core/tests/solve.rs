mod common;

use common::{dist, uniform};
use local_nash::game::{Builtin, Cost, GameDefinition, Polynomial};
use local_nash::solve::{
    continue_path, gradient_play, newton_solve, ContinuationOptions, FlowOptions, NewtonOptions, StepControl,
};
use local_nash::{classify_point, game_form, game_jacobian, DerivMethod, FlowStability, Tolerances};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Incentive game (a = 1, tau = 20) plus `0.01 u_i^3` in each cost.
fn cubic_incentive() -> GameDefinition {
    let base = Builtin::IncentiveGame { a: 1.0, tau: 20.0 }.game();
    let costs = (0..2)
        .map(|i| {
            let mut e = vec![0, 0];
            e[i] = 3;
            let Cost::Polynomial(p) = base.cost(i) else { unreachable!() };
            Cost::Polynomial(p.plus(&Polynomial::from_terms(2, [(0.01, e)]).unwrap()).unwrap())
        })
        .collect();
    GameDefinition::new(vec![1, 1], costs).unwrap()
}

fn own_linear() -> Vec<Cost> {
    (0..2).map(|k| Cost::Polynomial(Polynomial::coordinate(2, k))).collect()
}

fn equilibrium() -> Vec<f64> {
    // symmetric root of u - 20 + 0.03 u^2 = 0
    let u = (-1.0 + (1.0f64 + 2.4).sqrt()) / 0.06;
    vec![u, u]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn newton_converges_quadratically(angle in 0.0..std::f64::consts::TAU) {
        let g = cubic_incentive();
        let e = equilibrium();
        let u0 = [e[0] + 0.1 * angle.cos(), e[1] + 0.1 * angle.sin()];
        let sol = newton_solve(&g, &u0, &NewtonOptions::default()).unwrap();
        prop_assert!(dist(&sol.point, &e) < 1e-9);
        for w in sol.residuals.windows(2) {
            if w[0] < 1e-2 {
                // 1e-13 is the rounding floor of the residual near |u| = 14
                prop_assert!(w[1] <= (10.0 * w[0] * w[0]).max(1e-13), "{:?}", sol.residuals);
            }
        }
    }
}

#[test]
fn recorded_velocity_matches_the_vector_field() {
    for b in [Builtin::BettySueAsym { a: 0.5 }, Builtin::IncentiveGame { a: 1.0, tau: 20.0 }] {
        let g = b.game();
        let err = |dt: f64| {
            let opts = FlowOptions {
                step: StepControl::Rk4 { dt },
                t_max: 2.0,
                ..Default::default()
            };
            let tr = gradient_play(&g, &[3.0, -4.0], &opts).unwrap();
            let mut worst = 0.0f64;
            for k in 1..tr.points.len() - 1 {
                let w = game_form(&g, &tr.points[k], DerivMethod::Analytic).unwrap();
                for c in 0..2 {
                    let v = (tr.points[k + 1][c] - tr.points[k - 1][c]) / (2.0 * dt);
                    worst = worst.max((v + w.stacked()[c]).abs());
                }
            }
            worst
        };
        let (coarse, fine) = (err(0.02), err(0.01));
        assert!(coarse < 1e-2, "{coarse}");
        let ratio = coarse / fine;
        assert!((3.5..4.5).contains(&ratio), "{} ratio {ratio}", b.name());
    }
}

#[test]
fn stable_equilibria_attract() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let cases: [(Builtin, [f64; 2]); 4] = [
        (Builtin::IncentiveGame { a: 1.0, tau: 20.0 }, [20.0, 20.0]),
        (Builtin::BettySueAsym { a: 0.5 }, [0.0, 0.0]),
        (Builtin::BettySueAsym { a: -1.0 }, [0.0, 0.0]),
        (Builtin::IncentiveGame { a: 0.3, tau: -2.0 }, [-2.0, -2.0]),
    ];
    for (b, e) in cases {
        let g = b.game();
        let report = classify_point(&g, &e, &Tolerances::default(), DerivMethod::Analytic).unwrap();
        assert!(matches!(
            report.verdict,
            local_nash::Classification::DifferentialNash {
                flow_stable: FlowStability::Stable,
                ..
            }
        ));
        for _ in 0..10 {
            let dir = uniform(&mut rng, 2, -1.0, 1.0);
            let r = 0.05 * rng.gen_range(0.0..1.0f64) / dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let u0: Vec<f64> = e.iter().zip(&dir).map(|(x, d)| x + r * d).collect();
            let opts = FlowOptions { t_max: 100.0, ..Default::default() };
            let tr = gradient_play(&g, &u0, &opts).unwrap();
            assert!(dist(tr.final_point(), &e) < 1e-6, "{} from {u0:?}", b.name());
        }
    }
}

#[test]
fn continuation_points_are_non_degenerate_equilibria() {
    let g = cubic_incentive();
    let opts = ContinuationOptions {
        s_range: (-1.0, 1.0),
        ds: 0.1,
        ..Default::default()
    };
    let path = continue_path(&g, &own_linear(), &equilibrium(), &opts).unwrap();
    assert_eq!(path.s_values.len(), 21);
    for (s, p) in path.s_values.iter().zip(&path.points) {
        let pert = g.perturbed(&own_linear(), *s).unwrap();
        let r = classify_point(&pert, p, &Tolerances::default(), DerivMethod::Analytic).unwrap();
        assert!(r.omega_norm <= 1e-10);
        assert!(r.verdict.is_non_degenerate_nash());
    }
}

#[test]
fn secants_approach_the_implicit_function_tangent() {
    let g = cubic_incentive();
    let zeta = own_linear();
    let s0 = 0.5;
    let point_at = |ds: f64, s: f64| {
        let opts = ContinuationOptions {
            s_range: (0.0, s),
            ds,
            ..Default::default()
        };
        let path = continue_path(&g, &zeta, &equilibrium(), &opts).unwrap();
        let k = path.s_values.iter().position(|v| (v - s).abs() < 1e-12).unwrap();
        path.points[k].clone()
    };
    let base = point_at(0.1, s0);
    let pert = g.perturbed(&zeta, s0).unwrap();
    let jac = game_jacobian(&pert, &base, DerivMethod::Analytic).unwrap().matrix;
    let zeta_game = GameDefinition::new(vec![1, 1], zeta.clone()).unwrap();
    let rhs = -DVector::from_vec(game_form(&zeta_game, &base, DerivMethod::Analytic).unwrap().into_stacked());
    let tangent = jac.lu().solve(&rhs).unwrap();
    let secant_err = |ds: f64| {
        let next = point_at(ds, s0 + ds);
        (0..2)
            .map(|c| ((next[c] - base[c]) / ds - tangent[c]).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (secant_err(0.1), secant_err(0.05));
    assert!(e1 > 0.0 && (1.7..2.3).contains(&(e1 / e2)), "{e1} {e2}");
}
