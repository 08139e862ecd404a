use migrasim_core::dynamics::{
    intention_spread, predict_consensus, rhs, DynamicsParams, IntentionState, Rk4,
};
use migrasim_core::graph::{has_spanning_tree, laplacian, random_graph, SocialGraph};
use migrasim_core::rng::seeded;
use migrasim_core::spectrum::DEFAULT_ZERO_TOL;
use migrasim_oracles::{lti_solution, system_matrix};
use proptest::prelude::*;
use rand::Rng;

fn integrate(
    g: &SocialGraph,
    p: &DynamicsParams,
    x0: &[f64],
    v: f64,
    dt: f64,
    steps: usize,
) -> Vec<f64> {
    let mut s = IntentionState::new(x0.to_vec());
    let mut rk = Rk4::with_bound(x0.len(), f64::INFINITY);
    for _ in 0..steps {
        rk.step(&mut s, g, p, v, dt).unwrap();
    }
    s.x
}

fn exact(g: &SocialGraph, p: &DynamicsParams, x0: &[f64], v: f64, t: f64) -> Vec<f64> {
    let n = g.order();
    let a = system_matrix(n, laplacian(g).as_slice(), p.a, p.f);
    let c = vec![p.input_gain * v; n];
    lti_solution(n, &a, &c, x0, t)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0..5.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rhs_is_affine(seed in any::<u64>(), x in vec_strategy(8), y in vec_strategy(8),
                     c in -3.0..3.0f64, v in -1.0..1.0f64) {
        let g = random_graph(8, 0.1, 0.03, &mut seeded(seed)).unwrap();
        let p = DynamicsParams { a: 0.01, f: 0.5, input_gain: 0.2 };
        let free = DynamicsParams { input_gain: 0.0, ..p };
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + c * b).collect();
        let lhs = rhs(&IntentionState::new(combo), &g, &free, 0.0);
        let fx = rhs(&IntentionState::new(x.clone()), &g, &free, 0.0);
        let fy = rhs(&IntentionState::new(y), &g, &free, 0.0);
        for i in 0..8 {
            prop_assert!((lhs[i] - (fx[i] + c * fy[i])).abs() < 1e-12);
        }
        let forced = rhs(&IntentionState::new(x), &g, &p, v);
        for i in 0..8 {
            prop_assert!((forced[i] - fx[i] - p.input_gain * v).abs() < 1e-12);
        }
    }

    #[test]
    fn input_does_not_change_relative_states(seed in any::<u64>(), x0 in vec_strategy(10),
                                             v in -2.0..2.0f64) {
        let g = random_graph(10, 0.1, 0.05, &mut seeded(seed)).unwrap();
        let p = DynamicsParams { a: 0.002, f: 0.5, input_gain: 0.3 };
        let with = integrate(&g, &p, &x0, v, 0.25, 40);
        let without = integrate(&g, &p, &x0, 0.0, 0.25, 40);
        let d0 = with[0] - without[0];
        for i in 1..10 {
            prop_assert!(((with[i] - without[i]) - d0).abs() < 1e-10);
        }
    }
}

#[test]
fn consensus_subspace_is_invariant() {
    // Uniform initial intentions stay uniform when a = 0 and the input is constant.
    let g = random_graph(12, 0.1, 0.02, &mut seeded(3)).unwrap();
    let p = DynamicsParams { a: 0.0, f: 1.0, input_gain: 0.05 };
    let x = integrate(&g, &p, &[0.7; 12], 0.4, 0.25, 200);
    assert!(intention_spread(&x) < 1e-12);
    let expected = 0.7 + 0.05 * 0.4 * 50.0;
    assert!((x[0] - expected).abs() < 1e-10);
}

#[test]
fn rk4_matches_matrix_exponential() {
    for seed in 0..10u64 {
        let mut rng = seeded(1000 + seed);
        let n = 10;
        let g = random_graph(n, 0.1, 0.03, &mut rng).unwrap();
        let p = DynamicsParams { a: 0.0008, f: 0.001 * 10.0, input_gain: 0.02 };
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = 0.15;
        let days = 30.0;
        let got = integrate(&g, &p, &x0, v, 0.25, 120);
        let want = exact(&g, &p, &x0, v, days);
        let err = max_abs_diff(&got, &want);
        assert!(err < 1e-6, "seed {seed}: max error {err}");
    }
}

#[test]
fn rk4_is_fourth_order() {
    let mut rng = seeded(77);
    let n = 6;
    let g = random_graph(n, 0.3, 0.06, &mut rng).unwrap();
    let p = DynamicsParams { a: 0.05, f: 1.0, input_gain: 0.5 };
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t = 4.0;
    let want = exact(&g, &p, &x0, 0.3, t);
    let err = |steps: usize| max_abs_diff(&integrate(&g, &p, &x0, 0.3, t / steps as f64, steps), &want);
    let (coarse, fine) = (err(16), err(32));
    let ratio = coarse / fine;
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio} ({coarse} / {fine})");
}

#[test]
fn pair_example_decays_to_mean() {
    let g = SocialGraph::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
    let p = DynamicsParams { a: 0.0, f: 1.0, input_gain: 0.0 };
    let x = integrate(&g, &p, &[1.0, -1.0], 0.0, 0.01, 100);
    let want = (-2.0f64).exp();
    assert!((x[0] - want).abs() < 1e-9 && (x[1] + want).abs() < 1e-9);
}

#[test]
fn verdict_tracks_spread_on_random_graphs() {
    let mut checked = 0;
    for seed in 0..60u64 {
        let mut rng = seeded(5000 + seed);
        let n = 6;
        let g = random_graph(n, 0.5, 0.1, &mut rng).unwrap();
        let f = rng.gen_range(0.3..1.0);
        let a = rng.gen_range(0.001..0.01);
        let p = DynamicsParams { a, f, input_gain: 0.1 };
        let verdict = predict_consensus(&g, &p, DEFAULT_ZERO_TOL).unwrap();
        if let Some(l2) = verdict.lambda2_re {
            if (a - f * l2).abs() < 0.05 * f {
                continue;
            }
        }
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = integrate(&g, &p, &x0, 0.2, 0.25, 8000);
        let ratio = intention_spread(&x) / intention_spread(&x0);
        if verdict.consensus_predicted {
            assert!(ratio < 1e-6, "seed {seed}: predicted consensus, ratio {ratio}");
        } else {
            assert!(ratio > 1e-6, "seed {seed}: predicted no consensus, ratio {ratio}");
        }
        assert_eq!(verdict.has_spanning_tree, has_spanning_tree(&g));
        checked += 1;
    }
    assert!(checked >= 30);
}

#[test]
fn divergence_is_reported() {
    let g = SocialGraph::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
    let p = DynamicsParams { a: 5.0, f: 0.0, input_gain: 0.0 };
    let mut s = IntentionState::new(vec![1.0, 1.0]);
    let mut rk = Rk4::with_bound(2, 1e3);
    let mut hit = false;
    for _ in 0..100 {
        if rk.step(&mut s, &g, &p, 0.0, 0.25).is_err() {
            hit = true;
            break;
        }
    }
    assert!(hit);
}
