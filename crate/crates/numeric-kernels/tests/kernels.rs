//! Oracle and property checks for the optimization kernels.

use numeric_kernels::*;
use prob_core::{binary_entropy, binary_kl, kl_slices, mutual_information_slices};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LN2: f64 = std::f64::consts::LN_2;

fn conditional_divergence(kernel: &[f64], target: &[f64], p: &[f64], cols: usize) -> f64 {
    kernel
        .chunks(cols)
        .zip(target.chunks(cols))
        .zip(p)
        .map(|((k, t), &px)| px * kl_slices(k, t))
        .sum()
}

fn info_of_kernel(kernel: &[f64], p: &[f64], cols: usize) -> f64 {
    mutual_information_slices(&joint_from_kernel(p, kernel, cols), p.len(), cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concave_search_beats_dense_grid(
        a in 0.01f64..5.0,
        c in -2.0f64..12.0,
        b in -3.0f64..3.0,
        w in 0.01f64..0.99,
        kappa in 0.1f64..4.0,
        pick in 0usize..2,
    ) {
        let cap = 10.0;
        let tol = 1e-9;
        let f = |s: f64| match pick {
            0 => b - a * (s - c) * (s - c),
            _ => -(w * (-kappa * s).exp() + (1.0 - w) * (kappa * s).exp()).ln(),
        };
        let r = maximize_concave_1d(f, 0.0, cap, tol).unwrap();
        let grid_max = (0..=10_000).map(|i| f(cap * i as f64 / 10_000.0)).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(grid_max <= r.value + tol, "grid {} > search {}", grid_max, r.value);
    }
}

#[test]
fn simplex_min_below_random_feasible_points() {
    let p = [0.35, 0.65];
    let target = [0.7, 0.2, 0.1, 0.15, 0.25, 0.6];
    let tilt = [0.3, -0.2, 0.5, 0.0, 0.4, -0.1];
    let objective = |k: &[f64]| {
        conditional_divergence(k, &target, &p, 3) + k.iter().zip(&tilt).map(|(a, b)| a * b).sum::<f64>()
    };
    let cfg = OptimizerConfig::default();
    let best = min_over_conditional_simplex(objective, 2, 3, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let mut k = Vec::with_capacity(6);
        for _ in 0..2 {
            let e: Vec<f64> = (0..3).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let s: f64 = e.iter().sum();
            k.extend(e.iter().map(|v| v / s));
        }
        assert!(best.value <= objective(&k) + 1e-12);
    }
}

#[test]
fn penalized_sphere_packing_matches_fine_grid() {
    let p = [0.5, 0.5];
    let w = [0.9, 0.1, 0.1, 0.9];
    let rate = 0.2 * LN2;
    let objective = |k: &[f64]| {
        conditional_divergence(k, &w, &p, 2) + 100.0 * (info_of_kernel(k, &p, 2) - rate).max(0.0)
    };
    let found = min_over_conditional_simplex(objective, 2, 2, &OptimizerConfig::default()).unwrap();
    // Fine grid with step 1e-3 over (V(1|0), V(0|1)) and a hard constraint.
    let mut oracle = f64::INFINITY;
    for i in 0..=1000 {
        for j in 0..=1000 {
            let (a, b) = (i as f64 * 1e-3, j as f64 * 1e-3);
            let k = [1.0 - a, a, b, 1.0 - b];
            if info_of_kernel(&k, &p, 2) <= rate {
                oracle = oracle.min(conditional_divergence(&k, &w, &p, 2));
            }
        }
    }
    assert!((found.value - oracle).abs() <= 1e-3, "search {} vs grid {}", found.value, oracle);
}

#[test]
fn information_budget_matches_symmetric_scan() {
    // A symmetric target makes the optimum symmetric, so a 1-D scan over
    // crossover probabilities γ is an exact oracle.
    let p_target = 0.14;
    let w = [1.0 - p_target, p_target, p_target, 1.0 - p_target];
    let p = prob_core::ProbVec::uniform(2);
    let budget = 0.1 * LN2;
    let objective = |joint: &[f64]| {
        let k: Vec<f64> = joint.iter().map(|v| v / 0.5).collect();
        conditional_divergence(&k, &w, p.as_slice(), 2)
    };
    let found = info_constrained_min(objective, &p, 2, budget, &OptimizerConfig::default()).unwrap();
    let oracle = (0..=200_000)
        .map(|i| 0.5 * i as f64 / 200_000.0)
        .filter(|&g| LN2 - binary_entropy(g).unwrap() <= budget)
        .map(|g| binary_kl(g, p_target))
        .fold(f64::INFINITY, f64::min);
    assert!((found.value - oracle).abs() <= 1e-3, "search {} vs scan {}", found.value, oracle);
    assert!(found.mutual_information <= budget + 1e-9);
}

#[test]
fn zero_budget_and_inactive_budget() {
    let w = [0.8, 0.2, 0.3, 0.7];
    let p = prob_core::ProbVec::new(vec![0.4, 0.6]).unwrap();
    let objective = |joint: &[f64]| {
        let k: Vec<f64> = joint.chunks(2).zip(p.iter()).flat_map(|(r, &px)| r.iter().map(move |v| v / px)).collect();
        conditional_divergence(&k, &w, p.as_slice(), 2)
    };
    let cfg = OptimizerConfig::default();
    let free = info_constrained_min(objective, &p, 2, 2f64.ln(), &cfg).unwrap();
    assert!(free.value < 1e-9);
    let tight = info_constrained_min(objective, &p, 2, 0.0, &cfg).unwrap();
    assert!(tight.mutual_information < 1e-12);
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(job)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = OptimizerConfig { restarts: 6, ..Default::default() };
    let aux_objective = |a: &AuxiliaryDecomposition| {
        (0..a.aux()).map(|u| a.get(0, 0, u) * a.get(1, 1, u) * (1.0 + 0.3 * u as f64) - 0.2 * a.get(0, 1, u).powi(2)).sum::<f64>()
    };
    let simplex_objective = |k: &[f64]| conditional_divergence(k, &[0.6, 0.3, 0.1, 0.2, 0.2, 0.6], &[0.5, 0.5], 3) - 0.3 * k[1];
    let run = || {
        let a = maximize_over_aux(aux_objective, 2, 2, &cfg).unwrap();
        let s = min_over_conditional_simplex(simplex_objective, 2, 3, &cfg).unwrap();
        (a.value.to_bits(), a.argmax.kernel().to_vec(), s.value.to_bits(), s.point)
    };
    let single = in_pool(1, run);
    let several = in_pool(4, run);
    assert_eq!(single, several);
}

#[test]
fn restart_prefixes_are_monotone() {
    let objective = |a: &AuxiliaryDecomposition| {
        let mut v = 0.0;
        for u in 0..a.aux() {
            v += (a.get(0, 0, u) - a.get(1, 0, u)).abs() * (1.0 + 0.05 * u as f64);
        }
        v
    };
    let values: Vec<f64> = (1..=6)
        .map(|restarts| {
            let cfg = OptimizerConfig { restarts, tol_simplex: 1e-5, ..Default::default() };
            maximize_over_aux(objective, 2, 1, &cfg).unwrap().value
        })
        .collect();
    assert!(values.windows(2).all(|w| w[1] >= w[0]), "{values:?}");
}

#[test]
fn tilt_sup_matches_scan_oracle() {
    let mut t = TiltProblem::new();
    t.push(0.25, &[0.9, 0.1], &[(0.1f64 / 0.9).ln(), (0.9f64 / 0.1).ln()]);
    t.push(0.25, &[0.1, 0.9], &[(0.9f64 / 0.1).ln(), (0.1f64 / 0.9).ln()]);
    let r = t.sup(1e4, 1e-9).unwrap();
    let scan = (0..=100_000).map(|i| t.value(i as f64 * 1e-5)).fold(f64::NEG_INFINITY, f64::max);
    assert!((r.value - scan).abs() <= 1e-9);
    assert!((r.value - 0.255_413).abs() <= 1e-6);
}
