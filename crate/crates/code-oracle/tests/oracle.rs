//! Exact enumeration against closed forms, sampling and the type bound.

use classic_bounds::e_sp;
use code_oracle::*;
use numeric_kernels::OptimizerConfig;
use prob_core::{ChannelKernel, DecodingMetric, ProbVec};
use proptest::prelude::*;

fn repetition(n: usize) -> Codebook {
    Codebook::new(vec![vec![0; n], vec![1; n]], 2).unwrap()
}

fn std_error(r: &PeResult) -> f64 {
    match r.method {
        Method::MonteCarlo { std_error, .. } => std_error,
        Method::Exact => panic!("expected a sampled estimate"),
    }
}

#[test]
fn sampled_repetition_code_within_three_sigma() {
    let w = ChannelKernel::bsc(0.1).unwrap();
    let q = DecodingMetric::ml(&w);
    let exact = exact_pe(&repetition(9), &w, &q).unwrap().pe;
    let mc = monte_carlo_pe(&repetition(9), &w, &q, 1_000_000, 2024).unwrap();
    assert!((mc.pe - exact).abs() <= 3.0 * std_error(&mc), "{} vs {exact}", mc.pe);
}

#[test]
fn batch_means_within_four_sigma() {
    let w = ChannelKernel::bsc(0.2).unwrap();
    let q = DecodingMetric::ml(&w);
    let cb = Codebook::new(vec![vec![0, 0, 1, 1, 0, 1], vec![1, 0, 1, 0, 0, 1], vec![0, 1, 0, 1, 1, 1]], 2).unwrap();
    let exact = exact_pe(&cb, &w, &q).unwrap().pe;
    let runs: Vec<PeResult> = (0..30).map(|s| monte_carlo_pe(&cb, &w, &q, 20_000, 1000 + s).unwrap()).collect();
    let mean = runs.iter().map(|r| r.pe).sum::<f64>() / 30.0;
    let sigma = runs.iter().map(|r| std_error(r).powi(2)).sum::<f64>().sqrt() / 30.0;
    assert!((mean - exact).abs() <= 4.0 * sigma, "{mean} vs {exact} (σ {sigma})");
}

#[test]
fn exponent_drops_with_noisier_channel() {
    let cb = repetition(9);
    let at = |p: f64| {
        let w = ChannelKernel::bsc(p).unwrap();
        finite_exponent(&cb, &w, &DecodingMetric::ml(&w), &OracleConfig::default()).unwrap().exponent
    };
    assert!(at(0.2) < at(0.1));
}

#[test]
fn constant_composition_anchors_respect_sphere_packing() {
    let (n, m) = (10, 4);
    let p = ProbVec::uniform(2);
    let w = ChannelKernel::bsc(0.1).unwrap();
    let q = DecodingMetric::ml(&w);
    let best = (0..200)
        .map(|seed| {
            let cb = random_cc_code(&p, n, m, seed).unwrap();
            exact_pe(&cb, &w, &q).unwrap().exponent
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let rate = (m as f64).ln() / n as f64;
    let slack = 4.0 * ((n + 1) as f64).ln() / n as f64;
    let sp = e_sp(rate, &p, &w, &OptimizerConfig::default()).unwrap().value;
    assert!(best <= sp + slack, "{best} > {sp} + {slack}");
}

fn code() -> impl Strategy<Value = (Codebook, usize)> {
    (2usize..=3, 2usize..=5, 2usize..=4).prop_flat_map(|(nx, n, m)| {
        prop::collection::vec(prop::collection::vec(0..nx, n), m).prop_map(move |w| (Codebook::new(w, nx).unwrap(), nx))
    })
}

fn kernel(rows: usize, cols: usize) -> impl Strategy<Value = ChannelKernel> {
    prop::collection::vec(prop::collection::vec(0.05f64..1.0, cols), rows).prop_map(|rows| {
        ChannelKernel::new(rows.into_iter().map(|r| {
            let t: f64 = r.iter().sum();
            r.into_iter().map(|v| v / t).collect()
        }).collect())
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_metric_changes_leave_decisions_alone(
        (cb, nx) in code(),
        raw in prop::collection::vec(-3.0f64..3.0, 9),
        scale in 0.1f64..5.0,
        offsets in prop::collection::vec(-4.0f64..4.0, 3),
        ws in prop::collection::vec(prop::collection::vec(0.05f64..1.0, 3), 3),
    ) {
        let w = ChannelKernel::new(ws[..nx].iter().map(|r| { let t: f64 = r.iter().sum(); r.iter().map(|v| v / t).collect() }).collect()).unwrap();
        let rows: Vec<Vec<f64>> = raw.chunks(3).take(nx).map(<[f64]>::to_vec).collect();
        let shifted: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().zip(&offsets).map(|(v, c)| scale * v + c).collect()).collect();
        let a = exact_pe(&cb, &w, &DecodingMetric::new(rows).unwrap()).unwrap();
        let b = exact_pe(&cb, &w, &DecodingMetric::new(shifted).unwrap()).unwrap();
        prop_assert_eq!(a.pe.to_bits(), b.pe.to_bits());
    }

    #[test]
    fn ml_is_never_beaten(
        words in prop::collection::vec(prop::collection::vec(0usize..2, 4), 2..=4),
        w in kernel(2, 2),
        raw in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let cb = Codebook::new(words, 2).unwrap();
        let ml = exact_pe(&cb, &w, &DecodingMetric::ml(&w)).unwrap().pe;
        let other = exact_pe(&cb, &w, &DecodingMetric::new(raw.chunks(2).map(<[f64]>::to_vec).collect()).unwrap()).unwrap().pe;
        prop_assert!(ml <= other + 1e-12, "{} > {}", ml, other);
    }
}
