use prob_core::*;
use proptest::prelude::*;

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("zero mass", |v| {
        let t: f64 = v.iter().sum();
        (t > 1e-6).then(|| v.iter().map(|x| x / t).collect())
    })
}

fn kernel(rows: usize, cols: usize) -> impl Strategy<Value = ChannelKernel> {
    prop::collection::vec(simplex(cols), rows)
        .prop_filter_map("invalid", |r| ChannelKernel::new(r).ok())
}

/// Metric entries drawn from a small set including −∞ so that the extended
/// arithmetic is exercised.
fn metric(rows: usize, cols: usize) -> impl Strategy<Value = DecodingMetric> {
    let entry = prop_oneof![
        4 => -3.0f64..3.0,
        1 => Just(f64::NEG_INFINITY),
        1 => Just(0.0),
    ];
    prop::collection::vec(prop::collection::vec(entry, cols), rows)
        .prop_map(|r| DecodingMetric::new(r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, .. ProptestConfig::default() })]

    #[test]
    fn kl_nonnegative_and_zero_only_on_equality(p in simplex(4), r in simplex(4)) {
        let (p, r) = (ProbVec::normalized(p).unwrap(), ProbVec::normalized(r).unwrap());
        let d = kl_divergence(&p, &r).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let max_gap = p.iter().zip(r.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if max_gap > 1e-6 {
            prop_assert!(d > 0.0);
        }
    }

    #[test]
    fn mutual_information_bounds(rows in 1usize..4, cols in 1usize..4, seed in simplex(9)) {
        let w: Vec<f64> = seed.iter().take(rows * cols).copied().collect();
        prop_assume!(w.iter().sum::<f64>() > 1e-6);
        let j = JointDist::new(
            ProbVec::normalized(w).unwrap().into_inner(), vec![rows, cols]);
        prop_assume!(j.is_ok());
        let mi = mutual_information(&j.unwrap()).unwrap();
        prop_assert!(mi >= 0.0);
        prop_assert!(mi <= (rows.min(cols) as f64).ln() + 1e-12);
    }

    #[test]
    fn binary_entropy_symmetric(x in 0.0f64..=1.0) {
        let a = binary_entropy(x).unwrap();
        let b = binary_entropy(1.0 - x).unwrap();
        prop_assert!((a - b).abs() <= 1e-15);
    }

    #[test]
    fn balanced_implies_zero_error(w in kernel(3, 3), q in metric(3, 3)) {
        if is_balanced(&w, &q) {
            prop_assert!(zero_error_mismatch_is_zero(&w, &q));
        }
    }

    #[test]
    fn ml_metric_always_supports(w in kernel(3, 4)) {
        prop_assert!(metric_supports_channel(&w, &DecodingMetric::ml(&w)));
    }

    #[test]
    fn joint_marginals_are_valid(seed in simplex(12)) {
        let j = JointDist::new(seed, vec![2, 3, 2]).unwrap();
        for axis in 0..3 {
            let m = j.marginal(axis).unwrap();
            prop_assert!((m.iter().sum::<f64>() - 1.0).abs() <= PROB_TOL);
        }
    }
}

#[test]
fn ml_on_sparse_channel_zero_error_matches_confusability() {
    // Three inputs, outputs {0,1,2}; inputs 0 and 2 never share an output.
    let w = ChannelKernel::new(vec![
        vec![0.5, 0.5, 0.0],
        vec![0.0, 0.5, 0.5],
        vec![0.0, 0.0, 1.0],
    ])
    .unwrap();
    let q = DecodingMetric::ml(&w);
    assert!(!zero_error_mismatch_is_zero(&w, &q));
    let bsc = ChannelKernel::bsc(0.3).unwrap();
    assert!(is_balanced(&bsc, &DecodingMetric::ml(&bsc)));
}
