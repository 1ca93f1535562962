use classic_bounds::*;
use numeric_kernels::OptimizerConfig;
use prob_core::{binary_entropy, ChannelKernel, ProbVec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generic_sphere_packing_matches_bsc_form(p in 0.02f64..0.45, frac in 0.01f64..1.2) {
        let w = ChannelKernel::bsc(p).unwrap();
        let cap = std::f64::consts::LN_2 - binary_entropy(p).unwrap();
        let r = frac * cap;
        let generic = e_sp(r, &ProbVec::uniform(2), &w, &OptimizerConfig::default()).unwrap().value;
        let closed = e_sp_bsc(r, p).unwrap();
        prop_assert!((generic - closed).abs() <= 1e-6, "{} vs {}", generic, closed);
    }

    #[test]
    fn sphere_packing_is_convex_and_nonincreasing(p in 0.02f64..0.45, a in 0.02f64..0.3, gap in 0.01f64..0.2) {
        let f = |r: f64| e_sp_bsc(r, p).unwrap();
        let (lo, hi) = (a, a + 2.0 * gap);
        let mid = 0.5 * (lo + hi);
        prop_assert!(f(hi) <= f(mid) + 1e-12 && f(mid) <= f(lo) + 1e-12);
        prop_assert!(f(mid) <= 0.5 * (f(lo) + f(hi)) + 1e-12);
    }

    #[test]
    fn gilbert_varshamov_distance_inverts_the_entropy(r in 0.001f64..0.69) {
        let d = delta_gv(r).unwrap();
        prop_assert!((0.0..=0.5).contains(&d));
        prop_assert!((std::f64::consts::LN_2 - binary_entropy(d).unwrap() - r).abs() <= 1e-9);
    }

    #[test]
    fn bsc_lower_bound_stays_below_sphere_packing(p in 0.02f64..0.45, frac in 0.01f64..0.99) {
        let params = BscLowerBoundParams::new(p).unwrap();
        let r = frac * params.capacity();
        let lb = e_lb_bsc(r, &params).unwrap();
        prop_assert!(lb >= 0.0);
        prop_assert!(lb <= e_sp_bsc(r, p).unwrap() + 1e-9);
    }
}
