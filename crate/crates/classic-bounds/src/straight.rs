//! Straight-line bound: the tangent from `(0, E(0⁺))` to the sphere-packing
//! curve, followed by the sphere-packing curve itself.

use numeric_kernels::{maximize_scan_1d, OptimizerConfig};
use prob_core::{ChannelKernel, DecodingMetric, Error, Result};
use rayon::prelude::*;

use crate::achievability::zero_rate_exponent;
use crate::curve::{BoundCurve, CurveMeta, TangentPoint};
use crate::inputs::{bsc_crossover, maximize_over_inputs};
use crate::sphere::{e_sp, mutual_information_of};

/// Tolerance for reporting that the line touches the curve.
pub const TANGENCY_TOL: f64 = 1e-4;

/// `max_P I(P × W)`.
pub fn capacity(w: &ChannelKernel, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(maximize_over_inputs(w, |p| mutual_information_of(p, w), cfg)?.1)
}

/// `max_P E_sp(R, P)`.
pub fn e_sp_max(r: f64, w: &ChannelKernel, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(maximize_over_inputs(w, |p| Ok(e_sp(r, p, w, cfg)?.value), cfg)?.1)
}

/// `max_P` of the zero-rate exponent.
pub fn zero_rate_max(w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(maximize_over_inputs(w, |p| Ok(zero_rate_exponent(p, w, q, cfg)?.value), cfg)?.1)
}

/// Finds the tangent point by minimizing the chord slope
/// `(E_sp(R) − E(0⁺)) / R` over `(0, C]`.
pub fn tangent_point(w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<TangentPoint> {
    let zero_rate = zero_rate_max(w, q, cfg)?;
    if !zero_rate.is_finite() {
        return Err(Error::Tangency(format!("zero-rate exponent is not finite ({zero_rate})")));
    }
    let cap = capacity(w, cfg)?;
    if cap <= 0.0 {
        return Err(Error::Tangency("channel has zero capacity".into()));
    }
    let scan = if bsc_crossover(w).is_some() { 400 } else { 64 };
    let neg_slope = |r: f64| match e_sp_max(r, w, cfg) {
        Ok(e) if r > 0.0 => -(e - zero_rate) / r,
        Ok(_) => f64::NEG_INFINITY,
        Err(_) => f64::NAN,
    };
    let lo = cap / scan as f64;
    let m = maximize_scan_1d(neg_slope, lo, cap, scan, cfg.tol_1d.max(1e-12))?;
    if m.hit_cap || m.arg <= lo {
        return Err(Error::Tangency(format!(
            "chord slope is extremal at the search boundary (R = {})",
            m.arg
        )));
    }
    let tangent = TangentPoint { rate: m.arg, slope: -m.value, zero_rate };
    let gap = (tangent.line(m.arg) - e_sp_max(m.arg, w, cfg)?).abs();
    if gap > TANGENCY_TOL {
        return Err(Error::Tangency(format!("line misses the curve by {gap} at R = {}", m.arg)));
    }
    Ok(tangent)
}

/// The straight-line bound on a rate grid (nats), together with its tangent
/// point.
pub fn straight_line_bound(
    w: &ChannelKernel,
    q: &DecodingMetric,
    rates: &[f64],
    cfg: &OptimizerConfig,
) -> Result<(BoundCurve, TangentPoint)> {
    let tangent = tangent_point(w, q, cfg)?;
    let values: Vec<Result<f64>> = rates
        .par_iter()
        .map(|&r| {
            if r < tangent.rate {
                Ok(tangent.line(r))
            } else {
                e_sp_max(r, w, cfg)
            }
        })
        .collect();
    let points = rates.iter().zip(values).map(|(&r, v)| v.map(|v| (r, v))).collect::<Result<Vec<_>>>()?;
    let curve = BoundCurve::new("E_sl_sp", points, CurveMeta::default())?;
    Ok((curve, tangent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bsc_tangent() {
        let w = ChannelKernel::bsc(0.1).unwrap();
        let q = DecodingMetric::ml(&w);
        let cfg = OptimizerConfig::default();
        let t = tangent_point(&w, &q, &cfg).unwrap();
        assert_abs_diff_eq!(t.zero_rate, 0.2554128, epsilon = 1e-6);
        assert_abs_diff_eq!(t.rate, 0.10418, epsilon = 1e-4);
        assert_abs_diff_eq!(t.slope, -1.27634, epsilon = 1e-4);
        // The line never rises above the curve.
        for i in 1..60 {
            let r = 0.006 * i as f64;
            assert!(t.line(r) <= e_sp_max(r, &w, &cfg).unwrap() + 1e-9);
        }
    }
}
