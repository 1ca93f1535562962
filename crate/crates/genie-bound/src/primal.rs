//! Direct evaluation of the inner minimum
//!
//! ```text
//! min_{V : Σ c E_V[q(x̃,Y) − q(x,Y)] ≥ 0}  Σ_{z,x,x̃} c_z(x,x̃) D(V(·|x,z,x̃) ‖ W(·|x,z))
//! ```
//!
//! without passing through the tilt parameter. Each weighted row `k` gets a
//! target `t_k = E_{V_k}[gain]`; the cheapest row law with a given target is
//! found by a search on the segment of output laws meeting it, and the
//! targets are allocated by nested one-dimensional searches under the active
//! constraint `Σ c_k t_k = 0`. Everything is convex, so the nested golden
//! sections are exact up to their tolerance. Intended for small shapes:
//! at most four weighted off-diagonal rows and three outputs.

use numeric_kernels::maximize_scan_1d;
use prob_core::{DecodingMetric, Result};

use crate::channel::ConditionalChannel;
use crate::coupling::PairCoupling;

/// Largest number of weighted rows handled by the nested search.
pub const PRIMAL_MAX_ROWS: usize = 4;
/// Largest output alphabet handled by the row-law search.
pub const PRIMAL_MAX_OUTPUTS: usize = 3;

const TOL: f64 = 1e-9;
const SCAN: usize = 5;

/// One weighted row restricted to outputs where the gain is finite.
struct Row {
    weight: f64,
    base: Vec<f64>,
    gain: Vec<f64>,
    lo: f64,
    hi: f64,
}

fn kl_on(v: &[f64], base: &[f64]) -> f64 {
    v.iter().zip(base).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum::<f64>()
}

fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    if b - a <= TOL {
        return f(0.5 * (a + b));
    }
    maximize_scan_1d(|t| -f(t), a, b, SCAN, TOL * (b - a).max(1.0)).map_or(f64::INFINITY, |m| -m.value)
}

impl Row {
    /// `min D(V ‖ W)` over laws on the finite-gain support with `E_V[gain] = t`.
    fn cost(&self, t: f64) -> f64 {
        let t = t.clamp(self.lo, self.hi);
        let n = self.base.len();
        if self.hi - self.lo <= 0.0 {
            return -self.base.iter().sum::<f64>().ln();
        }
        // Points of the simplex edges (and vertices) on the hyperplane.
        let mut points: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (gi, gj) = (self.gain[i], self.gain[j]);
                if gi == gj || t < gi.min(gj) || t > gi.max(gj) {
                    continue;
                }
                let mut p = vec![0.0; n];
                p[i] = ((gj - t) / (gj - gi)).clamp(0.0, 1.0);
                p[j] = 1.0 - p[i];
                points.push(p);
            }
        }
        let (mut a, mut b) = (points[0].clone(), points[0].clone());
        let mut spread = 0.0;
        for p in &points {
            for r in &points {
                let d: f64 = p.iter().zip(r).map(|(u, v)| (u - v).abs()).sum();
                if d > spread {
                    spread = d;
                    a = p.clone();
                    b = r.clone();
                }
            }
        }
        if spread <= 0.0 {
            return kl_on(&a, &self.base);
        }
        let mut v = vec![0.0; n];
        golden_min(
            |tau| {
                for k in 0..n {
                    v[k] = (1.0 - tau) * a[k] + tau * b[k];
                }
                kl_on(&v, &self.base)
            },
            0.0,
            1.0,
        )
    }
}

fn allocate(rows: &[Row], target: f64) -> f64 {
    let (first, rest) = rows.split_first().expect("nonempty");
    if rest.is_empty() {
        let t = target / first.weight;
        if t < first.lo - 1e-12 || t > first.hi + 1e-12 {
            return f64::INFINITY;
        }
        return first.weight * first.cost(t);
    }
    let rest_hi: f64 = rest.iter().map(|r| r.weight * r.hi).sum();
    let rest_lo: f64 = rest.iter().map(|r| r.weight * r.lo).sum();
    let lo = first.lo.max((target - rest_hi) / first.weight);
    let hi = first.hi.min((target - rest_lo) / first.weight);
    if lo > hi {
        return f64::INFINITY;
    }
    golden_min(|t| first.weight * first.cost(t) + allocate(rest, target - first.weight * t), lo, hi)
}

/// The inner primal minimum for a fixed coupling, or `None` when the shape
/// exceeds [`PRIMAL_MAX_ROWS`] or [`PRIMAL_MAX_OUTPUTS`].
pub fn primal_inner(coupling: &PairCoupling, w: &ConditionalChannel, q: &DecodingMetric) -> Result<Option<f64>> {
    w.check_metric(q)?;
    if w.outputs() > PRIMAL_MAX_OUTPUTS {
        return Ok(None);
    }
    let mut rows = Vec::new();
    for (z, x, xt, c) in coupling.support().filter(|(_, x, xt, _)| x != xt) {
        let base_row = w.row_or_err(x, z)?;
        let (mut base, mut gain) = (Vec::new(), Vec::new());
        for (y, &wy) in base_row.iter().enumerate() {
            let g = q.gain(x, xt, y);
            if wy > 0.0 && g.is_finite() {
                base.push(wy);
                gain.push(g);
            }
        }
        if base.is_empty() {
            // No law absolutely continuous w.r.t. W gives this row a finite
            // score: the constraint cannot hold.
            return Ok(Some(f64::INFINITY));
        }
        let lo = gain.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = gain.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rows.push(Row { weight: c, base, gain, lo, hi });
    }
    if rows.len() > PRIMAL_MAX_ROWS {
        return Ok(None);
    }
    if rows.is_empty() {
        return Ok(Some(0.0));
    }
    // Unconstrained optimum: each row is W restricted to its support.
    let free_cost: f64 = rows.iter().map(|r| -r.weight * r.base.iter().sum::<f64>().ln()).sum();
    let free_score: f64 = rows
        .iter()
        .map(|r| {
            let mass: f64 = r.base.iter().sum();
            r.weight * r.base.iter().zip(&r.gain).map(|(b, g)| b * g).sum::<f64>() / mass
        })
        .sum();
    if free_score >= 0.0 {
        return Ok(Some(free_cost));
    }
    let (fixed, free): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| r.hi - r.lo <= 0.0);
    let fixed_score: f64 = fixed.iter().map(|r| r.weight * r.lo).sum();
    let fixed_cost: f64 = fixed.iter().map(|r| r.weight * r.cost(r.lo)).sum();
    if free.is_empty() {
        return Ok(Some(f64::INFINITY));
    }
    Ok(Some(fixed_cost + allocate(&free, -fixed_score)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::eta;
    use approx::assert_abs_diff_eq;
    use numeric_kernels::{AuxiliaryDecomposition, OptimizerConfig};
    use prob_core::ChannelKernel;

    #[test]
    fn bsc_null_side_matches_tilt() {
        let w = ChannelKernel::bsc(0.1).unwrap();
        let q = DecodingMetric::ml(&w);
        let c = ConditionalChannel::replicated(&w, 1).unwrap();
        let coupling = PairCoupling::from_aux(&[0.5, 0.5], &AuxiliaryDecomposition::constant(2, 1)).unwrap();
        let primal = primal_inner(&coupling, &c, &q).unwrap().unwrap();
        assert_abs_diff_eq!(primal, 0.255_412_8, epsilon = 1e-7);
    }

    #[test]
    fn ternary_rows_agree_with_dual() {
        let w = ChannelKernel::new(vec![vec![0.6, 0.3, 0.1], vec![0.15, 0.25, 0.6]]).unwrap();
        let q = DecodingMetric::new(vec![vec![0.2, -0.1, -1.0], vec![-0.6, 0.0, 0.4]]).unwrap();
        let c = ConditionalChannel::replicated(&w, 1).unwrap();
        let coupling = PairCoupling::from_weights(vec![0.5, 0.2, 0.2, 0.1], 2, 1).unwrap();
        let primal = primal_inner(&coupling, &c, &q).unwrap().unwrap();
        let dual = eta(&coupling, &c, &q, &OptimizerConfig::default()).unwrap().value;
        assert_abs_diff_eq!(primal, dual, epsilon = 1e-7);
    }

    #[test]
    fn slack_constraint_costs_nothing() {
        // A metric that prefers the sent symbol on average with W itself.
        let w = ChannelKernel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let q = DecodingMetric::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let c = ConditionalChannel::replicated(&w, 1).unwrap();
        let coupling = PairCoupling::from_weights(vec![0.25, 0.25, 0.25, 0.25], 2, 1).unwrap();
        assert_eq!(primal_inner(&coupling, &c, &q).unwrap(), Some(0.0));
    }
}
