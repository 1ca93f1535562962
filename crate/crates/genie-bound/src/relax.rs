//! Relaxations and the null-side quantity.
//!
//! * `e_sym`: the inner maximum over auxiliaries widened to all symmetric
//!   couplings whose diagonal dominates the squared conditional marginal.
//! * `e_b`: the side output dropped from the conditional channel, so `Z`
//!   only shapes the coupling. Binary inputs reduce to a scalar distance
//!   times `min Σ_z 2P(0,z)P(1,z)/P(z)` under the information budget.
//! * `e_bar_zero`: the inner maximum with a trivial side output.

use numeric_kernels::{info_constrained_min_many, maximize_over_aux, AuxiliaryDecomposition, OptimizerConfig};
use prob_core::{BroadcastKernel, ChannelKernel, DecodingMetric, Error, JointDist, ProbVec, Result};

use crate::channel::ConditionalChannel;
use crate::coupling::PairCoupling;
use crate::eta::{binary_weights, eta, symmetric_max, BinaryPairs};
use crate::genie::GenieProblem;

#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedValue {
    pub value: f64,
    pub joint: JointDist,
    pub s_star: f64,
}

/// Side divergence plus the symmetric-coupling maximum at a fixed `P_XZ`.
pub fn e_sym_fixed(p_xz: &JointDist, wyz: &BroadcastKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<f64> {
    let w = ConditionalChannel::from_broadcast(wyz)?;
    if p_xz.dims() != [w.inputs(), w.side()] {
        return Err(Error::ShapeMismatch(format!(
            "P_XZ dims {:?} vs channel {}x{}",
            p_xz.dims(),
            w.inputs(),
            w.side()
        )));
    }
    let side = w.side_divergence(p_xz.weights());
    if !side.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(side + symmetric_max(p_xz.weights(), &w, q, cfg)?.value)
}

/// The symmetric relaxation at several rates.
pub fn e_sym_curve(
    rates: &[f64],
    p: &ProbVec,
    wyz: &BroadcastKernel,
    q: &DecodingMetric,
    cfg: &OptimizerConfig,
) -> Result<Vec<RelaxedValue>> {
    let w = ConditionalChannel::from_broadcast(wyz)?;
    if p.len() != w.inputs() {
        return Err(Error::AlphabetMismatch { left: p.len(), right: w.inputs() });
    }
    let problem = GenieProblem::new(wyz, q, cfg)?;
    let nz = w.side();
    // For binary inputs the relaxation and the exact inner maximum coincide,
    // and the genie objective is the faster of the two.
    let objective = |j: &[f64]| {
        if w.inputs() == 2 {
            problem.objective(j)
        } else {
            problem.relaxed_objective(j)
        }
    };
    info_constrained_min_many(objective, p, nz, rates, cfg)?
        .into_iter()
        .map(|m| {
            let s_star = symmetric_max(&m.joint, &w, q, cfg)?.s_star;
            Ok(RelaxedValue { value: m.value, joint: JointDist::new(m.joint, vec![w.inputs(), nz])?, s_star })
        })
        .collect()
}

pub fn e_sym(r: f64, p: &ProbVec, wyz: &BroadcastKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<RelaxedValue> {
    Ok(e_sym_curve(&[r], p, wyz, q, cfg)?.pop().expect("one rate"))
}

/// `sup_s d_s(0,1)` for a binary channel, `−log Σ √(W W)` under ML.
fn binary_distance(w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<f64> {
    if q.is_ml() {
        let bc: f64 = (0..w.outputs()).map(|y| (w.get(0, y) * w.get(1, y)).sqrt()).sum();
        return Ok((-bc.ln()).max(0.0));
    }
    let c = ConditionalChannel::replicated(w, 1)?;
    Ok(BinaryPairs::new(&c, q, cfg)?.max_over_weights(&[1.0])?.value)
}

fn aux_max_replicated(p_xz: &[f64], c: &ConditionalChannel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<f64> {
    let objective = |a: &AuxiliaryDecomposition| {
        PairCoupling::from_aux(p_xz, a)
            .and_then(|cp| eta(&cp, c, q, cfg))
            .map_or(f64::NEG_INFINITY, |e| e.value)
    };
    Ok(maximize_over_aux(objective, c.inputs(), c.side(), cfg)?.value)
}

/// `e_b` at several rates with a side alphabet of size `side`.
pub fn e_b_curve(
    rates: &[f64],
    p: &ProbVec,
    w: &ChannelKernel,
    q: &DecodingMetric,
    side: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<f64>> {
    if p.len() != w.inputs() {
        return Err(Error::AlphabetMismatch { left: p.len(), right: w.inputs() });
    }
    let c = ConditionalChannel::replicated(w, side)?;
    c.check_metric(q)?;
    match w.inputs() {
        1 => Ok(vec![0.0; rates.len()]),
        2 => {
            let d = binary_distance(w, q, cfg)?;
            let spread = |j: &[f64]| binary_weights(j, side).iter().sum::<f64>();
            Ok(info_constrained_min_many(spread, p, side, rates, cfg)?.iter().map(|m| d * m.value).collect())
        }
        _ => {
            let objective = |j: &[f64]| aux_max_replicated(j, &c, q, cfg).unwrap_or(f64::INFINITY);
            Ok(info_constrained_min_many(objective, p, side, rates, cfg)?.iter().map(|m| m.value).collect())
        }
    }
}

pub fn e_b(r: f64, p: &ProbVec, w: &ChannelKernel, q: &DecodingMetric, side: usize, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(e_b_curve(&[r], p, w, q, side, cfg)?[0])
}

/// The inner maximum over `P_{U|X}` with no side output.
pub fn e_bar_zero(p: &ProbVec, w: &ChannelKernel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<f64> {
    if p.len() != w.inputs() {
        return Err(Error::AlphabetMismatch { left: p.len(), right: w.inputs() });
    }
    if w.inputs() == 1 {
        return Ok(0.0);
    }
    let c = ConditionalChannel::replicated(w, 1)?;
    c.check_metric(q)?;
    let ascent = aux_max_replicated(p.as_slice(), &c, q, cfg)?;
    if w.inputs() == 2 {
        let exact = BinaryPairs::new(&c, q, cfg)?.max_over_weights(&binary_weights(p.as_slice(), 1))?.value;
        return Ok(ascent.max(exact));
    }
    Ok(ascent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use classic_bounds::delta_gv;

    fn bsc() -> (ChannelKernel, DecodingMetric) {
        let w = ChannelKernel::bsc(0.1).unwrap();
        let q = DecodingMetric::ml(&w);
        (w, q)
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 4, tol_simplex: 1e-5, ..OptimizerConfig::default() }
    }

    #[test]
    fn e_bar_zero_bsc() {
        let (w, q) = bsc();
        let v = e_bar_zero(&ProbVec::uniform(2), &w, &q, &quick()).unwrap();
        assert_abs_diff_eq!(v, 0.255_412_8, epsilon = 1e-7);
        let one = ChannelKernel::new(vec![vec![0.3, 0.7]]).unwrap();
        let q1 = DecodingMetric::ml(&one);
        assert_eq!(e_bar_zero(&ProbVec::uniform(1), &one, &q1, &quick()).unwrap(), 0.0);
    }

    #[test]
    fn e_b_symmetric_binary_side() {
        // Symmetric |Z| = 2 optimum: 2δ(1−δ) times the Bhattacharyya distance.
        let (w, q) = bsc();
        let b = -(2.0 * (0.09f64).sqrt()).ln();
        for r in [0.05, 0.2, 0.4] {
            let d = delta_gv(r).unwrap();
            let v = e_b(r, &ProbVec::uniform(2), &w, &q, 2, &OptimizerConfig::default()).unwrap();
            assert_abs_diff_eq!(v, 2.0 * d * (1.0 - d) * b, epsilon = 1e-6);
        }
        let free = e_b(1.0, &ProbVec::uniform(2), &w, &q, 2, &OptimizerConfig::default()).unwrap();
        assert!(free < 1e-9);
    }

    #[test]
    fn degenerate_coupling_keeps_relaxation_nonnegative() {
        let (w, q) = bsc();
        let side = ChannelKernel::new(vec![vec![0.8, 0.2], vec![0.4, 0.6], vec![0.6, 0.4], vec![0.2, 0.8]]).unwrap();
        let wyz = BroadcastKernel::from_parts(&w, &side).unwrap();
        let p_xz = JointDist::new(vec![0.35, 0.15, 0.15, 0.35], vec![2, 2]).unwrap();
        assert!(e_sym_fixed(&p_xz, &wyz, &q, &OptimizerConfig::default()).unwrap() >= 0.0);
    }
}
