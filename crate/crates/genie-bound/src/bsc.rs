//! The bound for a BSC with uniform input and a binary side output, with
//! `P_XZ` restricted to the symmetric form `P(z ≠ x) = γ`:
//!
//! ```text
//! min_{γ : log 2 − h(γ) ≤ R}  ½[D(1−γ, γ ‖ W_{Z|X}(·|0)) + D(γ, 1−γ ‖ W_{Z|X}(·|1))]
//!                            + γ(1−γ) sup_s Σ_z [d_{z,s}(0,1)]₊
//! ```
//!
//! minimized over a finite family of side channels.

use classic_bounds::{delta_gv, BoundCurve, CurveMeta};
use numeric_kernels::{maximize_scan_1d, OptimizerConfig};
use prob_core::{binary_kl, ChannelKernel, DecodingMetric, Error, Result};
use rayon::prelude::*;

use crate::channel::ConditionalChannel;
use crate::eta::{s_tolerance, BinaryPairs};
use crate::family::{WzCandidate, WzFamily};

const GAMMA_SCAN: usize = 64;

/// Per-candidate constants of the symmetric objective.
#[derive(Clone, Debug, PartialEq)]
pub struct BscCandidate {
    /// `W_{Z|X}(0|0)` and `W_{Z|X}(1|1)`.
    stay: [f64; 2],
    /// `sup_s Σ_z [d_{z,s}(0,1)]₊` over side symbols with defined rows.
    gain: f64,
    hit_cap: bool,
}

impl BscCandidate {
    pub fn new(p: f64, candidate: &WzCandidate, cfg: &OptimizerConfig) -> Result<Self> {
        let w = ChannelKernel::bsc(p)?;
        let wyz = candidate.broadcast(&w)?;
        if wyz.outputs_z() != 2 {
            return Err(Error::AlphabetMismatch { left: 2, right: wyz.outputs_z() });
        }
        let wz = wyz.z_given_x()?;
        let c = ConditionalChannel::from_broadcast(&wyz)?;
        let pairs = BinaryPairs::new(&c, &DecodingMetric::ml(&w), cfg)?;
        let weights: Vec<f64> = (0..2).map(|z| f64::from(u8::from(pairs.d(z, 0.0).is_some()))).collect();
        let m = pairs.max_over_weights(&weights)?;
        Ok(Self { stay: [wz.get(0, 0), wz.get(1, 1)], gain: m.value, hit_cap: m.hit_cap })
    }

    /// The objective at a given `γ`.
    pub fn objective(&self, gamma: f64) -> f64 {
        0.5 * (binary_kl(gamma, 1.0 - self.stay[0]) + binary_kl(gamma, 1.0 - self.stay[1]))
            + gamma * (1.0 - gamma) * self.gain
    }

    /// Minimum over `γ ∈ [δ, 1−δ]` and its argument.
    pub fn minimize(&self, delta: f64, cfg: &OptimizerConfig) -> (f64, f64) {
        if 1.0 - 2.0 * delta <= 1e-12 {
            return (self.objective(0.5), 0.5);
        }
        maximize_scan_1d(|g| -self.objective(g), delta, 1.0 - delta, GAMMA_SCAN, s_tolerance(cfg))
            .map_or((f64::INFINITY, 0.5), |m| (-m.value, m.arg))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BscPoint {
    pub rate: f64,
    pub value: f64,
    /// Index of the minimizing candidate in the family.
    pub candidate: usize,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BscGenieCurve {
    pub curve: BoundCurve,
    pub points: Vec<BscPoint>,
}

/// The symmetric-γ bound for BSC(`p`) at each rate (nats), minimized over
/// `family`.
pub fn bsc_genie_bound(rates: &[f64], p: f64, family: &WzFamily, cfg: &OptimizerConfig) -> Result<BscGenieCurve> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::Domain { name: "crossover", value: p, domain: "(0, 1/2)" });
    }
    let deltas = rates.iter().map(|&r| delta_gv(r)).collect::<Result<Vec<_>>>()?;
    let per_candidate: Vec<(Vec<(f64, f64)>, bool)> = family
        .candidates()
        .par_iter()
        .map(|cand| {
            let c = BscCandidate::new(p, cand, cfg)?;
            Ok((deltas.iter().map(|&d| c.minimize(d, cfg)).collect(), c.hit_cap))
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(rates.len());
    let mut meta = CurveMeta::default();
    for (k, &rate) in rates.iter().enumerate() {
        let mut best = BscPoint { rate, value: f64::INFINITY, candidate: 0, gamma: 0.5 };
        for (i, (vals, _)) in per_candidate.iter().enumerate() {
            if vals[k].0 < best.value {
                best = BscPoint { rate, value: vals[k].0, candidate: i, gamma: vals[k].1 };
            }
        }
        if per_candidate[best.candidate].1 {
            meta.hit_cap_at.push(rate);
        }
        points.push(best);
    }
    meta.notes.push(format!("{} side-channel candidates", family.len()));
    let curve = BoundCurve::new("E_sym", points.iter().map(|b| (b.rate, b.value)).collect(), meta)?;
    Ok(BscGenieCurve { curve, points })
}
