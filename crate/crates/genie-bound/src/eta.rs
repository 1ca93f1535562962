//! The tilted dual `η` and its maximizations over couplings.
//!
//! For a pair coupling `c` the dual reads
//!
//! ```text
//! η = sup_{s≥0} −Σ_{z,x,x̃} c_z(x,x̃) log Σ_y W(y|x,z) e^{s[q(x̃,y) − q(x,y)]}
//!   = sup_{s≥0}  Σ_{z,x,x̃} c_z(x,x̃) d_{z,s}(x,x̃),
//! ```
//!
//! the second line using the symmetry of `c`. Two maximizations over `c` are
//! provided. For binary inputs the range of couplings reachable through an
//! auxiliary `U` is exactly `0 ≤ c_z(0,1) ≤ P(0,z)P(1,z)/P(z)`, which is
//! also the symmetric polytope with the diagonal constraint, so both reduce
//! to `sup_s Σ_z w_z [d_{z,s}(0,1)]₊` and are solved by enumerating the set of
//! side symbols on which the positive part is active. For larger input
//! alphabets the symmetric polytope is handled by linear programming at
//! scanned values of `s`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use numeric_kernels::{maximize_concave_1d, OptimizerConfig, TiltProblem};
use prob_core::{DecodingMetric, Error, Result};

use crate::channel::{pair_distance, ConditionalChannel};
use crate::coupling::PairCoupling;

/// Argument tolerance for the searches over `s`. The value error is
/// quadratic in the argument error, so this is far below any reported
/// precision.
pub(crate) fn s_tolerance(cfg: &OptimizerConfig) -> f64 {
    cfg.tol_1d.max(1e-7)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaValue {
    pub value: f64,
    pub s_star: f64,
    pub hit_cap: bool,
    /// `Σ c d_{z,s*}` at the maximizer, the symmetric form of the same value.
    pub d_form: f64,
}

/// `η` for a fixed pair coupling.
pub fn eta(coupling: &PairCoupling, w: &ConditionalChannel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<EtaValue> {
    w.check_metric(q)?;
    let ny = w.outputs();
    let mut tilt = TiltProblem::new();
    for (z, x, xt, c) in coupling.support().filter(|(_, x, xt, _)| x != xt) {
        let base = w.row_or_err(x, z)?;
        let gain: Vec<f64> = (0..ny).map(|y| q.gain(x, xt, y)).collect();
        tilt.push(c, base, &gain);
    }
    let m = tilt.sup(cfg.s_max_cap, s_tolerance(cfg))?;
    Ok(EtaValue {
        value: m.value,
        s_star: m.arg,
        hit_cap: m.hit_cap,
        d_form: eta_d_form(coupling, w, q, m.arg)?,
    })
}

/// `Σ_{z,x,x̃} c_z(x,x̃) d_{z,s}(x,x̃)` at a given `s`.
pub fn eta_d_form(coupling: &PairCoupling, w: &ConditionalChannel, q: &DecodingMetric, s: f64) -> Result<f64> {
    coupling
        .support()
        .filter(|(_, x, xt, _)| x != xt)
        .map(|(z, x, xt, c)| Ok(c * pair_distance(z, s, q, w, x, xt)?))
        .sum()
}

/// Precomputed distances `d_{z,s}(0,1)` for a binary-input conditional
/// channel, with the per-symbol suprema.
#[derive(Clone, Debug)]
pub(crate) struct BinaryPairs {
    terms: Vec<Option<PairTerm>>,
    cap: f64,
    tol: f64,
}

#[derive(Clone, Debug)]
struct PairTerm {
    forward: Vec<(f64, f64)>,
    backward: Vec<(f64, f64)>,
    /// `max(0, sup_s d_{z,s})` and its maximizer.
    best: (f64, f64),
}

fn lse_tilted(terms: &[(f64, f64)], s: f64) -> f64 {
    let m = terms.iter().map(|&(lw, g)| lw + s * g).fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|&(lw, g)| (lw + s * g - m).exp()).sum::<f64>().ln()
}

impl PairTerm {
    fn d(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        -0.5 * (lse_tilted(&self.forward, s) + lse_tilted(&self.backward, s))
    }
}

/// Result of `sup_s Σ_z w_z [d_{z,s}(0,1)]₊`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SubsetMax {
    pub value: f64,
    pub s_star: f64,
    pub hit_cap: bool,
    /// Side symbols on which the positive part is active at the optimum.
    pub active: Vec<bool>,
}

/// Beyond this many candidate symbols the subset enumeration is replaced by
/// a scan over `s`.
const SUBSET_LIMIT: usize = 12;

impl BinaryPairs {
    pub(crate) fn new(w: &ConditionalChannel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<Self> {
        w.check_metric(q)?;
        if w.inputs() != 2 {
            return Err(Error::ShapeMismatch(format!("binary pair table needs 2 inputs, got {}", w.inputs())));
        }
        let cap = cfg.s_max_cap;
        let tol = s_tolerance(cfg);
        let side_term = |x: usize, xt: usize, z: usize| -> Option<Vec<(f64, f64)>> {
            let row = w.row(x, z)?;
            Some(
                row.iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 0.0)
                    .map(|(y, &v)| (v.ln(), q.gain(x, xt, y)))
                    .collect(),
            )
        };
        let terms = (0..w.side())
            .map(|z| -> Result<Option<PairTerm>> {
                let (Some(forward), Some(backward)) = (side_term(0, 1, z), side_term(1, 0, z)) else {
                    return Ok(None);
                };
                let mut t = PairTerm { forward, backward, best: (0.0, 0.0) };
                let m = maximize_concave_1d(|s| t.d(s), 0.0, cap, tol)?;
                t.best = (m.value.max(0.0), m.arg);
                Ok(Some(t))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { terms, cap, tol })
    }

    /// Some per-symbol supremum sits at the cap.
    pub(crate) fn any_hit_cap(&self) -> bool {
        self.terms.iter().flatten().any(|t| self.cap - t.best.1 <= self.tol)
    }

    pub(crate) fn d(&self, z: usize, s: f64) -> Option<f64> {
        self.terms[z].as_ref().map(|t| t.d(s))
    }

    /// `sup_s Σ_z w_z [d_{z,s}]₊`. A positive weight on a symbol whose rows
    /// are undefined is an error.
    pub(crate) fn max_over_weights(&self, weights: &[f64]) -> Result<SubsetMax> {
        let mut live = Vec::new();
        for (z, &wz) in weights.iter().enumerate() {
            if wz <= 0.0 {
                continue;
            }
            match &self.terms[z] {
                None => return Err(Error::UndefinedRow { x: 0, z }),
                Some(t) if t.best.0 > 0.0 => live.push(z),
                Some(_) => {}
            }
        }
        let nz = weights.len();
        let mut best = SubsetMax { value: 0.0, s_star: 0.0, hit_cap: false, active: vec![false; nz] };
        if live.len() > SUBSET_LIMIT {
            let f = |s: f64| live.iter().map(|&z| weights[z] * self.d(z, s).unwrap_or(0.0).max(0.0)).sum::<f64>();
            let hi = live.iter().map(|&z| self.terms[z].as_ref().map_or(0.0, |t| t.best.1)).fold(0.0, f64::max);
            let m = numeric_kernels::maximize_scan_1d(f, 0.0, (2.0 * hi).min(self.cap).max(1.0), 512, self.tol)?;
            best.value = m.value;
            best.s_star = m.arg;
            for &z in &live {
                best.active[z] = self.d(z, m.arg).unwrap_or(0.0) > 0.0;
            }
            return Ok(best);
        }
        for mask in 1u32..(1u32 << live.len()) {
            let chosen: Vec<usize> = (0..live.len()).filter(|i| mask & (1 << i) != 0).map(|i| live[i]).collect();
            let (value, s_star, hit_cap) = if let [z] = chosen[..] {
                let t = self.terms[z].as_ref().expect("live symbols have terms");
                (weights[z] * t.best.0, t.best.1, self.cap - t.best.1 <= self.tol)
            } else {
                let f = |s: f64| chosen.iter().map(|&z| weights[z] * self.d(z, s).unwrap_or(0.0)).sum::<f64>();
                let m = maximize_concave_1d(f, 0.0, self.cap, self.tol)?;
                (m.value, m.arg, m.hit_cap)
            };
            if value > best.value {
                best.value = value;
                best.s_star = s_star;
                best.hit_cap = hit_cap;
                best.active = vec![false; nz];
                for &z in &chosen {
                    best.active[z] = true;
                }
            }
        }
        Ok(best)
    }
}

/// Largest mismatch weights `2 P(0,z) P(1,z) / P(z)` reachable for binary
/// inputs.
pub(crate) fn binary_weights(p_xz: &[f64], side: usize) -> Vec<f64> {
    (0..side)
        .map(|z| {
            let (a, b) = (p_xz[z], p_xz[side + z]);
            if a + b > 0.0 {
                2.0 * a * b / (a + b)
            } else {
                0.0
            }
        })
        .collect()
}

/// Scan points for the symmetric linear programs.
fn s_scan(cap: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut s = 1e-2;
    while s < cap {
        out.push(s);
        s *= 1.15;
    }
    out.push(cap);
    out
}

/// Max over symmetric `P_{XZX̃}` with marginal `P_XZ` and diagonal
/// `P(x,x|z) ≥ P(x|z)²` of `sup_s Σ P d_{z,s}`.
pub fn symmetric_max(p_xz: &[f64], w: &ConditionalChannel, q: &DecodingMetric, cfg: &OptimizerConfig) -> Result<EtaValue> {
    w.check_metric(q)?;
    let (nx, nz) = (w.inputs(), w.side());
    if p_xz.len() != nx * nz {
        return Err(Error::ShapeMismatch(format!("joint P_XZ needs {} entries, got {}", nx * nz, p_xz.len())));
    }
    if nx == 2 {
        let pairs = BinaryPairs::new(w, q, cfg)?;
        let m = pairs.max_over_weights(&binary_weights(p_xz, nz))?;
        return Ok(EtaValue { value: m.value, s_star: m.s_star, hit_cap: m.hit_cap, d_form: m.value });
    }
    // Pairs (z, x < x̃) with slack on both sides.
    let slack: Vec<f64> = (0..nz)
        .flat_map(|z| {
            let pz: f64 = (0..nx).map(|x| p_xz[x * nz + z]).sum();
            (0..nx).map(move |x| {
                let m = p_xz[x * nz + z];
                if pz > 0.0 {
                    (m - m * m / pz).max(0.0)
                } else {
                    0.0
                }
            })
        })
        .collect();
    let pairs: Vec<(usize, usize, usize)> = (0..nz)
        .flat_map(|z| (0..nx).flat_map(move |x| (x + 1..nx).map(move |xt| (z, x, xt))))
        .filter(|&(z, x, xt)| slack[z * nx + x] > 0.0 && slack[z * nx + xt] > 0.0)
        .collect();
    if pairs.is_empty() {
        return Ok(EtaValue { value: 0.0, s_star: 0.0, hit_cap: false, d_form: 0.0 });
    }
    let distances = |s: f64| -> Result<Vec<f64>> {
        pairs.iter().map(|&(z, x, xt)| pair_distance(z, s, q, w, x, xt)).collect()
    };
    let solve = |d: &[f64]| -> Result<Vec<f64>> {
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = d.iter().map(|&dk| lp.add_var(2.0 * dk, (0.0, f64::INFINITY))).collect();
        for z in 0..nz {
            for x in 0..nx {
                let row: Vec<_> = pairs
                    .iter()
                    .zip(&vars)
                    .filter(|((pz, a, b), _)| *pz == z && (*a == x || *b == x))
                    .map(|(_, &v)| (v, 1.0))
                    .collect();
                if !row.is_empty() {
                    lp.add_constraint(row.as_slice(), ComparisonOp::Le, slack[z * nx + x]);
                }
            }
        }
        let sol = lp.solve().map_err(|e| Error::Config(format!("symmetric coupling program failed: {e}")))?;
        Ok(vars.iter().map(|&v| *sol.var_value(v)).collect())
    };
    // Collect the vertices that are optimal somewhere on the scan, then take
    // the exact supremum over s along each of them.
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for s in s_scan(cfg.s_max_cap) {
        let d = distances(s)?;
        if d.iter().any(|v| v.is_infinite()) {
            return Ok(EtaValue { value: f64::INFINITY, s_star: s, hit_cap: false, d_form: f64::INFINITY });
        }
        let y = solve(&d)?;
        if !vertices.iter().any(|v| v.iter().zip(&y).all(|(a, b)| (a - b).abs() <= 1e-12)) {
            vertices.push(y);
        }
    }
    let mut best = EtaValue { value: 0.0, s_star: 0.0, hit_cap: false, d_form: 0.0 };
    for y in &vertices {
        let f = |s: f64| {
            distances(s).map_or(f64::NAN, |d| d.iter().zip(y).map(|(dk, yk)| 2.0 * dk * yk).sum())
        };
        let m = maximize_concave_1d(f, 0.0, cfg.s_max_cap, s_tolerance(cfg))?;
        if m.value > best.value {
            best = EtaValue { value: m.value, s_star: m.arg, hit_cap: m.hit_cap, d_form: m.value };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use numeric_kernels::AuxiliaryDecomposition;
    use prob_core::{BroadcastKernel, ChannelKernel};

    fn bsc_null_side() -> (ConditionalChannel, DecodingMetric) {
        let w = ChannelKernel::bsc(0.1).unwrap();
        (ConditionalChannel::replicated(&w, 1).unwrap(), DecodingMetric::ml(&w))
    }

    #[test]
    fn bsc_constant_aux() {
        let (w, q) = bsc_null_side();
        let c = PairCoupling::from_aux(&[0.5, 0.5], &AuxiliaryDecomposition::constant(2, 1)).unwrap();
        let e = eta(&c, &w, &q, &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(e.value, 0.255_412_8, epsilon = 1e-7);
        assert_abs_diff_eq!(e.s_star, 0.5, epsilon = 1e-6);
        assert!((e.value - e.d_form).abs() <= 1e-9);
    }

    #[test]
    fn revealing_aux_gives_zero() {
        let (w, q) = bsc_null_side();
        let c = PairCoupling::from_aux(&[0.5, 0.5], &AuxiliaryDecomposition::revealing(2, 1)).unwrap();
        assert_eq!(eta(&c, &w, &q, &OptimizerConfig::default()).unwrap().value, 0.0);
    }

    #[test]
    fn subset_formula_matches_dense_scan() {
        let wy = ChannelKernel::bsc(0.1).unwrap();
        let side = ChannelKernel::new(vec![vec![0.9, 0.1], vec![0.25, 0.75], vec![0.6, 0.4], vec![0.05, 0.95]]).unwrap();
        let w = ConditionalChannel::from_broadcast(&BroadcastKernel::from_parts(&wy, &side).unwrap()).unwrap();
        let q = DecodingMetric::ml(&wy);
        let cfg = OptimizerConfig::default();
        let pairs = BinaryPairs::new(&w, &q, &cfg).unwrap();
        let weights = [0.3, 0.45];
        let m = pairs.max_over_weights(&weights).unwrap();
        let scan = (0..=200_000)
            .map(|i| {
                let s = i as f64 * 2e-5;
                (0..2).map(|z| weights[z] * pairs.d(z, s).unwrap().max(0.0)).sum::<f64>()
            })
            .fold(0.0, f64::max);
        assert!(m.value >= scan - 1e-12, "subset {} below scan {}", m.value, scan);
        assert!(m.value - scan <= 1e-8);
    }

    #[test]
    fn symmetric_lp_agrees_with_binary_form_on_embedded_alphabet() {
        // A ternary input whose third symbol has no mass reduces to the
        // binary problem.
        let wy = ChannelKernel::new(vec![vec![0.8, 0.2], vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        let side = ChannelKernel::new(vec![
            vec![0.7, 0.3],
            vec![0.2, 0.8],
            vec![0.4, 0.6],
            vec![0.9, 0.1],
            vec![0.5, 0.5],
            vec![0.5, 0.5],
        ])
        .unwrap();
        let w3 = ConditionalChannel::from_broadcast(&BroadcastKernel::from_parts(&wy, &side).unwrap()).unwrap();
        let q3 = DecodingMetric::ml(&wy);
        let wy2 = ChannelKernel::new(vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
        let side2 = ChannelKernel::new(side.rows()[..4].iter().map(|r| r.to_vec()).collect()).unwrap();
        let w2 = ConditionalChannel::from_broadcast(&BroadcastKernel::from_parts(&wy2, &side2).unwrap()).unwrap();
        let q2 = DecodingMetric::ml(&wy2);
        let cfg = OptimizerConfig::default();
        let p3 = [0.2, 0.25, 0.35, 0.2, 0.0, 0.0];
        let p2 = &p3[..4];
        let a = symmetric_max(&p3, &w3, &q3, &cfg).unwrap();
        let b = symmetric_max(p2, &w2, &q2, &cfg).unwrap();
        assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-9);
    }
}
