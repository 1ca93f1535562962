//! The orthogonal-output exponent
//!
//! ```text
//! E_orth(R) = min  D(P_{Y|X} ‖ W | P) + I(X̃; Y | X, Z)
//! ```
//!
//! over `P_{X̃XYZ}` with `P_X = P`, `I(X;Z) ≤ R`, `X − Z − X̃`, `P_{X̃Z} = P_{XZ}`
//! and `E q(X̃,Y) ≥ E q(X,Y)`.
//!
//! At a fixed `P_XZ` the pair law is the independent coupling `c`, and with
//! `G = P_{Z|XY}` the objective splits as
//!
//! ```text
//! Σ c V log[V / (W G)] + Σ P(x,z) log P(z|x),
//! ```
//!
//! where `V = P_{Y|XZX̃}`. This is jointly convex in `(V, G)` and is minimized
//! by alternating an exact `V` step (a tilted divergence problem under the
//! score constraint) with the closed-form `G ∝ Σ_x̃ c V`. The outer search over
//! `P_XZ` is the usual information-constrained search.

use numeric_kernels::{info_constrained_min_many, OptimizerConfig, TiltProblem};
use prob_core::{ChannelKernel, DecodingMetric, Error, ProbVec, Result};

use crate::coupling::PairCoupling;
use crate::eta::s_tolerance;

/// Lattice points per coordinate in the coarse outer search.
pub const ORTH_GRID: usize = 17;
const MAX_ITERATIONS: usize = 500;
const STOP_DECREASE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct OrthFixed {
    pub value: f64,
    /// `G(z|x,y)` at the last iterate, rows indexed `x·|Y| + y`.
    pub side_kernel: Vec<f64>,
    pub iterations: usize,
}

/// The objective at a fixed row-major `P_XZ` with `side` side symbols.
pub fn e_orth_fixed(
    p_xz: &[f64],
    w: &ChannelKernel,
    q: &DecodingMetric,
    side: usize,
    cfg: &OptimizerConfig,
) -> Result<OrthFixed> {
    let (nx, ny, nz) = (w.inputs(), w.outputs(), side);
    if p_xz.len() != nx * nz {
        return Err(Error::ShapeMismatch(format!("joint P_XZ needs {} entries, got {}", nx * nz, p_xz.len())));
    }
    if q.inputs() != nx || q.outputs() != ny {
        return Err(Error::ShapeMismatch("metric does not match the channel".into()));
    }
    let coupling = PairCoupling::independent(p_xz, nx, nz)?;
    let rows: Vec<(usize, usize, usize, f64)> = coupling.support().collect();
    let px: Vec<f64> = p_xz.chunks(nz).map(|r| r.iter().sum()).collect();
    let cond = |x: usize, z: usize| if px[x] > 0.0 { p_xz[x * nz + z] / px[x] } else { 1.0 / nz as f64 };
    let entropy_term: f64 = (0..nx)
        .flat_map(|x| (0..nz).map(move |z| (x, z)))
        .filter(|&(x, z)| p_xz[x * nz + z] > 0.0)
        .map(|(x, z)| p_xz[x * nz + z] * cond(x, z).ln())
        .sum();
    let gains: Vec<Vec<f64>> = rows
        .iter()
        .map(|&(_, x, xt, _)| (0..ny).map(|y| if x == xt { 0.0 } else { q.gain(x, xt, y) }).collect())
        .collect();

    let mut g: Vec<f64> = (0..nx * ny).flat_map(|k| (0..nz).map(move |z| (k / ny, z))).map(|(x, z)| cond(x, z)).collect();
    let mut best = f64::INFINITY;
    let mut iterations = 0;
    let tol = s_tolerance(cfg);
    let mut base = vec![0.0; ny];
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut wgz = vec![0.0; nx * nz];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    wgz[x * nz + z] += w.get(x, y) * g[(x * ny + y) * nz + z];
                }
            }
        }
        let mut side_cross = 0.0;
        for x in 0..nx {
            for z in 0..nz {
                let m = p_xz[x * nz + z];
                if m > 0.0 {
                    side_cross -= m * wgz[x * nz + z].ln();
                }
            }
        }
        let mut tilt = TiltProblem::new();
        for (&(z, x, _, c), gain) in rows.iter().zip(&gains) {
            let total = wgz[x * nz + z];
            for (y, b) in base.iter_mut().enumerate() {
                *b = w.get(x, y) * g[(x * ny + y) * nz + z] / total;
            }
            tilt.push(c, &base, gain);
        }
        let m = tilt.sup(cfg.s_max_cap, tol)?;
        let value = entropy_term + side_cross + m.value;
        let done = best - value < STOP_DECREASE;
        best = best.min(value);
        if done || !value.is_finite() {
            break;
        }
        let laws = tilt.tilted_laws(m.arg);
        let mut acc = vec![0.0; nx * ny * nz];
        for (&(z, x, _, c), v) in rows.iter().zip(&laws) {
            for (y, &vy) in v.iter().enumerate() {
                acc[(x * ny + y) * nz + z] += c * vy;
            }
        }
        for (row_acc, row_g) in acc.chunks(nz).zip(g.chunks_mut(nz)) {
            let total: f64 = row_acc.iter().sum();
            if total > 0.0 {
                for (gz, a) in row_g.iter_mut().zip(row_acc) {
                    *gz = a / total;
                }
            }
        }
    }
    Ok(OrthFixed { value: best, side_kernel: g, iterations })
}

/// `E_orth` at several rates with `side` side symbols.
pub fn e_orth_curve(
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
    let outer = OptimizerConfig { grid_points_per_dim: cfg.grid_points_per_dim.min(ORTH_GRID), ..cfg.clone() };
    let objective = |j: &[f64]| e_orth_fixed(j, w, q, side, cfg).map_or(f64::INFINITY, |o| o.value);
    Ok(info_constrained_min_many(objective, p, side, rates, &outer)?.iter().map(|m| m.value).collect())
}

pub fn e_orth(r: f64, p: &ProbVec, w: &ChannelKernel, q: &DecodingMetric, side: usize, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(e_orth_curve(&[r], p, w, q, side, cfg)?[0])
}
