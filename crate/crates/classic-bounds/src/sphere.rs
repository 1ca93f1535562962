//! Sphere-packing exponent
//!
//! `E_sp(R, P) = min { D(V ‖ W | P) : I(P, V) ≤ R }`.
//!
//! Binary symmetric channels with uniform input use the one-dimensional
//! reduction `E_sp = D(δ ‖ p)` with `log 2 − h(δ) = R`. Every other channel
//! goes through the Lagrange dual
//! `sup_{ρ ≥ 0} [min_Q −(1+ρ) Σ_x P(x) log Σ_y W(y|x)^{1/(1+ρ)} Q(y)^{ρ/(1+ρ)} − ρR]`,
//! with the inner minimum computed by alternating updates of the test channel
//! and `Q`.

use numeric_kernels::{bisect, info_constrained_min, maximize_concave_1d, OptimizerConfig};
use prob_core::{binary_entropy, binary_kl, kl_slices, mutual_information, ChannelKernel, Error, JointDist, ProbVec, Result};

use crate::curve::{BoundCurve, CurveMeta, Exponent};
use crate::inputs::{bsc_crossover, maximize_over_inputs};

const ALTERNATION_LIMIT: usize = 20_000;

fn check_rate(r: f64) -> Result<()> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Domain {
            name: "rate",
            value: r,
            domain: "[0, ∞)",
        });
    }
    Ok(())
}

fn check_input(p: &ProbVec, w: &ChannelKernel) -> Result<()> {
    if p.len() != w.inputs() {
        return Err(Error::AlphabetMismatch {
            left: p.len(),
            right: w.inputs(),
        });
    }
    Ok(())
}

/// `I(P × W)` in nats.
pub fn mutual_information_of(p: &ProbVec, w: &ChannelKernel) -> Result<f64> {
    mutual_information(&JointDist::from_marginal_and_kernel(p, w)?)
}

/// `δ ∈ [0, 1/2]` with `log 2 − h(δ) = r` (nats); `r ≥ log 2` gives 0.
pub fn delta_gv(r: f64) -> Result<f64> {
    check_rate(r)?;
    let ln2 = std::f64::consts::LN_2;
    if r >= ln2 {
        return Ok(0.0);
    }
    if r == 0.0 {
        return Ok(0.5);
    }
    bisect(|d| ln2 - binary_entropy(d).unwrap_or(0.0) - r, 0.0, 0.5, 1e-16)
}

/// Sphere-packing exponent of a binary symmetric channel at uniform input.
pub fn e_sp_bsc(r: f64, crossover: f64) -> Result<f64> {
    check_rate(r)?;
    let p = crossover.min(1.0 - crossover);
    let capacity = std::f64::consts::LN_2 - binary_entropy(p)?;
    if r >= capacity {
        return Ok(0.0);
    }
    let delta = bisect(
        |d| std::f64::consts::LN_2 - binary_entropy(d).unwrap_or(0.0) - r,
        p,
        0.5,
        1e-16,
    )?;
    Ok(binary_kl(delta, p))
}

/// `min_Q −(1+ρ) Σ_x P(x) log Σ_y W^{1/(1+ρ)} Q^{ρ/(1+ρ)}`.
pub fn e0_constant_composition(rho: f64, p: &ProbVec, w: &ChannelKernel) -> f64 {
    let a = 1.0 / (1.0 + rho);
    let b = rho / (1.0 + rho);
    let ny = w.outputs();
    let mut q: Vec<f64> = w.output_law(p).map(ProbVec::into_inner).unwrap_or_else(|_| vec![1.0 / ny as f64; ny]);
    let objective = |q: &[f64]| -> f64 {
        -(1.0 + rho)
            * p.iter()
                .zip(w.rows())
                .filter(|(&px, _)| px > 0.0)
                .map(|(&px, row)| {
                    let s: f64 = row.iter().zip(q).map(|(&wy, &qy)| wy.powf(a) * qy.powf(b)).sum();
                    px * s.ln()
                })
                .sum::<f64>()
    };
    let mut value = objective(&q);
    for _ in 0..ALTERNATION_LIMIT {
        let mut next = vec![0.0; ny];
        for (&px, row) in p.iter().zip(w.rows()) {
            if px <= 0.0 {
                continue;
            }
            let tilted: Vec<f64> = row.iter().zip(&q).map(|(&wy, &qy)| wy.powf(a) * qy.powf(b)).collect();
            let z: f64 = tilted.iter().sum();
            for (n, t) in next.iter_mut().zip(&tilted) {
                *n += px * t / z;
            }
        }
        let v = objective(&next);
        q = next;
        let gain = value - v;
        value = v;
        if gain <= 1e-15 * value.abs().max(1e-300) {
            break;
        }
    }
    value
}

/// Sphere-packing exponent through the Lagrange dual.
pub fn e_sp_dual(r: f64, p: &ProbVec, w: &ChannelKernel, cfg: &OptimizerConfig) -> Result<Exponent> {
    check_rate(r)?;
    check_input(p, w)?;
    let m = maximize_concave_1d(|rho| e0_constant_composition(rho, p, w) - rho * r, 0.0, cfg.s_max_cap, cfg.tol_1d)?;
    Ok(Exponent {
        value: m.value.max(0.0),
        hit_cap: m.hit_cap,
    })
}

/// Sphere-packing exponent by direct search over test channels, used as an
/// independent check of the dual.
pub fn e_sp_primal(r: f64, p: &ProbVec, w: &ChannelKernel, cfg: &OptimizerConfig) -> Result<f64> {
    check_rate(r)?;
    check_input(p, w)?;
    let ny = w.outputs();
    let objective = |joint: &[f64]| -> f64 {
        joint
            .chunks(ny)
            .zip(p.iter())
            .zip(w.rows())
            .filter(|((_, &px), _)| px > 0.0)
            .map(|((row, &px), wr)| {
                let cond: Vec<f64> = row.iter().map(|v| v / px).collect();
                px * kl_slices(&cond, wr)
            })
            .sum()
    };
    Ok(info_constrained_min(objective, p, ny, r, cfg)?.value)
}

/// `E_sp(R, P, W)`: BSC reduction when it applies, the dual otherwise.
pub fn e_sp(r: f64, p: &ProbVec, w: &ChannelKernel, cfg: &OptimizerConfig) -> Result<Exponent> {
    check_rate(r)?;
    check_input(p, w)?;
    if r >= mutual_information_of(p, w)? {
        return Ok(Exponent::exact(0.0));
    }
    if let Some(cross) = bsc_crossover(w) {
        let uniform = (p[0] - 0.5).abs() <= 1e-15;
        if uniform && cross > 0.0 && cross < 1.0 {
            return Ok(Exponent::exact(e_sp_bsc(r, cross)?));
        }
    }
    e_sp_dual(r, p, w, cfg)
}

/// `max_P E_sp(R, P)` over a rate grid.
pub fn e_sp_curve(w: &ChannelKernel, rates: &[f64], cfg: &OptimizerConfig) -> Result<BoundCurve> {
    use rayon::prelude::*;
    let values: Vec<Result<(f64, bool)>> = rates
        .par_iter()
        .map(|&r| {
            let hit = std::sync::atomic::AtomicBool::new(false);
            let (_, v) = maximize_over_inputs(
                w,
                |p| {
                    let e = e_sp(r, p, w, cfg)?;
                    if e.hit_cap {
                        hit.store(true, std::sync::atomic::Ordering::Relaxed);
                    }
                    Ok(e.value)
                },
                cfg,
            )?;
            Ok((v, hit.load(std::sync::atomic::Ordering::Relaxed)))
        })
        .collect();
    let mut meta = CurveMeta::default();
    let mut points = Vec::with_capacity(rates.len());
    for (&r, v) in rates.iter().zip(values) {
        let (value, hit) = v?;
        if hit {
            meta.hit_cap_at.push(r);
        }
        points.push((r, value));
    }
    BoundCurve::new("E_sp", points, meta)
}
