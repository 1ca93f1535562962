//! Search over couplings `V_{XX̃}` whose two marginals both equal `P`.
//!
//! Binary inputs leave one free parameter: `V = [[P0 − t, t], [t, P1 − t]]`
//! with `t ∈ [0, min(P0, P1)]`, which is scanned and then refined by golden
//! section. Larger alphabets use a pattern search over the moves that add
//! `±a` on a 2×2 cycle of cells (these keep both marginals fixed), started
//! from the product coupling, the diagonal coupling and seeded random
//! couplings.
//!
//! With a budget `I(X;X̃) ≤ R`, trial points are pulled toward `P ⊗ P`;
//! mutual information is convex along that segment and zero at its end.

use numeric_kernels::{bisect, maximize_scan_1d, OptimizerConfig};
use prob_core::{mutual_information_slices, Error, ProbVec, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const PATTERN_EVAL_BUDGET: usize = 20_000;
const SINKHORN_ROUNDS: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMin {
    /// Row-major `V(x, x̃)`.
    pub coupling: Vec<f64>,
    pub value: f64,
}

pub fn product_coupling(p: &[f64]) -> Vec<f64> {
    p.iter().flat_map(|&a| p.iter().map(move |&b| a * b)).collect()
}

pub fn coupling_information(v: &[f64], k: usize) -> f64 {
    mutual_information_slices(v, k, k)
}

fn mix_toward_product(v: &mut [f64], product: &[f64], k: usize, budget: f64) {
    if coupling_information(v, k) <= budget {
        return;
    }
    let original = v.to_vec();
    let at = |lam: f64, out: &mut [f64]| {
        for ((o, &a), &b) in out.iter_mut().zip(&original).zip(product) {
            *o = (1.0 - lam) * a + lam * b;
        }
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut scratch = original.clone();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        at(mid, &mut scratch);
        if coupling_information(&scratch, k) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(hi, v);
}

fn binary_coupling(p: &[f64], t: f64) -> Vec<f64> {
    vec![(p[0] - t).max(0.0), t, t, (p[1] - t).max(0.0)]
}

fn binary_search<F>(p: &[f64], budget: Option<f64>, objective: &F, cfg: &OptimizerConfig) -> Result<CouplingMin>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let t_max = p[0].min(p[1]);
    let t_prod = p[0] * p[1];
    let (mut lo, mut hi) = (0.0, t_max);
    if let Some(r) = budget {
        let excess = |t: f64| coupling_information(&binary_coupling(p, t), 2) - r;
        if excess(lo) > 0.0 {
            lo = bisect(excess, lo, t_prod, 1e-15)?;
        }
        if excess(hi) > 0.0 {
            hi = bisect(excess, t_prod, hi, 1e-15)?;
        }
        lo = lo.min(t_prod);
        hi = hi.max(t_prod);
    }
    if hi - lo <= 1e-15 {
        let v = binary_coupling(p, t_prod);
        let value = objective(&v);
        return Ok(CouplingMin { coupling: v, value });
    }
    let neg = |t: f64| {
        let v = -objective(&binary_coupling(p, t));
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let m = maximize_scan_1d(neg, lo, hi, cfg.grid_points_per_dim, cfg.tol_1d.max(1e-12))?;
    if m.value == f64::NEG_INFINITY {
        return Err(Error::NoFiniteValue);
    }
    Ok(CouplingMin {
        coupling: binary_coupling(p, m.arg),
        value: -m.value,
    })
}

fn sinkhorn(p: &[f64], seed: u64) -> Vec<f64> {
    let k = p.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..k * k)
        .map(|i| {
            let (a, b) = (i / k, i % k);
            if p[a] > 0.0 && p[b] > 0.0 {
                -(1.0 - rng.gen::<f64>()).ln()
            } else {
                0.0
            }
        })
        .collect();
    for _ in 0..SINKHORN_ROUNDS {
        for a in 0..k {
            let s: f64 = v[a * k..(a + 1) * k].iter().sum();
            if s > 0.0 {
                v[a * k..(a + 1) * k].iter_mut().for_each(|x| *x *= p[a] / s);
            }
        }
        for b in 0..k {
            let s: f64 = (0..k).map(|a| v[a * k + b]).sum();
            if s > 0.0 {
                (0..k).for_each(|a| v[a * k + b] *= p[b] / s);
            }
        }
    }
    v
}

fn pattern_search<F>(
    start: Vec<f64>,
    k: usize,
    project: &(dyn Fn(&mut [f64]) + Sync),
    objective: &F,
    tol: f64,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let eval = |v: &[f64]| {
        let f = objective(v);
        if f.is_nan() {
            f64::INFINITY
        } else {
            f
        }
    };
    let mut x = start;
    project(&mut x);
    let mut fx = eval(&x);
    let mut evals = 1;
    let mut step = 0.25 * x.iter().cloned().fold(0.0, f64::max);
    let cycles: Vec<(usize, usize, usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).flat_map(move |m| (0..k).flat_map(move |j| (j + 1..k).map(move |l| (i, m, j, l)))))
        .collect();
    while step >= tol && evals < PATTERN_EVAL_BUDGET {
        let mut improved = false;
        for &(i, m, j, l) in &cycles {
            for sign in [1.0, -1.0] {
                // +a on (i,j),(m,l) and −a on (i,l),(m,j), or the reverse.
                let (up, down) = if sign > 0.0 {
                    ([i * k + j, m * k + l], [i * k + l, m * k + j])
                } else {
                    ([i * k + l, m * k + j], [i * k + j, m * k + l])
                };
                let room = x[down[0]].min(x[down[1]]);
                let mut amount = step.min(room);
                while amount > 0.0 && evals < PATTERN_EVAL_BUDGET {
                    let mut trial = x.clone();
                    up.iter().for_each(|&c| trial[c] += amount);
                    down.iter().for_each(|&c| trial[c] = (trial[c] - amount).max(0.0));
                    project(&mut trial);
                    let v = eval(&trial);
                    evals += 1;
                    if v < fx {
                        x = trial;
                        fx = v;
                        improved = true;
                        amount = (2.0 * amount).min(x[down[0]].min(x[down[1]]));
                    } else {
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Minimizes `objective` over couplings with both marginals `p` and, when a
/// budget is given, `I(X;X̃) ≤ budget`.
pub fn minimize_over_couplings<F>(
    p: &ProbVec,
    budget: Option<f64>,
    objective: &F,
    cfg: &OptimizerConfig,
) -> Result<CouplingMin>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    cfg.validate()?;
    if let Some(r) = budget {
        if r.is_nan() || r < 0.0 {
            return Err(Error::Domain {
                name: "coupling budget",
                value: r,
                domain: "[0, ∞)",
            });
        }
    }
    let k = p.len();
    let product = product_coupling(p);
    match k {
        1 => {
            let value = objective(&product);
            Ok(CouplingMin { coupling: product, value })
        }
        2 => binary_search(p, budget, objective, cfg),
        _ => {
            let project = |v: &mut [f64]| {
                if let Some(r) = budget {
                    mix_toward_product(v, &product, k, r);
                }
            };
            let mut diagonal = vec![0.0; k * k];
            (0..k).for_each(|a| diagonal[a * k + a] = p[a]);
            let mut starts = vec![product.clone(), diagonal];
            starts.extend((0..cfg.refinement_rounds).map(|r| sinkhorn(p, cfg.derived_seed(0xC0 + r as u64))));
            let runs: Vec<(Vec<f64>, f64)> = starts
                .into_par_iter()
                .map(|s| pattern_search(s, k, &project, objective, cfg.tol_simplex))
                .collect();
            let (coupling, value) = runs
                .into_iter()
                .reduce(|a, b| if b.1 < a.1 { b } else { a })
                .expect("nonempty start set");
            if value == f64::INFINITY {
                return Err(Error::NoFiniteValue);
            }
            Ok(CouplingMin { coupling, value })
        }
    }
}
