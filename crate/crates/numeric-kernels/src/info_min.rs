//! Minimization over joints `P_XZ` with a fixed first marginal and a mutual
//! information budget `I(X;Z) ≤ R`.
//!
//! The free variable is the conditional `P_{Z|X}`. Points outside the budget
//! are pulled back along the segment toward the product coupling
//! (`P_{Z|X}(·|x) → P_Z` for every `x`), on which the `Z` marginal is constant
//! and the mutual information is convex and decreasing, so a bisection lands
//! on the budget boundary.

use prob_core::{mutual_information_slices, ProbVec, Result};
use rayon::prelude::*;

use crate::config::OptimizerConfig;
use crate::simplex::{grid_resolution, lattice, local_search, minimize_on_product_simplex};

#[derive(Clone, Debug, PartialEq)]
pub struct InfoMin {
    /// Row-major joint `P_XZ`.
    pub joint: Vec<f64>,
    /// Row-major conditional `P_{Z|X}`.
    pub kernel: Vec<f64>,
    pub value: f64,
    pub mutual_information: f64,
    pub evaluations: usize,
}

/// Joint `P(x) P_{Z|X}(z|x)` from a row-major conditional.
pub fn joint_from_kernel(p: &[f64], kernel: &[f64], side: usize) -> Vec<f64> {
    kernel
        .chunks(side)
        .zip(p)
        .flat_map(|(row, &px)| row.iter().map(move |&k| px * k))
        .collect()
}

fn info_of(p: &[f64], kernel: &[f64], side: usize) -> f64 {
    mutual_information_slices(&joint_from_kernel(p, kernel, side), p.len(), side)
}

/// Moves `kernel` toward the product coupling until `I(X;Z) ≤ budget`.
pub fn project_to_budget(p: &[f64], kernel: &mut [f64], side: usize, budget: f64) {
    if info_of(p, kernel, side) <= budget {
        return;
    }
    let mut marginal = vec![0.0; side];
    for (row, &px) in kernel.chunks(side).zip(p) {
        for (m, &k) in marginal.iter_mut().zip(row) {
            *m += px * k;
        }
    }
    let original = kernel.to_vec();
    let mix = |lam: f64, out: &mut [f64]| {
        for (o, (row, _)) in out.chunks_mut(side).zip(original.chunks(side).zip(p)) {
            for ((v, &k), &m) in o.iter_mut().zip(row).zip(&marginal) {
                *v = (1.0 - lam) * k + lam * m;
            }
        }
    };
    // Invariant: I(lo) > budget ≥ I(hi).
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut scratch = original.clone();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        mix(mid, &mut scratch);
        if info_of(p, &scratch, side) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mix(hi, kernel);
}

/// The answer when the objective is `+∞` on every point searched, reported
/// at the product coupling with uniform `Z`, which is always feasible.
fn infinite(p: &[f64], side: usize) -> InfoMin {
    let kernel = vec![1.0 / side as f64; p.len() * side];
    InfoMin {
        joint: joint_from_kernel(p, &kernel, side),
        kernel,
        value: f64::INFINITY,
        mutual_information: 0.0,
        evaluations: 0,
    }
}

/// Minimizes `objective(P_XZ)` over joints with `P_X = p` and
/// `I(X;Z) ≤ budget`. The objective receives the row-major joint. A
/// feasible point always exists, so an objective that is infinite wherever
/// it was probed yields value `+∞` rather than an error.
pub fn info_constrained_min<F>(
    objective: F,
    p: &ProbVec,
    side: usize,
    budget: f64,
    cfg: &OptimizerConfig,
) -> Result<InfoMin>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if !(budget >= 0.0) {
        return Err(prob_core::Error::Domain {
            name: "information budget",
            value: budget,
            domain: "[0, ∞)",
        });
    }
    let px = p.as_slice();
    let project = |k: &mut [f64]| project_to_budget(px, k, side, budget);
    let wrapped = |k: &[f64]| objective(&joint_from_kernel(px, k, side));
    let r = match minimize_on_product_simplex(&wrapped, px.len(), side, Some(&project), cfg) {
        Err(prob_core::Error::NoFiniteValue) => return Ok(infinite(px, side)),
        other => other?,
    };
    let joint = joint_from_kernel(px, &r.point, side);
    Ok(InfoMin {
        mutual_information: mutual_information_slices(&joint, px.len(), side),
        joint,
        kernel: r.point,
        value: r.value,
        evaluations: r.evaluations,
    })
}

/// [`info_constrained_min`] for several budgets at once.
///
/// The objective does not depend on the budget, so the coarse lattice over
/// `P_{Z|X}` is evaluated once. Each budget then refines its best feasible
/// lattice points together with the best lattice points pulled back onto its
/// budget. Falls back to independent searches when the lattice does not fit
/// the grid budget.
pub fn info_constrained_min_many<F>(
    objective: F,
    p: &ProbVec,
    side: usize,
    budgets: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Vec<InfoMin>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    if let Some(&bad) = budgets.iter().find(|b| !(**b >= 0.0)) {
        return Err(prob_core::Error::Domain {
            name: "information budget",
            value: bad,
            domain: "[0, ∞)",
        });
    }
    let px = p.as_slice();
    let rows = px.len();
    let Some(m) = grid_resolution(rows, side, cfg) else {
        return budgets
            .iter()
            .map(|&b| info_constrained_min(&objective, p, side, b, cfg))
            .collect();
    };
    let wrapped = |k: &[f64]| {
        let v = objective(&joint_from_kernel(px, k, side));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let cell = lattice(side, m);
    let total = cell.len().pow(rows as u32);
    let build = |mut idx: usize| {
        let mut k = Vec::with_capacity(rows * side);
        for _ in 0..rows {
            k.extend_from_slice(&cell[idx % cell.len()]);
            idx /= cell.len();
        }
        k
    };
    let scored: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let k = build(i);
            (wrapped(&k), info_of(px, &k, side))
        })
        .collect();
    let mut order: Vec<usize> = (0..total).filter(|&i| scored[i].0 < f64::INFINITY).collect();
    order.sort_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0).then(a.cmp(&b)));
    let keep = cfg.refinement_rounds;
    budgets
        .par_iter()
        .map(|&budget| {
            let project = |k: &mut [f64]| project_to_budget(px, k, side, budget);
            let mut starts: Vec<Vec<f64>> = order
                .iter()
                .filter(|&&i| scored[i].1 <= budget)
                .take(keep)
                .map(|&i| build(i))
                .collect();
            starts.extend(order.iter().filter(|&&i| scored[i].1 > budget).take(keep).map(|&i| build(i)));
            if starts.is_empty() {
                starts.push(vec![1.0 / side as f64; rows * side]);
            }
            let mut best: Option<(Vec<f64>, f64)> = None;
            let mut evaluations = 0;
            for s in starts {
                let (k, v, e) = local_search(&wrapped, Some(&project), s, side, 1.0 / m as f64, cfg.tol_simplex, false);
                evaluations += e;
                if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
                    best = Some((k, v));
                }
            }
            match best {
                Some((kernel, value)) if value < f64::INFINITY => {
                    let joint = joint_from_kernel(px, &kernel, side);
                    Ok(InfoMin {
                        mutual_information: mutual_information_slices(&joint, rows, side),
                        joint,
                        kernel,
                        value,
                        evaluations: evaluations + total,
                    })
                }
                _ => Ok(infinite(px, side)),
            }
        })
        .collect()
}
