//! Direct search over products of probability simplices.
//!
//! A point is a row-major buffer of `rows` probability vectors of length
//! `cols`. The search evaluates a lattice grid (when it fits the budget),
//! refines the best cells by a pattern search that moves mass between two
//! entries of one row, and halves the step whenever a full sweep fails to
//! improve. Moves are scanned in lexicographic `(row, from, to)` order and the
//! first improving move is taken, which makes the search deterministic.

use prob_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::OptimizerConfig;

/// Largest number of lattice points evaluated in the coarse grid stage.
pub const GRID_BUDGET: usize = 1 << 16;
/// Upper limit on objective evaluations per local search.
const LOCAL_EVAL_BUDGET: usize = 400_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexMin {
    /// Row-major argmin.
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Optional map applied to every trial point before evaluation (for example a
/// projection onto a convex feasible subset).
pub type Projection<'a> = &'a (dyn Fn(&mut [f64]) + Sync);

/// Lattice points `k/m` on the simplex of dimension `cols`.
pub(crate) fn lattice(cols: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(cols: usize, left: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() + 1 == cols {
            prefix.push(left);
            out.push(prefix.iter().map(|&k| k as f64 / m as f64).collect());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(cols, left - k, m, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(cols, m, m, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Largest lattice resolution whose product grid fits [`GRID_BUDGET`].
pub(crate) fn grid_resolution(rows: usize, cols: usize, cfg: &OptimizerConfig) -> Option<usize> {
    let mut m = cfg.grid_points_per_dim.saturating_sub(1).max(1);
    loop {
        let per_row = binomial(m + cols - 1, cols - 1);
        if per_row.powi(rows as i32) <= GRID_BUDGET as f64 {
            return Some(m);
        }
        if m == 1 {
            return None;
        }
        m -= 1;
    }
}

fn random_point(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        // Flat Dirichlet draw via normalized exponentials.
        let e: Vec<f64> = (0..cols).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = e.iter().sum();
        x.extend(e.iter().map(|v| v / total));
    }
    x
}

/// Pattern search from `start`; returns the local minimizer, its value and
/// the number of evaluations.
pub(crate) fn local_search<F>(
    objective: &F,
    project: Option<Projection<'_>>,
    start: Vec<f64>,
    cols: usize,
    step0: f64,
    tol: f64,
    maximize: bool,
) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let sign = if maximize { -1.0 } else { 1.0 };
    let eval = |p: &[f64]| {
        let v = sign * objective(p);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut x = start;
    if let Some(pr) = project {
        pr(&mut x);
    }
    let mut fx = eval(&x);
    let mut evals = 1;
    let rows = x.len() / cols;
    let mut step = step0;
    let mut trial = x.clone();
    while step >= tol && evals < LOCAL_EVAL_BUDGET {
        let mut improved = false;
        for r in 0..rows {
            for i in 0..cols {
                for j in 0..cols {
                    if i == j {
                        continue;
                    }
                    let mut amount = step.min(x[r * cols + i]);
                    // Keep extending a successful move with doubled steps.
                    while amount > 0.0 && evals < LOCAL_EVAL_BUDGET {
                        trial.copy_from_slice(&x);
                        trial[r * cols + i] -= amount;
                        trial[r * cols + j] += amount;
                        if trial[r * cols + i] < 1e-300 {
                            trial[r * cols + i] = 0.0;
                        }
                        if let Some(pr) = project {
                            pr(&mut trial);
                        }
                        let v = eval(&trial);
                        evals += 1;
                        if v < fx {
                            std::mem::swap(&mut x, &mut trial);
                            fx = v;
                            improved = true;
                            amount = (2.0 * amount).min(x[r * cols + i]);
                        } else {
                            break;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, sign * fx, evals)
}

/// Grid-plus-refinement minimization over `rows` stacked simplices of
/// dimension `cols`, with an optional projection applied to every trial point.
pub fn minimize_on_product_simplex<F>(
    objective: &F,
    rows: usize,
    cols: usize,
    project: Option<Projection<'_>>,
    cfg: &OptimizerConfig,
) -> Result<SimplexMin>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    cfg.validate()?;
    if rows == 0 || cols == 0 {
        return Err(Error::ShapeMismatch("empty simplex product".into()));
    }
    let clean = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    let (starts, step0, mut evaluations): (Vec<Vec<f64>>, f64, usize) =
        match grid_resolution(rows, cols, cfg) {
            Some(m) => {
                let cell = lattice(cols, m);
                let total = cell.len().pow(rows as u32);
                let build = |mut idx: usize| {
                    let mut p = Vec::with_capacity(rows * cols);
                    for _ in 0..rows {
                        p.extend_from_slice(&cell[idx % cell.len()]);
                        idx /= cell.len();
                    }
                    if let Some(pr) = project {
                        pr(&mut p);
                    }
                    p
                };
                let values: Vec<f64> = (0..total)
                    .into_par_iter()
                    .map(|k| clean(objective(&build(k))))
                    .collect();
                let mut order: Vec<usize> = (0..total).filter(|&k| values[k] < f64::INFINITY).collect();
                if order.is_empty() {
                    return Err(Error::NoFiniteValue);
                }
                order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
                let starts = order
                    .into_iter()
                    .take(cfg.refinement_rounds)
                    .map(build)
                    .collect();
                (starts, 1.0 / m as f64, total)
            }
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.derived_seed(0xD1CE));
                let mut starts: Vec<Vec<f64>> = Vec::new();
                let mut uniform = vec![1.0 / cols as f64; rows * cols];
                if let Some(pr) = project {
                    pr(&mut uniform);
                }
                starts.push(uniform);
                while starts.len() < cfg.restarts.max(cfg.refinement_rounds) {
                    let mut p = random_point(rows, cols, &mut rng);
                    if let Some(pr) = project {
                        pr(&mut p);
                    }
                    starts.push(p);
                }
                (starts, 0.25, 0)
            }
        };
    let results: Vec<(Vec<f64>, f64, usize)> = starts
        .into_par_iter()
        .map(|s| local_search(objective, project, s, cols, step0, cfg.tol_simplex, false))
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (p, v, e) in results {
        evaluations += e;
        if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
            best = Some((p, v));
        }
    }
    match best {
        Some((point, value)) if value < f64::INFINITY => Ok(SimplexMin {
            point,
            value,
            evaluations,
        }),
        _ => Err(Error::NoFiniteValue),
    }
}

/// Minimizes `objective` over conditional laws with `rows` rows of `cols`
/// entries each (row-major buffer).
pub fn min_over_conditional_simplex<F>(
    objective: F,
    rows: usize,
    cols: usize,
    cfg: &OptimizerConfig,
) -> Result<SimplexMin>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    minimize_on_product_simplex(&objective, rows, cols, None, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use prob_core::kl_slices;

    #[test]
    fn lattice_sizes() {
        assert_eq!(lattice(2, 4).len(), 5);
        assert_eq!(lattice(3, 2).len(), 6);
        for p in lattice(3, 5) {
            assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn divergence_minimized_at_channel() {
        let w = [0.9, 0.1, 0.3, 0.7];
        let p = [0.4, 0.6];
        let obj = |v: &[f64]| p[0] * kl_slices(&v[..2], &w[..2]) + p[1] * kl_slices(&v[2..], &w[2..]);
        let r = min_over_conditional_simplex(obj, 2, 2, &OptimizerConfig::default()).unwrap();
        assert!(r.value < 1e-11);
        for (a, b) in r.point.iter().zip(&w) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-5);
        }
    }

    #[test]
    fn linear_objective_hits_a_vertex() {
        let c = [0.3, -0.2, 0.5, 1.0, 0.1, 0.4];
        let obj = |v: &[f64]| v.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>();
        let r = min_over_conditional_simplex(obj, 2, 3, &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(r.value, -0.2 + 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.point[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.point[4], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn infinite_everywhere_is_an_error() {
        let r = min_over_conditional_simplex(|_| f64::INFINITY, 1, 2, &OptimizerConfig::default());
        assert_eq!(r.unwrap_err(), Error::NoFiniteValue);
    }

    #[test]
    fn large_shapes_fall_back_to_random_starts() {
        let target: Vec<f64> = (0..10).flat_map(|_| [0.1, 0.2, 0.3, 0.4]).collect();
        let obj = |v: &[f64]| v.chunks(4).zip(target.chunks(4)).map(|(a, b)| kl_slices(a, b)).sum::<f64>();
        assert!(grid_resolution(10, 4, &OptimizerConfig::default()).is_none());
        let r = min_over_conditional_simplex(obj, 10, 4, &OptimizerConfig::default()).unwrap();
        assert!(r.value < 1e-9, "value {}", r.value);
    }
}
