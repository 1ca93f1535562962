//! Multi-start coordinate ascent over auxiliary kernels `P_{U|XZ}`.
//!
//! The ascent updates one `(x, z)` row at a time by a simplex pattern search
//! with the other rows held fixed, and sweeps until a full pass gains less
//! than `tol_simplex`. The returned value is the best found over the seeded
//! restarts and therefore a lower bound on the true maximum.
//!
//! Restart 0 starts from the constant auxiliary (`U` independent of
//! everything), restart 1 from `U = X`, and later restarts from flat Dirichlet
//! draws. Restart `k` depends only on `(rng_seed, k)`, so the best value over
//! the first `k` restarts is monotone in `k`.

use std::cell::RefCell;

use prob_core::{Error, Result, PROB_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::OptimizerConfig;
use crate::simplex::local_search;

const MAX_SWEEPS: usize = 40;

/// A conditional law `P_{U|XZ}` with rows indexed by `x * |Z| + z`.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxiliaryDecomposition {
    kernel: Vec<f64>,
    inputs: usize,
    side: usize,
    aux: usize,
}

/// Auxiliary alphabet size sufficient for the max over `P_{U|XZ}`.
pub fn caratheodory_size(inputs: usize, side: usize) -> usize {
    inputs * inputs * side + 1
}

impl AuxiliaryDecomposition {
    pub fn new(kernel: Vec<f64>, inputs: usize, side: usize, aux: usize) -> Result<Self> {
        if aux == 0 || aux > caratheodory_size(inputs, side) {
            return Err(Error::ShapeMismatch(format!(
                "auxiliary alphabet of size {aux} outside 1..={}",
                caratheodory_size(inputs, side)
            )));
        }
        if kernel.len() != inputs * side * aux {
            return Err(Error::ShapeMismatch(format!(
                "auxiliary kernel needs {} entries, got {}",
                inputs * side * aux,
                kernel.len()
            )));
        }
        for (k, row) in kernel.chunks(aux).enumerate() {
            let total: f64 = row.iter().sum();
            if row.iter().any(|v| *v < 0.0 || !v.is_finite()) || (total - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "auxiliary row {k} is not a probability vector"
                )));
            }
        }
        Ok(Self {
            kernel,
            inputs,
            side,
            aux,
        })
    }

    /// `U` constant: every row is the point mass at `u = 0`.
    pub fn constant(inputs: usize, side: usize) -> Self {
        let aux = caratheodory_size(inputs, side);
        let mut kernel = vec![0.0; inputs * side * aux];
        kernel.iter_mut().step_by(aux).for_each(|v| *v = 1.0);
        Self {
            kernel,
            inputs,
            side,
            aux,
        }
    }

    /// `U = X`.
    pub fn revealing(inputs: usize, side: usize) -> Self {
        let aux = caratheodory_size(inputs, side);
        let mut kernel = vec![0.0; inputs * side * aux];
        for x in 0..inputs {
            for z in 0..side {
                kernel[(x * side + z) * aux + x] = 1.0;
            }
        }
        Self {
            kernel,
            inputs,
            side,
            aux,
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }
    pub fn side(&self) -> usize {
        self.side
    }
    pub fn aux(&self) -> usize {
        self.aux
    }
    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn get(&self, x: usize, z: usize, u: usize) -> f64 {
        self.kernel[(x * self.side + z) * self.aux + u]
    }

    pub fn row(&self, x: usize, z: usize) -> &[f64] {
        let start = (x * self.side + z) * self.aux;
        &self.kernel[start..start + self.aux]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxMax {
    pub argmax: AuxiliaryDecomposition,
    pub value: f64,
    /// Best value reached by each restart, in restart order.
    pub per_restart: Vec<f64>,
}

fn ascend<F>(
    objective: &F,
    mut current: AuxiliaryDecomposition,
    cfg: &OptimizerConfig,
) -> (AuxiliaryDecomposition, f64)
where
    F: Fn(&AuxiliaryDecomposition) -> f64 + ?Sized,
{
    let aux = current.aux;
    let rows = current.inputs * current.side;
    let mut value = objective(&current);
    if value.is_nan() {
        value = f64::NEG_INFINITY;
    }
    let mut step = 0.5;
    for _ in 0..MAX_SWEEPS {
        let before = value;
        for r in 0..rows {
            let range = r * aux..(r + 1) * aux;
            let start = current.kernel[range.clone()].to_vec();
            let probe = RefCell::new(current.clone());
            let row_objective = |row: &[f64]| {
                let mut p = probe.borrow_mut();
                p.kernel[range.clone()].copy_from_slice(row);
                objective(&p)
            };
            let (row, v, _) = local_search(&row_objective, None, start, aux, step, cfg.tol_simplex, true);
            if v > value {
                current.kernel[range.clone()].copy_from_slice(&row);
                value = v;
            }
        }
        // Later sweeps only need to polish.
        step = (step * 0.25).max(16.0 * cfg.tol_simplex);
        if value - before <= cfg.tol_simplex * value.abs().max(1.0) {
            break;
        }
    }
    (current, value)
}

fn dirichlet_start(inputs: usize, side: usize, rng: &mut ChaCha8Rng) -> AuxiliaryDecomposition {
    let aux = caratheodory_size(inputs, side);
    let mut kernel = Vec::with_capacity(inputs * side * aux);
    for _ in 0..inputs * side {
        let e: Vec<f64> = (0..aux).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = e.iter().sum();
        kernel.extend(e.iter().map(|v| v / total));
    }
    AuxiliaryDecomposition {
        kernel,
        inputs,
        side,
        aux,
    }
}

/// Best value over `cfg.restarts` seeded coordinate-ascent runs.
pub fn maximize_over_aux<F>(objective: F, inputs: usize, side: usize, cfg: &OptimizerConfig) -> Result<AuxMax>
where
    F: Fn(&AuxiliaryDecomposition) -> f64 + Sync,
{
    cfg.validate()?;
    let runs: Vec<(AuxiliaryDecomposition, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let start = match k {
                0 => AuxiliaryDecomposition::constant(inputs, side),
                1 => AuxiliaryDecomposition::revealing(inputs, side),
                _ => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.derived_seed(k as u64));
                    dirichlet_start(inputs, side, &mut rng)
                }
            };
            ascend(&objective, start, cfg)
        })
        .collect();
    let per_restart = runs.iter().map(|(_, v)| *v).collect();
    let (argmax, value) = runs
        .into_iter()
        .reduce(|best, cand| if cand.1 > best.1 { cand } else { best })
        .expect("at least one restart");
    Ok(AuxMax {
        argmax,
        value,
        per_restart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_objective() {
        let cfg = OptimizerConfig { restarts: 3, ..Default::default() };
        let r = maximize_over_aux(|_| 1.25, 2, 2, &cfg).unwrap();
        assert_eq!(r.value, 1.25);
        assert_eq!(r.argmax.aux(), 9);
    }

    #[test]
    fn separable_objective_reaches_vertex() {
        // Reward mass on u = 3 in every row.
        let cfg = OptimizerConfig { restarts: 4, ..Default::default() };
        let r = maximize_over_aux(
            |a: &AuxiliaryDecomposition| (0..2).flat_map(|x| (0..2).map(move |z| (x, z))).map(|(x, z)| a.get(x, z, 3)).sum(),
            2,
            2,
            &cfg,
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_oversized_alphabet() {
        assert!(AuxiliaryDecomposition::new(vec![0.1; 10], 1, 1, 10).is_err());
    }

    #[test]
    fn restart_prefix_is_monotone_and_deterministic() {
        let obj = |a: &AuxiliaryDecomposition| {
            // A nonconcave objective: reward agreement of rows on any symbol.
            let mut v = 0.0;
            for u in 0..a.aux() {
                v += a.get(0, 0, u) * a.get(1, 0, u) * (1.0 + u as f64 * 0.1);
            }
            v
        };
        let mut last = f64::NEG_INFINITY;
        for restarts in 1..=5 {
            let cfg = OptimizerConfig { restarts, tol_simplex: 1e-5, ..Default::default() };
            let a = maximize_over_aux(obj, 2, 1, &cfg).unwrap();
            let b = maximize_over_aux(obj, 2, 1, &cfg).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert!(a.value >= last);
            last = a.value;
        }
    }
}
