//! Maximization over input laws for curve-level bounds.

use numeric_kernels::{minimize_on_product_simplex, OptimizerConfig};
use prob_core::{ChannelKernel, ProbVec, Result};

/// Crossover probability when `w` is a binary symmetric channel.
pub fn bsc_crossover(w: &ChannelKernel) -> Option<f64> {
    if w.inputs() != 2 || w.outputs() != 2 {
        return None;
    }
    let p = w.get(0, 1);
    ((w.get(1, 0) - p).abs() <= 1e-15).then_some(p)
}

/// Maximizes `f` over input laws. For a binary symmetric channel the uniform
/// law is used directly; otherwise a coarse simplex grid (16 points per
/// coordinate) is refined by pattern search to `1e-4`.
pub fn maximize_over_inputs<F>(w: &ChannelKernel, f: F, cfg: &OptimizerConfig) -> Result<(ProbVec, f64)>
where
    F: Fn(&ProbVec) -> Result<f64> + Sync,
{
    let n = w.inputs();
    if bsc_crossover(w).is_some() || n == 1 {
        let p = ProbVec::uniform(n);
        let v = f(&p)?;
        return Ok((p, v));
    }
    let coarse = OptimizerConfig {
        grid_points_per_dim: cfg.grid_points_per_dim.min(16),
        tol_simplex: cfg.tol_simplex.max(1e-4),
        ..cfg.clone()
    };
    let neg = |x: &[f64]| match ProbVec::normalized(x.to_vec()).and_then(|p| f(&p)) {
        Ok(v) => -v,
        Err(_) => f64::INFINITY,
    };
    let r = minimize_on_product_simplex(&neg, 1, n, None, &coarse)?;
    let p = ProbVec::normalized(r.point)?;
    Ok((p, -r.value))
}
