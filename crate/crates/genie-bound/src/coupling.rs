//! Pair laws `P_{XZX̃}` induced by an auxiliary variable.
//!
//! With `X̃ − (U,Z) − X` and `P_{X̃ZU} = P_{XZU}`, the triple law is
//!
//! ```text
//! c_z(x, x̃) = Σ_u P_XZU(x,z,u) P_XZU(x̃,z,u) / P_ZU(z,u),
//! ```
//!
//! which is symmetric in `(x, x̃)` and has both marginals equal to `P_XZ`.

use numeric_kernels::AuxiliaryDecomposition;
use prob_core::{Error, Result};

use crate::channel::ConditionalChannel;

/// Weights `c_z(x, x̃)` stored as `[z][x][x̃]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCoupling {
    inputs: usize,
    side: usize,
    weights: Vec<f64>,
}

fn check_joint(p_xz: &[f64], inputs: usize, side: usize) -> Result<()> {
    if p_xz.len() != inputs * side {
        return Err(Error::ShapeMismatch(format!(
            "joint P_XZ needs {} entries, got {}",
            inputs * side,
            p_xz.len()
        )));
    }
    Ok(())
}

impl PairCoupling {
    /// The coupling realised by `P_{U|XZ}` on top of the joint `P_XZ`
    /// (row-major `[x][z]`).
    pub fn from_aux(p_xz: &[f64], aux: &AuxiliaryDecomposition) -> Result<Self> {
        let (nx, nz, nu) = (aux.inputs(), aux.side(), aux.aux());
        check_joint(p_xz, nx, nz)?;
        let mut weights = vec![0.0; nz * nx * nx];
        let mut mass = vec![0.0; nx];
        for z in 0..nz {
            for u in 0..nu {
                for (x, m) in mass.iter_mut().enumerate() {
                    *m = p_xz[x * nz + z] * aux.get(x, z, u);
                }
                let total: f64 = mass.iter().sum();
                if total <= 0.0 {
                    continue;
                }
                for x in 0..nx {
                    for xt in 0..nx {
                        weights[(z * nx + x) * nx + xt] += mass[x] * mass[xt] / total;
                    }
                }
            }
        }
        Ok(Self { inputs: nx, side: nz, weights })
    }

    /// `U` constant: `X` and `X̃` conditionally independent given `Z`.
    pub fn independent(p_xz: &[f64], inputs: usize, side: usize) -> Result<Self> {
        check_joint(p_xz, inputs, side)?;
        let mut weights = vec![0.0; side * inputs * inputs];
        for z in 0..side {
            let pz: f64 = (0..inputs).map(|x| p_xz[x * side + z]).sum();
            if pz <= 0.0 {
                continue;
            }
            for x in 0..inputs {
                for xt in 0..inputs {
                    weights[(z * inputs + x) * inputs + xt] = p_xz[x * side + z] * p_xz[xt * side + z] / pz;
                }
            }
        }
        Ok(Self { inputs, side, weights })
    }

    /// Direct construction from `[z][x][x̃]` weights.
    pub fn from_weights(weights: Vec<f64>, inputs: usize, side: usize) -> Result<Self> {
        if weights.len() != side * inputs * inputs {
            return Err(Error::ShapeMismatch(format!(
                "pair coupling needs {} weights, got {}",
                side * inputs * inputs,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidDistribution("pair coupling weights must be finite and nonnegative".into()));
        }
        Ok(Self { inputs, side, weights })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, z: usize, x: usize, xt: usize) -> f64 {
        self.weights[(z * self.inputs + x) * self.inputs + xt]
    }

    /// Nonzero entries as `(z, x, x̃, weight)`, diagonal included.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let n = self.inputs;
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(move |(k, &w)| (k / (n * n), (k / n) % n, k % n, w))
    }

    /// `Pr(X ≠ X̃)`.
    pub fn mismatch_mass(&self) -> f64 {
        self.support().filter(|(_, x, xt, _)| x != xt).map(|(.., w)| w).sum()
    }
}

/// `Σ c_z(x,x̃) Σ_y V(y|x,z,x̃) log[V(y|x,z,x̃) / W(y|x,z)]` for a
/// conditional `V` stored as `[x][z][x̃][y]`. Rows with zero weight are
/// skipped; an absolute-continuity failure on a weighted row gives `+∞`.
pub fn phi_divergence(coupling: &PairCoupling, v: &[f64], w: &ConditionalChannel) -> Result<f64> {
    let (nx, nz, ny) = (coupling.inputs(), coupling.side(), w.outputs());
    if v.len() != nx * nz * nx * ny || w.inputs() != nx || w.side() != nz {
        return Err(Error::ShapeMismatch(format!(
            "divergence needs V of shape {nx}x{nz}x{nx}x{ny} over a matching channel"
        )));
    }
    let mut total = 0.0;
    for (z, x, xt, c) in coupling.support() {
        let base = w.row_or_err(x, z)?;
        let start = ((x * nz + z) * nx + xt) * ny;
        total += c * prob_core::kl_slices(&v[start..start + ny], base);
    }
    Ok(total)
}
