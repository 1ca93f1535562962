//! The conditional channel `W(y|x,z)` seen by a receiver that also knows the
//! side output `Z`, and the pairwise distance `d_{z,s}(x, x̃)` built on it.

use numeric_kernels::log_sum_exp;
use prob_core::{kl_slices, BroadcastKernel, ChannelKernel, DecodingMetric, Error, ProbVec, Result};

/// Rows `W(·|x,z)` indexed by `x * |Z| + z`, with their logarithms cached.
/// A row is `None` when `W(z|x) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalChannel {
    inputs: usize,
    outputs: usize,
    side: usize,
    rows: Vec<Option<ProbVec>>,
    log_rows: Vec<Option<Vec<f64>>>,
    side_law: ChannelKernel,
}

impl ConditionalChannel {
    pub fn from_broadcast(wyz: &BroadcastKernel) -> Result<Self> {
        Self::build(
            wyz.inputs(),
            wyz.outputs_y(),
            wyz.outputs_z(),
            wyz.y_given_xz()?,
            wyz.z_given_x()?,
        )
    }

    /// `W(y|x,z) = W(y|x)` for every `z`: the side output carries no
    /// information about `Y`. The side law is uniform.
    pub fn replicated(w: &ChannelKernel, side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::ShapeMismatch("side alphabet must be nonempty".into()));
        }
        let rows = (0..w.inputs())
            .flat_map(|x| (0..side).map(move |_| x))
            .map(|x| Some(w.row(x).clone()))
            .collect();
        let uniform = vec![vec![1.0 / side as f64; side]; w.inputs()];
        Self::build(w.inputs(), w.outputs(), side, rows, ChannelKernel::new(uniform)?)
    }

    fn build(
        inputs: usize,
        outputs: usize,
        side: usize,
        rows: Vec<Option<ProbVec>>,
        side_law: ChannelKernel,
    ) -> Result<Self> {
        let log_rows = rows
            .iter()
            .map(|r| r.as_ref().map(|r| r.iter().map(|v| v.ln()).collect()))
            .collect();
        Ok(Self {
            inputs,
            outputs,
            side,
            rows,
            log_rows,
            side_law,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }
    pub fn outputs(&self) -> usize {
        self.outputs
    }
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn row(&self, x: usize, z: usize) -> Option<&ProbVec> {
        self.rows[x * self.side + z].as_ref()
    }

    pub fn row_or_err(&self, x: usize, z: usize) -> Result<&ProbVec> {
        self.row(x, z).ok_or(Error::UndefinedRow { x, z })
    }

    /// The side channel `W(z|x)`.
    pub fn side_law(&self) -> &ChannelKernel {
        &self.side_law
    }

    /// `log Σ_y W(y|x,z) e^{s[q(x̃,y) − q(x,y)]}`. At `s = 0` the value is 0
    /// even where the gain is `−∞`.
    pub fn log_mgf(&self, q: &DecodingMetric, z: usize, x: usize, xt: usize, s: f64) -> Result<f64> {
        let log_row = self.log_rows[x * self.side + z].as_ref().ok_or(Error::UndefinedRow { x, z })?;
        if s == 0.0 || x == xt {
            return Ok(0.0);
        }
        Ok(log_sum_exp(
            log_row
                .iter()
                .enumerate()
                .filter(|(_, lw)| lw.is_finite())
                .map(|(y, &lw)| lw + s * q.gain(x, xt, y)),
        ))
    }

    /// `D(P_{Z|X} ‖ W_{Z|X} | P_X)` for a row-major joint `P_XZ`; `+∞` when
    /// `P_{Z|X}` is not absolutely continuous with respect to `W_{Z|X}`.
    pub fn side_divergence(&self, p_xz: &[f64]) -> f64 {
        p_xz.chunks(self.side)
            .zip(self.side_law.rows())
            .map(|(row, w)| {
                let px: f64 = row.iter().sum();
                if px <= 0.0 {
                    return 0.0;
                }
                let cond: Vec<f64> = row.iter().map(|v| v / px).collect();
                px * kl_slices(&cond, w)
            })
            .sum()
    }

    pub(crate) fn check_metric(&self, q: &DecodingMetric) -> Result<()> {
        if q.inputs() != self.inputs || q.outputs() != self.outputs {
            return Err(Error::ShapeMismatch(format!(
                "metric {}x{} vs channel {}x{}",
                q.inputs(),
                q.outputs(),
                self.inputs,
                self.outputs
            )));
        }
        Ok(())
    }
}

/// `d_{z,s}(x, x̃) = −½ log[M(x→x̃) · M(x̃→x)]`, where `M(x→x̃)` is the
/// moment generating factor of the score gain of `x̃` over `x` under
/// `W(·|x,z)`. Symmetric in `(x, x̃)` by construction.
pub fn pair_distance(
    z: usize,
    s: f64,
    q: &DecodingMetric,
    w: &ConditionalChannel,
    x: usize,
    xt: usize,
) -> Result<f64> {
    let forward = w.log_mgf(q, z, x, xt, s)?;
    let backward = w.log_mgf(q, z, xt, x, s)?;
    Ok(-0.5 * (forward + backward))
}
