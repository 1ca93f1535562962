//! Stochastic matrices: single-output channels and two-output broadcast
//! channels.

use crate::dist::{ProbVec, PROB_TOL};
use crate::error::{Error, Result};

/// A conditional law `W(y|x)`: one probability row over the outputs per input.
///
/// The same type serves every conditional law in the workspace (channels,
/// test channels `P_{Y|X}`, side-information kernels `P_{Z|X}`).
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelKernel {
    rows: Vec<ProbVec>,
    outputs: usize,
}

/// Alias used where a conditional law is an optimization variable rather
/// than a physical channel.
pub type CondKernel = ChannelKernel;

impl ChannelKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let outputs = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::ShapeMismatch("kernel needs at least one row".into()))?;
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(x, row)| {
                if row.len() != outputs {
                    return Err(Error::ShapeMismatch(format!(
                        "row {x} has {} entries, expected {outputs}",
                        row.len()
                    )));
                }
                ProbVec::new(row).map_err(|e| match e {
                    Error::InvalidDistribution(msg) => {
                        Error::InvalidDistribution(format!("row {x}: {msg}"))
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, outputs })
    }

    pub fn from_rows(rows: Vec<ProbVec>) -> Result<Self> {
        Self::new(rows.into_iter().map(ProbVec::into_inner).collect())
    }

    /// Builds a kernel from a row-major flat buffer.
    pub fn from_flat(flat: &[f64], outputs: usize) -> Result<Self> {
        if outputs == 0 || flat.len() % outputs != 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} weights cannot be split into rows of {outputs}",
                flat.len()
            )));
        }
        Self::new(flat.chunks(outputs).map(<[f64]>::to_vec).collect())
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain {
                name: "crossover probability",
                value: p,
                domain: "[0, 1]",
            });
        }
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Noiseless channel on `n` symbols.
    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|x| ProbVec::point_mass(n, x)).collect(),
            outputs: n,
        }
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn rows(&self) -> &[ProbVec] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &ProbVec {
        &self.rows[x]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    /// Row-major copy of the matrix.
    pub fn to_flat(&self) -> Vec<f64> {
        self.rows.iter().flat_map(|r| r.iter().copied()).collect()
    }

    /// Output law induced by the input law `p`.
    pub fn output_law(&self, p: &ProbVec) -> Result<ProbVec> {
        if p.len() != self.inputs() {
            return Err(Error::AlphabetMismatch {
                left: p.len(),
                right: self.inputs(),
            });
        }
        let mut out = vec![0.0; self.outputs];
        for (px, row) in p.iter().zip(&self.rows) {
            for (o, w) in out.iter_mut().zip(row.iter()) {
                *o += px * w;
            }
        }
        ProbVec::normalized(out)
    }
}

/// A two-output channel `W(y,z|x)` stored as `[x][y][z]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BroadcastKernel {
    weights: Vec<f64>,
    inputs: usize,
    outputs_y: usize,
    outputs_z: usize,
}

impl BroadcastKernel {
    /// Validates a flat `[x][y][z]` buffer: nonnegative, each `x`-slice of
    /// unit mass.
    pub fn new(weights: Vec<f64>, inputs: usize, outputs_y: usize, outputs_z: usize) -> Result<Self> {
        let block = outputs_y * outputs_z;
        if inputs == 0 || block == 0 || weights.len() != inputs * block {
            return Err(Error::ShapeMismatch(format!(
                "broadcast kernel of shape {inputs}x{outputs_y}x{outputs_z} needs {} weights, got {}",
                inputs * block,
                weights.len()
            )));
        }
        for (x, slice) in weights.chunks(block).enumerate() {
            if slice.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "broadcast slice for input {x} has a negative or non-finite entry"
                )));
            }
            let total: f64 = slice.iter().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "broadcast slice for input {x} sums to {total:.17}"
                )));
            }
        }
        Ok(Self {
            weights,
            inputs,
            outputs_y,
            outputs_z,
        })
    }

    /// `W(y,z|x) = W(y|x) · side(z|x,y)`, where the rows of `side` are indexed
    /// by `x * |Y| + y`.
    pub fn from_parts(channel: &ChannelKernel, side: &ChannelKernel) -> Result<Self> {
        let (nx, ny) = (channel.inputs(), channel.outputs());
        if side.inputs() != nx * ny {
            return Err(Error::ShapeMismatch(format!(
                "side kernel needs {} rows (one per input/output pair), got {}",
                nx * ny,
                side.inputs()
            )));
        }
        let nz = side.outputs();
        let mut weights = Vec::with_capacity(nx * ny * nz);
        for x in 0..nx {
            for y in 0..ny {
                let w = channel.get(x, y);
                weights.extend(side.row(x * ny + y).iter().map(|&s| w * s));
            }
        }
        Self::new(weights, nx, ny, nz)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }
    pub fn outputs_y(&self) -> usize {
        self.outputs_y
    }
    pub fn outputs_z(&self) -> usize {
        self.outputs_z
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.weights[(x * self.outputs_y + y) * self.outputs_z + z]
    }

    /// Marginal channel `W(y|x)`.
    pub fn y_given_x(&self) -> Result<ChannelKernel> {
        let rows = (0..self.inputs)
            .map(|x| {
                (0..self.outputs_y)
                    .map(|y| (0..self.outputs_z).map(|z| self.get(x, y, z)).sum())
                    .collect::<Vec<f64>>()
            })
            .map(|r| ProbVec::normalized(r).map(ProbVec::into_inner))
            .collect::<Result<Vec<_>>>()?;
        ChannelKernel::new(rows)
    }

    /// Marginal channel `W(z|x)`.
    pub fn z_given_x(&self) -> Result<ChannelKernel> {
        let rows = (0..self.inputs)
            .map(|x| {
                (0..self.outputs_z)
                    .map(|z| (0..self.outputs_y).map(|y| self.get(x, y, z)).sum())
                    .collect::<Vec<f64>>()
            })
            .map(|r| ProbVec::normalized(r).map(ProbVec::into_inner))
            .collect::<Result<Vec<_>>>()?;
        ChannelKernel::new(rows)
    }

    /// Conditional rows `W(y|x,z)` indexed by `x * |Z| + z`; `None` where
    /// `W(z|x) = 0` and the row is undefined.
    pub fn y_given_xz(&self) -> Result<Vec<Option<ProbVec>>> {
        let mut out = Vec::with_capacity(self.inputs * self.outputs_z);
        for x in 0..self.inputs {
            for z in 0..self.outputs_z {
                let col: Vec<f64> = (0..self.outputs_y).map(|y| self.get(x, y, z)).collect();
                if col.iter().sum::<f64>() > 0.0 {
                    out.push(Some(ProbVec::normalized(col)?));
                } else {
                    out.push(None);
                }
            }
        }
        Ok(out)
    }
}
