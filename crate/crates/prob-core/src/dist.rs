//! Distributions over finite alphabets and products of finite alphabets.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Tolerance used when checking that probabilities sum to one.
pub const PROB_TOL: f64 = 1e-12;

fn check_weights(weights: &[f64], what: &str) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what}: empty alphabet")));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} is not finite ({w})"
            )));
        }
        if w < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} is negative ({w})"
            )));
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what}: weights sum to {total:.17}, not 1"
        )));
    }
    Ok(())
}

/// A probability vector over a finite alphabet `{0, .., len-1}`.
///
/// Construction through [`ProbVec::new`] never renormalizes: rows that miss
/// unit mass by more than [`PROB_TOL`] are rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVec(Vec<f64>);

impl ProbVec {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, "probability vector")?;
        Ok(Self(weights))
    }

    /// Normalizes a nonnegative vector computed internally (for example a
    /// marginal or a tilted law). Not meant for ingesting user data.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "cannot normalize a vector with negative or non-finite entries".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("zero total mass".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(weights)
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform law needs a nonempty alphabet");
        Self(vec![1.0 / len as f64; len])
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        assert!(at < len, "point mass outside the alphabet");
        let mut w = vec![0.0; len];
        w[at] = 1.0;
        Self(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Indices carrying positive mass.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
    }
}

impl Deref for ProbVec {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for ProbVec {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A joint law over a product of two or three finite alphabets, stored in
/// row-major order (last factor fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist {
    weights: Vec<f64>,
    dims: Vec<usize>,
}

impl JointDist {
    pub fn new(weights: Vec<f64>, dims: Vec<usize>) -> Result<Self> {
        if !(2..=3).contains(&dims.len()) {
            return Err(Error::ShapeMismatch(format!(
                "joint laws have 2 or 3 factors, got {}",
                dims.len()
            )));
        }
        let cells: usize = dims.iter().product();
        if cells != weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "factor sizes {dims:?} need {cells} weights, got {}",
                weights.len()
            )));
        }
        check_weights(&weights, "joint distribution")?;
        Ok(Self { weights, dims })
    }

    /// Builds a two-factor joint from a marginal on the first factor and a
    /// conditional law of the second given the first.
    pub fn from_marginal_and_kernel(
        marginal: &ProbVec,
        kernel: &crate::ChannelKernel,
    ) -> Result<Self> {
        if marginal.len() != kernel.inputs() {
            return Err(Error::AlphabetMismatch {
                left: marginal.len(),
                right: kernel.inputs(),
            });
        }
        let weights = marginal
            .iter()
            .zip(kernel.rows())
            .flat_map(|(&p, row)| row.iter().map(move |&w| p * w))
            .collect();
        Self::new(weights, vec![marginal.len(), kernel.outputs()])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dims.len());
        index
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.weights[self.offset(index)]
    }

    /// Marginal law of one factor.
    pub fn marginal(&self, axis: usize) -> Result<ProbVec> {
        if axis >= self.dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "axis {axis} out of range for {} factors",
                self.dims.len()
            )));
        }
        let mut out = vec![0.0; self.dims[axis]];
        let inner: usize = self.dims[axis + 1..].iter().product();
        for (k, &w) in self.weights.iter().enumerate() {
            out[(k / inner) % self.dims[axis]] += w;
        }
        ProbVec::normalized(out)
    }

    /// For a two-factor joint, the conditional law of the second factor given
    /// each value of the first; `None` where the first factor has no mass.
    pub fn conditional_rows(&self) -> Result<Vec<Option<ProbVec>>> {
        if self.dims.len() != 2 {
            return Err(Error::ShapeMismatch(
                "conditional rows need a two-factor joint".into(),
            ));
        }
        let cols = self.dims[1];
        self.weights
            .chunks(cols)
            .map(|row| {
                if row.iter().sum::<f64>() > 0.0 {
                    ProbVec::normalized(row.to_vec()).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rows_without_renormalizing() {
        assert!(ProbVec::new(vec![0.5, 0.49]).is_err());
        assert!(ProbVec::new(vec![1.1, -0.1]).is_err());
        assert!(ProbVec::new(vec![f64::NAN, 1.0]).is_err());
        assert!(ProbVec::new(vec![]).is_err());
        assert!(ProbVec::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn joint_marginals() {
        let j = JointDist::new(vec![0.1, 0.2, 0.3, 0.4], vec![2, 2]).unwrap();
        let m0 = j.marginal(0).unwrap();
        let m1 = j.marginal(1).unwrap();
        assert!((m0[0] - 0.3).abs() < 1e-15 && (m0[1] - 0.7).abs() < 1e-15);
        assert!((m1[0] - 0.4).abs() < 1e-15 && (m1[1] - 0.6).abs() < 1e-15);
        assert!(j.marginal(2).is_err());
    }

    #[test]
    fn three_factor_marginal_middle_axis() {
        let w: Vec<f64> = (1..=8).map(|v| v as f64 / 36.0).collect();
        let j = JointDist::new(w, vec![2, 2, 2]).unwrap();
        let m = j.marginal(1).unwrap();
        let expect0 = (1.0 + 2.0 + 5.0 + 6.0) / 36.0;
        assert!((m[0] - expect0).abs() < 1e-15);
        assert_eq!(j.get(&[1, 0, 1]), 6.0 / 36.0);
    }

    #[test]
    fn conditional_rows_flag_empty_inputs() {
        let j = JointDist::new(vec![0.0, 0.0, 0.25, 0.75], vec![2, 2]).unwrap();
        let rows = j.conditional_rows().unwrap();
        assert!(rows[0].is_none());
        assert_eq!(rows[1].as_ref().unwrap().as_slice(), &[0.25, 0.75]);
    }
}
