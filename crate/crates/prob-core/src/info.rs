//! Information measures in nats.

use crate::dist::{JointDist, ProbVec};
use crate::error::{Error, Result};
use crate::kernel::ChannelKernel;

/// `Σ p log(p/r)` on raw slices, with `0·log(0/·) = 0` and `+∞` on an
/// absolute-continuity failure. Lengths must agree.
pub fn kl_slices(p: &[f64], r: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), r.len());
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(r) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            acc += a * (a / b).ln();
        }
    }
    acc.max(0.0)
}

pub fn kl_divergence(p: &ProbVec, r: &ProbVec) -> Result<f64> {
    if p.len() != r.len() {
        return Err(Error::AlphabetMismatch {
            left: p.len(),
            right: r.len(),
        });
    }
    Ok(kl_slices(p, r))
}

/// `D(P_{Y|X} ‖ W | P) = Σ_x P(x) D(P_{Y|X}(·|x) ‖ W(·|x))`.
pub fn conditional_kl(pk: &ChannelKernel, wk: &ChannelKernel, px: &ProbVec) -> Result<f64> {
    if pk.inputs() != wk.inputs() || pk.outputs() != wk.outputs() {
        return Err(Error::ShapeMismatch(format!(
            "kernels of shape {}x{} and {}x{}",
            pk.inputs(),
            pk.outputs(),
            wk.inputs(),
            wk.outputs()
        )));
    }
    if px.len() != pk.inputs() {
        return Err(Error::AlphabetMismatch {
            left: px.len(),
            right: pk.inputs(),
        });
    }
    let mut acc = 0.0;
    for ((&weight, a), b) in px.iter().zip(pk.rows()).zip(wk.rows()) {
        if weight > 0.0 {
            acc += weight * kl_slices(a, b);
        }
    }
    Ok(acc)
}

/// Mutual information of a row-major `rows x cols` joint given as a slice.
pub fn mutual_information_slices(joint: &[f64], rows: usize, cols: usize) -> f64 {
    debug_assert_eq!(joint.len(), rows * cols);
    let mut row_m = vec![0.0; rows];
    let mut col_m = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            let v = joint[i * cols + j];
            row_m[i] += v;
            col_m[j] += v;
        }
    }
    let mut acc = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let v = joint[i * cols + j];
            if v > 0.0 {
                acc += v * (v / (row_m[i] * col_m[j])).ln();
            }
        }
    }
    acc.max(0.0)
}

pub fn mutual_information(j: &JointDist) -> Result<f64> {
    match *j.dims() {
        [rows, cols] => Ok(mutual_information_slices(j.weights(), rows, cols)),
        _ => Err(Error::ShapeMismatch(
            "mutual information needs a two-factor joint".into(),
        )),
    }
}

/// Shannon entropy in nats.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Binary entropy in nats, with value 0 at both endpoints.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            name: "binary entropy argument",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(binary_entropy_unchecked(x))
}

pub(crate) fn binary_entropy_unchecked(x: f64) -> f64 {
    let term = |v: f64| if v > 0.0 { -v * v.ln() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// Binary divergence `D(a ‖ b)` between Bernoulli laws, in nats.
pub fn binary_kl(a: f64, b: f64) -> f64 {
    kl_slices(&[a, 1.0 - a], &[b, 1.0 - b])
}
