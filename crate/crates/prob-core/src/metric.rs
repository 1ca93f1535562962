//! Additive decoding metrics and the channel/metric predicates that gate the
//! bounds.
//!
//! Scores live in the extended reals `ℝ ∪ {−∞}`. The value `−∞` is represented
//! by `f64::NEG_INFINITY` and every predicate below treats it symbolically
//! rather than as a large negative number.

use crate::error::{Error, Result};
use crate::kernel::ChannelKernel;

/// Relative tolerance for deciding that two finite score differences agree.
pub const SCORE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DecodingMetric {
    scores: Vec<f64>,
    inputs: usize,
    outputs: usize,
    is_ml: bool,
}

impl DecodingMetric {
    /// Explicit metric matrix indexed by `(x, y)`. Entries must be finite or
    /// `−∞`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        let outputs = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::ShapeMismatch("metric needs at least one row".into()))?;
        let mut scores = Vec::with_capacity(inputs * outputs);
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::ShapeMismatch(format!(
                    "metric row {x} has {} entries, expected {outputs}",
                    row.len()
                )));
            }
            for v in row {
                if v.is_nan() || v == f64::INFINITY {
                    return Err(Error::Domain {
                        name: "metric entry",
                        value: v,
                        domain: "ℝ ∪ {−∞}",
                    });
                }
                scores.push(v);
            }
        }
        Ok(Self {
            scores,
            inputs,
            outputs,
            is_ml: false,
        })
    }

    /// The maximum-likelihood metric `q(x,y) = log W(y|x)`.
    pub fn ml(w: &ChannelKernel) -> Self {
        let scores = w
            .rows()
            .iter()
            .flat_map(|r| {
                r.iter()
                    .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
            })
            .collect();
        Self {
            scores,
            inputs: w.inputs(),
            outputs: w.outputs(),
            is_ml: true,
        }
    }

    pub fn is_ml(&self) -> bool {
        self.is_ml
    }
    pub fn inputs(&self) -> usize {
        self.inputs
    }
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn score(&self, x: usize, y: usize) -> f64 {
        self.scores[x * self.outputs + y]
    }

    /// Row-major copy of the score matrix.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// `q(to, y) − q(from, y)` with `(−∞) − (−∞)` read as `−∞`: a term where
    /// the competitor cannot score never favours it.
    pub fn gain(&self, from: usize, to: usize, y: usize) -> f64 {
        let (a, b) = (self.score(to, y), self.score(from, y));
        if a == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            a - b
        }
    }

    fn check_shape(&self, w: &ChannelKernel) -> Result<()> {
        if w.inputs() != self.inputs || w.outputs() != self.outputs {
            return Err(Error::ShapeMismatch(format!(
                "channel {}x{} vs metric {}x{}",
                w.inputs(),
                w.outputs(),
                self.inputs,
                self.outputs
            )));
        }
        Ok(())
    }
}

/// `W(y|x) > 0 ⇒ q(x,y) > −∞` for every input/output pair.
pub fn metric_supports_channel(w: &ChannelKernel, q: &DecodingMetric) -> bool {
    if q.check_shape(w).is_err() {
        return false;
    }
    (0..w.inputs()).all(|x| {
        (0..w.outputs()).all(|y| w.get(x, y) <= 0.0 || q.score(x, y) > f64::NEG_INFINITY)
    })
}

/// Extremes of `q(x,y) − q(x̃,y)` that enter the zero-error and balance
/// conditions. With the support condition in force, `q(x,y)` is finite on the
/// support of `W(·|x)` and `q(x̃,y)` is finite on the support of `W(·|x̃)`.
struct PairExtremes {
    /// max over y with W(y|x̃) > 0 of q(x,y) − q(x̃,y); never +∞.
    max_on_competitor_support: f64,
    /// min over y with W(y|x) > 0 of q(x,y) − q(x̃,y); never −∞.
    min_on_sent_support: f64,
    /// max over y with W(y|x) > 0 of q(x̃,y) − q(x,y); never +∞.
    max_reverse_on_sent_support: f64,
}

fn pair_extremes(w: &ChannelKernel, q: &DecodingMetric, x: usize, xt: usize) -> PairExtremes {
    let mut max_comp = f64::NEG_INFINITY;
    let mut min_sent = f64::INFINITY;
    let mut max_rev = f64::NEG_INFINITY;
    for y in 0..w.outputs() {
        let (sx, st) = (q.score(x, y), q.score(xt, y));
        if w.get(xt, y) > 0.0 {
            // st finite; a −∞ sx gives −∞.
            max_comp = max_comp.max(sx - st);
        }
        if w.get(x, y) > 0.0 {
            // sx finite; a −∞ st gives +∞ forward and −∞ reverse.
            min_sent = min_sent.min(sx - st);
            max_rev = max_rev.max(st - sx);
        }
    }
    PairExtremes {
        max_on_competitor_support: max_comp,
        min_on_sent_support: min_sent,
        max_reverse_on_sent_support: max_rev,
    }
}

/// Extended-real sum where `−∞` dominates (the only infinity that can occur in
/// these sums).
fn ext_sum(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        a + b
    }
}

fn ext_eq(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        a == b
    } else {
        (a - b).abs() <= SCORE_TOL * a.abs().max(b.abs()).max(1.0)
    }
}

/// True when the zero-error capacity of `W` under metric `q` vanishes: for
/// every ordered pair the two one-sided confusability maxima sum to a
/// nonnegative extended real.
pub fn zero_error_mismatch_is_zero(w: &ChannelKernel, q: &DecodingMetric) -> bool {
    if q.check_shape(w).is_err() {
        return false;
    }
    let n = w.inputs();
    (0..n).all(|x| {
        (0..n).all(|xt| {
            let e = pair_extremes(w, q, x, xt);
            let total = ext_sum(e.max_on_competitor_support, e.max_reverse_on_sent_support);
            total.is_finite()
                && total >= -SCORE_TOL * e.max_on_competitor_support.abs().max(1.0)
        })
    })
}

/// Balanced channel/metric pair: zero-error capacity zero, and whenever the
/// confusability maximum on the competitor's support meets the minimum on the
/// sent symbol's support, the score difference is constant on the common
/// finite-score support.
pub fn is_balanced(w: &ChannelKernel, q: &DecodingMetric) -> bool {
    if !zero_error_mismatch_is_zero(w, q) {
        return false;
    }
    let n = w.inputs();
    (0..n).all(|x| {
        (0..n).all(|xt| {
            let e = pair_extremes(w, q, x, xt);
            if !ext_eq(e.max_on_competitor_support, e.min_on_sent_support) {
                return true;
            }
            let diffs: Vec<f64> = (0..w.outputs())
                .filter(|&y| w.get(x, y) + w.get(xt, y) > 0.0)
                .filter(|&y| q.score(x, y).is_finite() && q.score(xt, y).is_finite())
                .map(|y| q.score(x, y) - q.score(xt, y))
                .collect();
            let hi = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = diffs.iter().copied().fold(f64::INFINITY, f64::min);
            diffs.is_empty() || ext_eq(hi, lo)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc() -> ChannelKernel {
        ChannelKernel::bsc(0.1).unwrap()
    }

    #[test]
    fn ml_metric_examples() {
        let q = DecodingMetric::ml(&bsc());
        assert!(q.is_ml());
        assert_eq!(q.score(0, 0), 0.9f64.ln());
        assert_eq!(q.score(0, 1), 0.1f64.ln());
        let id = DecodingMetric::ml(&ChannelKernel::identity(2));
        assert_eq!(id.score(0, 0), 0.0);
        assert_eq!(id.score(0, 1), f64::NEG_INFINITY);
    }

    #[test]
    fn metric_rejects_nan_and_positive_infinity() {
        assert!(DecodingMetric::new(vec![vec![f64::NAN]]).is_err());
        assert!(DecodingMetric::new(vec![vec![f64::INFINITY]]).is_err());
        assert!(DecodingMetric::new(vec![vec![f64::NEG_INFINITY, 0.0]]).is_ok());
    }

    #[test]
    fn support_condition() {
        let w = bsc();
        assert!(metric_supports_channel(&w, &DecodingMetric::ml(&w)));
        let bad = DecodingMetric::new(vec![vec![0.0, f64::NEG_INFINITY], vec![0.0, 0.0]]).unwrap();
        assert!(!metric_supports_channel(&w, &bad));
        let zeros = DecodingMetric::new(vec![vec![0.0; 2]; 2]).unwrap();
        assert!(metric_supports_channel(&ChannelKernel::identity(2), &zeros));
    }

    #[test]
    fn zero_error_examples() {
        let w = bsc();
        let q = DecodingMetric::ml(&w);
        assert!(zero_error_mismatch_is_zero(&w, &q));
        // Both maxima equal log(0.9/0.1) for x ≠ x̃.
        let e = pair_extremes(&w, &q, 0, 1);
        assert!((e.max_on_competitor_support - (0.9f64 / 0.1).ln()).abs() < 1e-15);
        assert!((e.max_reverse_on_sent_support - (0.9f64 / 0.1).ln()).abs() < 1e-15);
        let id = ChannelKernel::identity(2);
        assert!(!zero_error_mismatch_is_zero(&id, &DecodingMetric::ml(&id)));
        let single = ChannelKernel::new(vec![vec![0.3, 0.7]]).unwrap();
        assert!(zero_error_mismatch_is_zero(&single, &DecodingMetric::ml(&single)));
    }

    #[test]
    fn balanced_examples() {
        let w = bsc();
        assert!(is_balanced(&w, &DecodingMetric::ml(&w)));
        let id = ChannelKernel::identity(2);
        assert!(!is_balanced(&id, &DecodingMetric::ml(&id)));
        let single = ChannelKernel::new(vec![vec![0.3, 0.7]]).unwrap();
        assert!(is_balanced(&single, &DecodingMetric::ml(&single)));
    }

    #[test]
    fn zero_error_holds_but_balance_fails() {
        // x=0 reaches y∈{0,1}, x=1 reaches y=1 only. Metric ignores the
        // output on y=1 and prefers 0 on y=0; x̃=1 is never strictly better
        // than x=0, and the equality case carries a nonconstant difference.
        let w = ChannelKernel::new(vec![vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        let q = DecodingMetric::new(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(metric_supports_channel(&w, &q));
        assert!(zero_error_mismatch_is_zero(&w, &q));
        assert!(!is_balanced(&w, &q));
    }
}
