//! Exponentially tilted divergence problems.
//!
//! A [`TiltProblem`] is the one-parameter dual
//!
//! ```text
//! sup_{s ≥ 0}  − Σ_k w_k · log Σ_y W_k(y) · exp(s · g_k(y))
//! ```
//!
//! of `min Σ_k w_k D(V_k ‖ W_k)` subject to `Σ_k w_k E_{V_k}[g_k] ≥ 0`. Gains
//! may be `−∞`; at `s = 0` the factor `exp(0 · (−∞))` is read as 1.

use prob_core::Result;

use crate::concave::{maximize_concave_1d, Max1d};

#[derive(Clone, Debug, PartialEq)]
struct Term {
    weight: f64,
    /// Output indices with positive base mass, and the full alphabet size.
    support: Vec<usize>,
    outputs: usize,
    /// `log W(y)` on the support of `W`.
    log_base: Vec<f64>,
    gain: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TiltProblem {
    terms: Vec<Term>,
}

/// Numerically stable `log Σ exp(v)`, returning `−∞` for an empty or all
/// `−∞` input.
pub fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    m + values.map(|v| (v - m).exp()).sum::<f64>().ln()
}

impl TiltProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the summand `weight · (−log Σ_y base(y) e^{s·gain(y)})`.
    /// Outputs with zero base mass are dropped; terms with zero weight are
    /// kept (so that [`TiltProblem::tilted_laws`] stays aligned with push
    /// order) but contribute nothing.
    pub fn push(&mut self, weight: f64, base: &[f64], gain: &[f64]) {
        debug_assert_eq!(base.len(), gain.len());
        debug_assert!(weight >= 0.0);
        let support: Vec<usize> = (0..base.len()).filter(|&y| base[y] > 0.0).collect();
        let log_base = support.iter().map(|&y| base[y].ln()).collect();
        let gain = support.iter().map(|&y| gain[y]).collect();
        self.terms.push(Term {
            weight,
            support,
            outputs: base.len(),
            log_base,
            gain,
        });
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn term_log_partition(t: &Term, s: f64) -> f64 {
        if s == 0.0 {
            return log_sum_exp(t.log_base.iter().copied());
        }
        log_sum_exp(t.log_base.iter().zip(&t.gain).map(|(&lb, &g)| lb + s * g))
    }

    /// The dual objective at `s`.
    pub fn value(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.weight > 0.0)
            .map(|t| {
                let z = Self::term_log_partition(t, s);
                if z == f64::NEG_INFINITY {
                    f64::INFINITY
                } else {
                    -t.weight * z
                }
            })
            .sum()
    }

    /// Supremum over `s ∈ [0, cap]`. An empty problem has value 0.
    pub fn sup(&self, cap: f64, tol: f64) -> Result<Max1d> {
        if self.terms.iter().all(|t| t.weight <= 0.0) {
            return Ok(Max1d {
                arg: 0.0,
                value: 0.0,
                hit_cap: false,
            });
        }
        maximize_concave_1d(|s| self.value(s), 0.0, cap, tol)
    }

    /// The minimizing laws `V_k ∝ W_k e^{s g_k}` at a given `s`, one per
    /// pushed term in push order, over the full output alphabet.
    pub fn tilted_laws(&self, s: f64) -> Vec<Vec<f64>> {
        self.terms
            .iter()
            .map(|t| {
                // With every gain at −∞ the tilt is undefined; fall back to
                // the base law.
                let s = if Self::term_log_partition(t, s).is_finite() { s } else { 0.0 };
                let z = Self::term_log_partition(t, s);
                let mut law = vec![0.0; t.outputs];
                for ((&y, &lb), &g) in t.support.iter().zip(&t.log_base).zip(&t.gain) {
                    let e = if s == 0.0 { lb } else { lb + s * g };
                    law[y] = (e - z).exp();
                }
                law
            })
            .collect()
    }
}
