//! Ground-truth error probabilities for explicit codebooks.
//!
//! The decoder picks the message with the largest additive score
//! `Σ_i q(x_i, y_i)` and breaks ties uniformly at random. Both estimators
//! below credit a tie with its expected outcome, so the exact value and the
//! Monte Carlo estimate refer to the same quantity.

mod codebook;
mod decode;
mod exact;
mod monte_carlo;

pub use codebook::{random_cc_code, type_class_size, Codebook};
pub use exact::{exact_pe, exact_pe_capped, DEFAULT_ENUMERATION_CAP};
pub use monte_carlo::monte_carlo_pe;

use prob_core::{ChannelKernel, DecodingMetric, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Exact,
    MonteCarlo {
        trials: u64,
        std_error: f64,
        /// Trials in which the transmitted message was not the unique winner.
        observed_errors: u64,
    },
}

/// Average error probability of a codebook together with its exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeResult {
    pub pe: f64,
    /// `−(1/n) log pe`, `+∞` when `pe = 0`.
    pub exponent: f64,
    pub method: Method,
}

impl PeResult {
    fn new(pe: f64, n: usize, method: Method) -> Self {
        let pe = pe.clamp(0.0, 1.0);
        let exponent = if pe > 0.0 { -pe.ln() / n as f64 } else { f64::INFINITY };
        Self { pe, exponent, method }
    }

    pub fn is_error_free(&self) -> bool {
        self.pe == 0.0
    }
}

/// How [`finite_exponent`] obtains the error probability.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub enumeration_cap: u128,
    /// Trials used when exact enumeration is over the cap.
    pub mc_trials: u64,
    pub seed: u64,
    /// Monte Carlo estimates with fewer observed errors are rejected.
    pub min_observed_errors: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { enumeration_cap: DEFAULT_ENUMERATION_CAP, mc_trials: 1_000_000, seed: 0, min_observed_errors: 100 }
    }
}

/// The exponent `−(1/n) log pe` of this particular codebook.
///
/// Exact enumeration is used when it fits under the cap; otherwise a Monte
/// Carlo estimate with enough observed errors is required. An error-free code
/// reports `exponent = +∞` (see [`PeResult::is_error_free`]).
pub fn finite_exponent(cb: &Codebook, w: &ChannelKernel, q: &DecodingMetric, cfg: &OracleConfig) -> Result<PeResult> {
    match exact_pe_capped(cb, w, q, cfg.enumeration_cap) {
        Err(Error::EnumerationCap { .. }) => {
            let r = monte_carlo_pe(cb, w, q, cfg.mc_trials, cfg.seed)?;
            match r.method {
                Method::MonteCarlo { observed_errors, .. } if r.pe > 0.0 && observed_errors < cfg.min_observed_errors => {
                    Err(Error::Domain {
                        name: "observed Monte Carlo errors",
                        value: observed_errors as f64,
                        domain: "at least the configured minimum",
                    })
                }
                _ => Ok(r),
            }
        }
        other => other,
    }
}

pub(crate) fn check_shapes(cb: &Codebook, w: &ChannelKernel, q: &DecodingMetric) -> Result<()> {
    if cb.inputs() != w.inputs() {
        return Err(Error::AlphabetMismatch { left: cb.inputs(), right: w.inputs() });
    }
    if q.inputs() != w.inputs() || q.outputs() != w.outputs() {
        return Err(Error::ShapeMismatch(format!(
            "metric is {}x{}, channel is {}x{}",
            q.inputs(),
            q.outputs(),
            w.inputs(),
            w.outputs()
        )));
    }
    Ok(())
}
