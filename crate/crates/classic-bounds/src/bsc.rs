//! Lower envelope of achievable exponents for the binary symmetric channel.
//!
//! Three branches, in nats, with `β = 2√(p(1−p))`:
//!
//! * `R ≤ R_min`: `δ_GV(R) · (−log β)`;
//! * `R_min ≤ R ≤ R_crit`: `log 2 − log(1 + β) − R`;
//! * `R ≥ R_crit`: `E_sp(R)`.
//!
//! `R_min = log 2 − h(β/(1+β))`. The default `R_crit` is the usual critical
//! rate `log 2 − h(√p/(√p + √(1−p)))`.

use prob_core::{binary_entropy, Error, Result};

use crate::sphere::{delta_gv, e_sp_bsc};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BscLowerBoundParams {
    p: f64,
    r_min: f64,
    r_crit: f64,
}

impl BscLowerBoundParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::Domain { name: "crossover probability", value: p, domain: "(0, 1/2)" });
        }
        let ln2 = std::f64::consts::LN_2;
        let beta = 2.0 * (p * (1.0 - p)).sqrt();
        let r_min = ln2 - binary_entropy(beta / (1.0 + beta))?;
        let gamma = p.sqrt() / (p.sqrt() + (1.0 - p).sqrt());
        let r_crit = ln2 - binary_entropy(gamma)?;
        Ok(Self { p, r_min, r_crit })
    }

    /// Replaces the default critical rate. It must lie in `[R_min, C]`.
    pub fn with_r_crit(self, r_crit: f64) -> Result<Self> {
        if !(r_crit >= self.r_min && r_crit <= self.capacity()) {
            return Err(Error::Domain { name: "R_crit", value: r_crit, domain: "[R_min, capacity]" });
        }
        Ok(Self { r_crit, ..self })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn r_min(&self) -> f64 {
        self.r_min
    }
    pub fn r_crit(&self) -> f64 {
        self.r_crit
    }
    pub fn capacity(&self) -> f64 {
        std::f64::consts::LN_2 - binary_entropy(self.p).unwrap_or(0.0)
    }
    pub fn delta_gv(&self, r: f64) -> Result<f64> {
        delta_gv(r)
    }
    fn beta(&self) -> f64 {
        2.0 * (self.p * (1.0 - self.p)).sqrt()
    }
}

/// The three-branch lower envelope at rate `r` (nats), `0 < r < C`.
pub fn e_lb_bsc(r: f64, params: &BscLowerBoundParams) -> Result<f64> {
    if !(r > 0.0 && r < params.capacity()) {
        return Err(Error::Domain { name: "rate", value: r, domain: "(0, capacity)" });
    }
    let beta = params.beta();
    if r <= params.r_min {
        Ok(-delta_gv(r)? * beta.ln())
    } else if r <= params.r_crit {
        Ok(std::f64::consts::LN_2 - (1.0 + beta).ln() - r)
    } else {
        e_sp_bsc(r, params.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn branches_meet() {
        let params = BscLowerBoundParams::new(0.1).unwrap();
        let beta = 0.6f64;
        let at_min_one = -delta_gv(params.r_min()).unwrap() * beta.ln();
        let at_min_two = std::f64::consts::LN_2 - (1.0 + beta).ln() - params.r_min();
        assert_abs_diff_eq!(at_min_one, at_min_two, epsilon = 1e-9);
        let at_crit_two = std::f64::consts::LN_2 - (1.0 + beta).ln() - params.r_crit();
        assert_abs_diff_eq!(at_crit_two, e_sp_bsc(params.r_crit(), 0.1).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn low_rate_limit() {
        let params = BscLowerBoundParams::new(0.1).unwrap();
        assert_abs_diff_eq!(e_lb_bsc(1e-9, &params).unwrap(), 0.255413, epsilon = 1e-4);
    }

    #[test]
    fn high_rates_follow_sphere_packing() {
        let params = BscLowerBoundParams::new(0.1).unwrap();
        let r = 0.5 * (params.r_crit() + params.capacity());
        assert_eq!(e_lb_bsc(r, &params).unwrap(), e_sp_bsc(r, 0.1).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(BscLowerBoundParams::new(0.5).is_err());
        let params = BscLowerBoundParams::new(0.1).unwrap();
        assert!(e_lb_bsc(0.0, &params).is_err());
        assert!(e_lb_bsc(params.capacity(), &params).is_err());
        assert!(params.with_r_crit(0.0).is_err());
    }
}
