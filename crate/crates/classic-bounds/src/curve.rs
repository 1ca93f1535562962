//! Curves in the rate/exponent plane.

use prob_core::{Error, Result};

/// Solver diagnostics attached to a curve.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CurveMeta {
    /// Restarts used by any randomized inner search.
    pub restarts: usize,
    /// Rates (nats) at which a tilt search stopped at its cap.
    pub hit_cap_at: Vec<f64>,
    pub notes: Vec<String>,
}

/// A named exponent curve: `(rate, exponent)` pairs in nats with strictly
/// increasing rates.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub meta: CurveMeta,
}

impl BoundCurve {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>, meta: CurveMeta) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::ShapeMismatch("curve rates must strictly increase".into()));
        }
        if let Some(&(r, e)) = points.iter().find(|(_, e)| e.is_nan() || *e < 0.0) {
            return Err(Error::Domain {
                name: "exponent",
                value: e,
                domain: if r.is_nan() { "rate is NaN" } else { "[0, ∞]" },
            });
        }
        Ok(Self {
            name: name.into(),
            points,
            meta,
        })
    }

    pub fn rates(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Value at a rate that is on the curve's grid.
    pub fn at(&self, rate: f64) -> Option<f64> {
        self.points.iter().find(|p| p.0 == rate).map(|p| p.1)
    }

    /// Largest increase between consecutive points; an upper-bound curve
    /// should keep this below solver noise.
    pub fn max_increase(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(0.0, f64::max)
    }
}

/// `n` equally spaced rates strictly inside `(0, cap)`.
pub fn interior_grid(cap: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| cap * i as f64 / (n + 1) as f64).collect()
}

/// The point where the straight line from the zero-rate exponent touches the
/// sphere-packing curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentPoint {
    pub rate: f64,
    pub slope: f64,
    pub zero_rate: f64,
}

impl TangentPoint {
    pub fn line(&self, rate: f64) -> f64 {
        self.zero_rate + self.slope * rate
    }
}

/// An exponent value with the tilt-cap diagnostic of the search behind it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent {
    pub value: f64,
    pub hit_cap: bool,
}

impl Exponent {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            hit_cap: false,
        }
    }
}
