//! Probability primitives over finite alphabets.
//!
//! Everything is measured in nats. Conditional laws share the
//! [`ChannelKernel`] type, joints over two or three factors use
//! [`JointDist`], and decoding metrics carry `−∞` as `f64::NEG_INFINITY`.

mod dist;
mod error;
mod info;
mod kernel;
mod metric;

pub use dist::{JointDist, ProbVec, PROB_TOL};
pub use error::{Error, Result};
pub use info::{
    binary_entropy, binary_kl, conditional_kl, entropy, kl_divergence, kl_slices,
    mutual_information, mutual_information_slices,
};
pub use kernel::{BroadcastKernel, ChannelKernel, CondKernel};
pub use metric::{
    is_balanced, metric_supports_channel, zero_error_mismatch_is_zero, DecodingMetric, SCORE_TOL,
};

/// Converts nats to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// Converts bits to nats.
pub fn bits_to_nats(bits: f64) -> f64 {
    bits * std::f64::consts::LN_2
}
