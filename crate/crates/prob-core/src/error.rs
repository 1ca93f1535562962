use thiserror::Error;

/// Errors raised by the probability primitives and propagated by every
/// downstream crate of the workspace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("{name} = {value} lies outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("objective returned NaN at {at}")]
    NotANumber { at: f64 },

    #[error("objective is infinite at every candidate point")]
    NoFiniteValue,

    #[error("conditional row for input {x}, side symbol {z} is undefined (zero mass)")]
    UndefinedRow { x: usize, z: usize },

    #[error("enumeration of {needed} output sequences exceeds the cap {cap}")]
    EnumerationCap { needed: u128, cap: u128 },

    #[error("composition: {0}")]
    Composition(String),

    #[error("tangency not found: {0}")]
    Tangency(String),

    #[error("empty candidate family")]
    EmptyFamily,

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
