use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("rate {name} must be non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("near-singular excited block (condition {condition:.3e}) at {context}")]
    NearSingular { condition: f64, context: String },

    #[error("steady state not unique: null space of dimension {dimension} in sector {sector}")]
    DegenerateSteadyState { sector: String, dimension: usize },

    #[error("feedback operator on {channel} is not unitary (deviation {deviation:.3e})")]
    NonUnitary { channel: String, deviation: f64 },

    #[error("trace drift {drift:.3e} exceeds tolerance at t = {t}")]
    TraceDrift { t: f64, drift: f64 },

    #[error("non-finite density matrix at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
