//! Crate-wide error type.

use crate::quantum::Side;

/// Everything that can go wrong while composing or running an experiment.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A boost velocity with |V| ≥ c.
    #[error("boost velocity {speed} m/s is not subluminal; |V| must be < c")]
    InvalidBoost { speed: f64 },

    /// A worldline velocity with |v| ≥ c.
    #[error("worldline speed {speed} m/s must be strictly below c")]
    SuperluminalWorldline { speed: f64 },

    /// A collapse-front speed below c.
    #[error("collapse speed {speed} m/s must be at least c (or infinite)")]
    InvalidCollapseSpeed { speed: f64 },

    /// Detector events that are not spacelike-separated.
    #[error("detector events must be spacelike-separated ({found})")]
    InvalidGeometry { found: &'static str },

    /// Detector events that are not simultaneous in the working frame.
    #[error("detector events must be simultaneous in the working frame (t_A = {t_a} s, t_B = {t_b} s)")]
    UnsupportedConfiguration { t_a: f64, t_b: f64 },

    /// Selective collapse onto a side that carries zero probability.
    #[error("cannot collapse onto side {side} with zero probability")]
    InvalidCollapse { side: Side },

    /// A density matrix violating trace, positivity, or coherence bounds.
    #[error("invalid density matrix: {reason}")]
    InvalidDensityMatrix { reason: String },

    /// An excitation probability above 1.
    #[error("excitation probability {probability} exceeds 1; lower the peak excitation p0")]
    Saturation { probability: f64 },

    /// A collision environment whose per-collision phase step vanishes.
    #[error("per-collision phase step is zero; the superposition never decoheres")]
    NeverCollapses,

    /// A diffraction order with no propagating beam.
    #[error("diffraction order {order} is evanescent: {order}·λ ≥ grating period")]
    EvanescentOrder { order: u32 },

    /// A configuration field outside its valid range.
    #[error("{field}: {message}")]
    InvalidConfig { field: &'static str, message: String },

    /// A number that must be emitted finished as NaN or infinite.
    #[error("non-finite value in {context}: {value}")]
    NonFinite { context: &'static str, value: f64 },
}

impl Error {
    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
