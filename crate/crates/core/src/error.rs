use thiserror::Error;

use crate::spectral::SpectralResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain on which the operation is defined.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// An enumeration would visit more terms than the configured cap allows.
    #[error("{op}: {requested} terms requested, cap is {cap}")]
    ResourceCap {
        op: &'static str,
        requested: u128,
        cap: u64,
    },

    /// Spin patterns longer than this overflow the 64-bit matrix entries
    /// used by the enumeration kernels.
    #[error("pattern of length {len} exceeds the supported maximum {max}")]
    PatternTooLong { len: usize, max: usize },

    #[error("power iteration did not converge after {iterations} iterations (last change {last_delta:e})")]
    NonConvergence {
        iterations: usize,
        last_delta: f64,
        best: Box<SpectralResult>,
    },

    #[error("no closed form for this geometry: {0}")]
    UnsupportedPattern(String),

    #[error("working precision of {0} bits is not available in this build")]
    UnsupportedPrecision(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A NaN or infinity surfaced inside a pipeline stage.
    #[error("{op}: non-finite value ({identity})")]
    NonFinite {
        op: &'static str,
        identity: &'static str,
    },
}

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}

pub(crate) fn ensure_finite(value: f64, op: &'static str, identity: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { op, identity })
    }
}
