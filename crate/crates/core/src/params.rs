use crate::error::{Error, Result};

/// Precision of an ordinary `f64`.
pub const DOUBLE_PRECISION: u32 = 53;

/// Default number of terms an enumeration may visit (`2^26`).
pub const DEFAULT_CAP: u64 = 1 << 26;

/// No configuration may raise the cap beyond `2^30` terms.
pub const HARD_CAP: u64 = 1 << 30;

/// Position `x` of the chain family, inverse temperature and working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub x: f64,
    pub beta: f64,
    /// Working precision in bits. 53 is plain `f64`; larger values need the
    /// `extended` feature.
    pub float_precision: u32,
}

impl ChainParams {
    pub fn new(x: f64, beta: f64) -> Result<Self> {
        Self::with_precision(x, beta, DOUBLE_PRECISION)
    }

    pub fn with_precision(x: f64, beta: f64, float_precision: u32) -> Result<Self> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidArgument(format!("x must be a finite value >= 0, got {x}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "beta must be a finite value >= 0, got {beta}"
            )));
        }
        if float_precision < DOUBLE_PRECISION {
            return Err(Error::UnsupportedPrecision(float_precision));
        }
        Ok(Self {
            x,
            beta,
            float_precision,
        })
    }

    pub fn is_extended(&self) -> bool {
        self.float_precision > DOUBLE_PRECISION
    }
}

/// How enumeration work is scheduled. Both modes use the same decomposition
/// and reduction order, so they return bitwise identical sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to [`Exec::Sequential`] when the `parallel` feature is off.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Budget and scheduling for exhaustive enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumerator {
    pub cap_terms: u64,
    pub exec: Exec,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self {
            cap_terms: DEFAULT_CAP,
            exec: Exec::default(),
        }
    }
}

impl Enumerator {
    pub fn new(cap_terms: u64, exec: Exec) -> Result<Self> {
        if cap_terms == 0 || cap_terms > HARD_CAP {
            return Err(Error::InvalidArgument(format!(
                "cap must lie in 1..=2^30 terms, got {cap_terms}"
            )));
        }
        Ok(Self { cap_terms, exec })
    }

    pub fn with_exec(self, exec: Exec) -> Self {
        Self { exec, ..self }
    }

    pub(crate) fn check(&self, op: &'static str, free_sites: usize) -> Result<()> {
        let requested = if free_sites >= 127 {
            u128::MAX
        } else {
            1u128 << free_sites
        };
        if requested > self.cap_terms as u128 {
            return Err(Error::ResourceCap {
                op,
                requested,
                cap: self.cap_terms,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ChainParams::new(0.0, 0.0).is_ok());
        assert!(ChainParams::new(-0.1, 1.0).is_err());
        assert!(ChainParams::new(1.0, -1.0).is_err());
        assert!(ChainParams::new(f64::NAN, 1.0).is_err());
        assert!(ChainParams::with_precision(1.0, 1.0, 24).is_err());
        assert!(ChainParams::with_precision(1.0, 1.0, 128).unwrap().is_extended());
    }

    #[test]
    fn cap_checks() {
        let e = Enumerator::new(1 << 4, Exec::Sequential).unwrap();
        assert!(e.check("t", 4).is_ok());
        assert!(matches!(e.check("t", 5), Err(Error::ResourceCap { .. })));
        assert!(Enumerator::new(HARD_CAP + 1, Exec::Sequential).is_err());
        assert!(Enumerator::new(0, Exec::Sequential).is_err());
    }
}
