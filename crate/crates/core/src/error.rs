use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("time {t} outside merge window [0, {t_merge}]")]
    TimeOutOfRange { t: f64, t_merge: f64 },

    #[error("degenerate trap geometry: {0}")]
    DegenerateGeometry(String),

    #[error("size guard exceeded: N = {n} > {limit}")]
    SizeGuard { n: usize, limit: usize },

    #[error("too many sectors: {count} exceeds cap {cap}")]
    SectorCap { count: usize, cap: usize },

    #[error("norm drift {drift:e} exceeds tolerance in sector N = {n_total} at step {step}")]
    NormDrift { n_total: u64, step: usize, drift: f64 },

    #[error("non-finite amplitude in sector N = {n_total} at step {step}")]
    NonFinite { n_total: u64, step: usize },

    #[error("eigensolver failed to converge for eigenvalue {index}")]
    NoConvergence { index: usize },
}

impl Error {
    /// True for failures of the numerical evolution, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NormDrift { .. } | Error::NonFinite { .. } | Error::NoConvergence { .. }
        )
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}
