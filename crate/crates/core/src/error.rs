use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mode index error: {0}")]
    ModeIndex(String),
    #[error("state is not physical: smallest eigenvalue of cov + i*Omega is {0:e}")]
    Unphysical(f64),
    #[error("fock truncation leak {leak:e} exceeds {limit:e}")]
    TruncationLeak { leak: f64, limit: f64 },
    #[error("monomial of length {0} exceeds the 8-operator cap")]
    MomentCap(usize),
    #[error("stationary point: derivative {0:e} too small")]
    Stationary(f64),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("optimizer did not converge, best value {best:e} at {arg:e}")]
    NonConvergence { arg: f64, best: f64 },
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::ModeIndex(_) | Error::MomentCap(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(format!("{name} = {x}")))
    }
}
