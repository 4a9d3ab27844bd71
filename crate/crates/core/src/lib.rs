//! Continuous-variable quantum metrology with Gaussian states.

pub mod curve;
pub mod error;
pub mod estimation;
pub mod fock_oracle;
pub mod gaussian_core;
pub mod holometer;
pub mod illumination;
pub mod interferometry;
pub mod moments;

pub use curve::CurveData;
pub use error::{Error, Result};
