//! Discrete q-Hermite polynomials and the q-deformed oscillator built on them.

pub mod cli;
pub mod config;
pub mod dd;
pub mod error;
pub mod hermite;
pub mod moments;
pub mod oscillator;
pub mod qcore;
pub mod qtrig;
pub mod real;

pub use config::{Precision, QParameter, TruncationConfig};
pub use error::{QError, Result};
pub use real::{CompensatedSum, Real, Scaled};

pub use dd::DoubleDouble;

/// Deformation parameter in double precision.
pub type QParam = QParameter<f64>;
/// Deformation parameter in double-double precision.
pub type QParamDd = QParameter<DoubleDouble>;
