//! Deformation parameter and truncation policy.

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::real::{lit, to_f64, Real};

/// The deformation parameter `q > 1` together with the bases `q^-2`, `q^-4`.
///
/// Every infinite product and series in the crate is taken in one of the two
/// derived bases, both of which lie in `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QParameter<S> {
    q: S,
    p2: S,
    p4: S,
}

impl<S: Real> QParameter<S> {
    pub fn new(q: S) -> Result<Self> {
        if !q.is_finite() || q <= S::one() {
            return Err(QError::domain(format!("q must exceed 1 (got {q})")));
        }
        let p2 = S::one() / (q * q);
        Ok(Self { q, p2, p4: p2 * p2 })
    }

    /// Builds the parameter from an `f64`, which converts exactly into every
    /// supported scalar of at least double precision.
    pub fn from_f64(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 1.0 {
            return Err(QError::domain(format!("q must exceed 1 (got {q})")));
        }
        Self::new(lit(q))
    }

    #[inline]
    pub fn q(&self) -> S {
        self.q
    }

    /// `q^-2`, the base of the q-numbers `[n]`.
    #[inline]
    pub fn p2(&self) -> S {
        self.p2
    }

    /// `q^-4`.
    #[inline]
    pub fn p4(&self) -> S {
        self.p4
    }

    /// `q - 1/q`.
    pub fn gap(&self) -> S {
        self.q - S::one() / self.q
    }

    pub fn as_f64(&self) -> f64 {
        to_f64(self.q)
    }
}

/// Scalar type used to carry out a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    /// IEEE binary64, about 16 significant digits.
    Double,
    /// Unevaluated sum of two doubles, about 31 significant digits.
    DoubleDouble,
}

impl Precision {
    /// Smallest supported precision offering `digits` significant digits.
    pub fn from_digits(digits: u32) -> Result<Self> {
        match digits {
            0 => Err(QError::domain("precision must be at least one digit")),
            1..=16 => Ok(Precision::Double),
            17..=31 => Ok(Precision::DoubleDouble),
            _ => Err(QError::domain(format!(
                "precision of {digits} digits is not available (at most 31)"
            ))),
        }
    }
}

/// Tolerances and caps for every truncated infinite sum or product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    series_tol: f64,
    max_terms: usize,
    lattice_cutoff: i64,
    precision_digits: u32,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            series_tol: 1e-15,
            max_terms: 10_000,
            lattice_cutoff: 60,
            precision_digits: 16,
        }
    }
}

impl TruncationConfig {
    pub fn new(series_tol: f64, max_terms: usize, lattice_cutoff: i64) -> Result<Self> {
        let cfg = Self {
            series_tol,
            max_terms,
            lattice_cutoff,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0 && self.series_tol.is_finite()) {
            return Err(QError::domain(format!(
                "series tolerance must be positive (got {})",
                self.series_tol
            )));
        }
        if self.max_terms < 8 {
            return Err(QError::domain(format!(
                "max_terms must be at least 8 (got {})",
                self.max_terms
            )));
        }
        if self.lattice_cutoff < 4 {
            return Err(QError::domain(format!(
                "lattice cutoff must be at least 4 (got {})",
                self.lattice_cutoff
            )));
        }
        Precision::from_digits(self.precision_digits)?;
        Ok(())
    }

    pub fn with_series_tol(mut self, tol: f64) -> Result<Self> {
        self.series_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_terms(mut self, n: usize) -> Result<Self> {
        self.max_terms = n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lattice_cutoff(mut self, cutoff: i64) -> Result<Self> {
        self.lattice_cutoff = cutoff;
        self.validate()?;
        Ok(self)
    }

    pub fn with_precision_digits(mut self, digits: u32) -> Result<Self> {
        self.precision_digits = digits;
        self.validate()?;
        Ok(self)
    }

    #[inline]
    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    #[inline]
    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    #[inline]
    pub fn lattice_cutoff(&self) -> i64 {
        self.lattice_cutoff
    }

    #[inline]
    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }

    pub fn precision(&self) -> Precision {
        Precision::from_digits(self.precision_digits).expect("validated at construction")
    }

    /// The series tolerance as a scalar, never below the type's resolution.
    pub(crate) fn tol<S: Real>(&self) -> S {
        lit::<S>(self.series_tol).max(S::epsilon())
    }
}
