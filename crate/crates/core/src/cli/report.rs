use serde::{Deserialize, Serialize};

use crate::config::TruncationConfig;
use crate::error::QError;

/// Serializes `f64` with 17 significant digits and non-finite values as
/// `null`. Reading back yields the identical double, so re-serializing a
/// parsed report reproduces it byte for byte.
pub mod sig17 {
    use serde::de::Error as _;
    use serde::ser::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn format(x: f64) -> Option<String> {
        x.is_finite().then(|| format!("{x:.16e}"))
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        match format(*x) {
            Some(text) => RawValue::from_string(text)
                .map_err(S::Error::custom)?
                .serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let v = Option::<serde_json::Number>::deserialize(d)?;
        match v {
            None => Ok(f64::NAN),
            Some(n) => n.as_f64().ok_or_else(|| D::Error::custom("number out of range")),
        }
    }
}

/// One verified identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity family the check belongs to, such as
    /// `hermite-orthogonality-r0`.
    pub tag: String,
    #[serde(with = "sig17")]
    pub residual: f64,
    #[serde(with = "sig17")]
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, tag: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            tag: tag.into(),
            residual,
            tol,
            // NaN fails.
            pass: residual <= tol,
            error: None,
        }
    }

    pub fn failed(name: impl Into<String>, tag: impl Into<String>, tol: f64, err: &QError) -> Self {
        Self {
            name: name.into(),
            tag: tag.into(),
            residual: f64::NAN,
            tol,
            pass: false,
            error: Some(err.to_string()),
        }
    }
}

/// Outcome of a `verify` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    #[serde(with = "sig17")]
    pub q: f64,
    pub config: TruncationConfig,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    #[serde(with = "sig17")]
    pub seconds: f64,
}

impl RunReport {
    /// Sorts the records by name and derives the overall flag.
    pub fn new(
        command: String,
        q: f64,
        config: TruncationConfig,
        mut checks: Vec<CheckRecord>,
        seconds: f64,
    ) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = checks.iter().all(|c| c.pass);
        Self {
            command,
            q,
            config,
            checks,
            pass,
            seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
