//! Verification reports shared by every checker.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Serde adapters for floats that may be ±∞ or NaN (a trial that errored
/// carries an infinite residual). JSON has no such numbers, so they are
/// written as the strings "inf", "-inf" and "nan".
mod real {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(x: f64) -> Repr {
        match x {
            x if x.is_finite() => Repr::Num(x),
            x if x.is_nan() => Repr::Text("nan".into()),
            x if x > 0.0 => Repr::Text("inf".into()),
            _ => Repr::Text("-inf".into()),
        }
    }

    fn from_repr(r: Repr) -> Result<f64, String> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(format!("expected a number, \"inf\", \"-inf\" or \"nan\", found \"{other}\"")),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?).map_err(D::Error::custom)
    }

    pub mod map {
        use super::*;

        pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
            s.collect_map(m.iter().map(|(k, v)| (k, to_repr(*v))))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
            BTreeMap::<String, Repr>::deserialize(d)?
                .into_iter()
                .map(|(k, v)| from_repr(v).map(|x| (k, x)).map_err(D::Error::custom))
                .collect()
        }
    }
}

/// One trial of a verifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    /// Seed that replays this trial alone, when the trial was randomized.
    pub seed: Option<u64>,
    pub inputs_digest: String,
    pub passed: bool,
    /// Primary residual compared against the pass threshold.
    #[serde(with = "real")]
    pub residual: f64,
    #[serde(default, with = "real::map")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
}

impl TrialRecord {
    pub fn new(index: usize, seed: Option<u64>, inputs_digest: String) -> Self {
        TrialRecord {
            index,
            seed,
            inputs_digest,
            passed: true,
            residual: 0.0,
            metrics: BTreeMap::new(),
            notes: BTreeMap::new(),
        }
    }

    pub fn metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, key: &str, value: impl Into<String>) -> Self {
        self.notes.insert(key.to_string(), value.into());
        self
    }

    pub fn outcome(mut self, passed: bool, residual: f64) -> Self {
        self.passed = passed;
        self.residual = residual;
        self
    }
}

/// Pass/fail summary of a verifier over one or more trials.
///
/// `passed` holds exactly when every trial passed and the run was not
/// rejected. A rejected report means the inputs violated the verifier's
/// precondition; it says nothing about the identity being checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    #[serde(default)]
    pub rejected: Option<String>,
    #[serde(with = "real")]
    pub worst_residual: f64,
    pub trials: Vec<TrialRecord>,
    /// Whole-run quantities such as class counts. Informational only; any
    /// run-level condition is recorded as a trial so that the pass flag
    /// always equals "every trial passed".
    #[serde(default, with = "real::map")]
    pub aggregate: BTreeMap<String, f64>,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
    #[serde(default)]
    pub wall_time_secs: f64,
}

impl VerificationReport {
    /// Assembles a report from trials already sorted by index.
    pub fn from_trials(check: &str, trials: Vec<TrialRecord>) -> Self {
        let passed = trials.iter().all(|t| t.passed);
        let worst = trials.iter().map(|t| t.residual).fold(0.0, f64::max);
        VerificationReport {
            check: check.to_string(),
            passed,
            rejected: None,
            worst_residual: worst,
            trials,
            aggregate: BTreeMap::new(),
            config: BTreeMap::new(),
            wall_time_secs: 0.0,
        }
    }

    pub fn single(check: &str, trial: TrialRecord) -> Self {
        Self::from_trials(check, vec![trial])
    }

    pub fn rejected(check: &str, reason: impl Into<String>) -> Self {
        VerificationReport {
            check: check.to_string(),
            passed: false,
            rejected: Some(reason.into()),
            worst_residual: 0.0,
            trials: Vec::new(),
            aggregate: BTreeMap::new(),
            config: BTreeMap::new(),
            wall_time_secs: 0.0,
        }
    }

    pub fn is_rejected(&self) -> bool {
        self.rejected.is_some()
    }

    pub fn with_config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_aggregate(mut self, key: &str, value: f64) -> Self {
        self.aggregate.insert(key.to_string(), value);
        self
    }

    /// First failing trial, if any.
    pub fn first_failure(&self) -> Option<&TrialRecord> {
        self.trials.iter().find(|t| !t.passed)
    }

    /// Trial metric of the single-trial form.
    pub fn metric(&self, key: &str) -> Option<f64> {
        self.trials.first().and_then(|t| t.metrics.get(key).copied())
    }

    /// Largest value of a metric across trials.
    pub fn max_metric(&self, key: &str) -> Option<f64> {
        self.trials
            .iter()
            .filter_map(|t| t.metrics.get(key).copied())
            .reduce(f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: VerificationReport =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(report)
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let status = match (&self.rejected, self.passed) {
            (Some(r), _) => format!("REJECTED ({r})"),
            (None, true) => "PASS".to_string(),
            (None, false) => "FAIL".to_string(),
        };
        let mut out = format!(
            "{}: {} ({} trial(s), worst residual {:.3e})",
            self.check,
            status,
            self.trials.len(),
            self.worst_residual
        );
        if let Some(fail) = self.first_failure() {
            out.push_str(&format!(
                "\n  first failure: trial {} seed {:?} residual {:.3e}",
                fail.index, fail.seed, fail.residual
            ));
        }
        out
    }
}

/// Short SHA-256 digest of a list of matrices and scalars.
pub fn digest_inputs(matrices: &[&CMat], scalars: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for m in matrices {
        hasher.update((m.nrows() as u64).to_le_bytes());
        hasher.update((m.ncols() as u64).to_le_bytes());
        for z in m.iter() {
            hasher.update(z.re.to_le_bytes());
            hasher.update(z.im.to_le_bytes());
        }
    }
    for s in scalars {
        hasher.update(s.to_le_bytes());
    }
    let out = hasher.finalize();
    hex::encode(&out[..8])
}
