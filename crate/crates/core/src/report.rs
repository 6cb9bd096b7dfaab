//! Structured experiment records.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub n: usize,
    pub value: f64,
    pub oracle: f64,
    pub gap: f64,
    /// Steps without a tolerance are informational and never fail a run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<f64>,
}

impl StepRecord {
    pub fn new(n: usize, value: f64, oracle: f64, tolerance: Option<f64>) -> Self {
        StepRecord { n, value, oracle, gap: (value - oracle).abs(), tolerance }
    }

    pub fn within_tolerance(&self) -> bool {
        self.tolerance.is_none_or(|tol| self.gap <= tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// Content hash of the instance that produced the report; filled in by
    /// whoever loaded the instance.
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub steps: Vec<StepRecord>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    /// Only recorded on request; omitted by default so reports stay byte-stable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

impl ExperimentReport {
    /// PASS iff every toleranced step is within tolerance and `extra_ok`;
    /// INCONCLUSIVE when there are no steps.
    pub fn new(experiment: impl Into<String>, steps: Vec<StepRecord>, extra_ok: bool, notes: Vec<String>) -> Self {
        let verdict = if steps.is_empty() {
            Verdict::Inconclusive
        } else if extra_ok && steps.iter().all(StepRecord::within_tolerance) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        ExperimentReport {
            experiment: experiment.into(),
            digest: String::new(),
            seed: None,
            steps,
            verdict,
            notes,
            wall_time_ms: None,
        }
    }
}
