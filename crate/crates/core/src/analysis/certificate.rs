use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::metric::Interval;
use crate::scalar::Scalar;

pub const CERTIFICATE_SCHEMA: u32 = 1;

/// Machine-readable record of a check: what was claimed, how it was
/// checked, and the outcome (witnesses or a violation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub claim: String,
    pub mode: String,
    pub passed: bool,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<Interval>>,
    pub timing_ms: u128,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(claim: impl Into<String>, mode: impl Into<String>, passed: bool, result: impl Serialize) -> Result<Self> {
        Ok(Certificate {
            schema: CERTIFICATE_SCHEMA,
            claim: claim.into(),
            mode: mode.into(),
            passed,
            result: serde_json::to_value(result)?,
            seed: None,
            delta: None,
            window: None,
            timing_ms: 0,
            notes: Vec::new(),
        })
    }

    pub fn timed(mut self, since: Instant) -> Self {
        self.timing_ms = since.elapsed().as_millis();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
