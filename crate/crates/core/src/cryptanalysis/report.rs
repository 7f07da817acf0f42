//! Uniform JSON report shared by all attacks.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackStatus {
    Ok,
    Failed,
}

/// Method-specific fields are flattened into the top level of the JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub method: String,
    pub status: AttackStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    /// Character accuracy against a supplied ground truth, in [0, 1].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Only set when timing was requested, so reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(flatten)]
    pub details: Map<String, Value>,
}

impl AttackReport {
    pub fn new(method: &str, status: AttackStatus) -> Self {
        AttackReport {
            method: method.to_string(),
            status,
            reason: None,
            candidate: None,
            key: None,
            score: None,
            accuracy: None,
            warnings: Vec::new(),
            wall_time_ms: None,
            details: Map::new(),
        }
    }

    pub fn failed(method: &str, reason: impl Into<String>) -> Self {
        let mut r = Self::new(method, AttackStatus::Failed);
        r.reason = Some(reason.into());
        r
    }

    pub fn detail(mut self, name: &str, value: impl Serialize) -> Self {
        self.details.insert(
            name.to_string(),
            serde_json::to_value(value).expect("serializable detail"),
        );
        self
    }

    pub fn with_accuracy(mut self, candidate: &str, truth: &str) -> Self {
        self.accuracy = Some(char_accuracy(candidate, truth));
        self
    }

    pub fn timed(mut self, started: std::time::Instant) -> Self {
        self.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
        self
    }

    pub fn is_ok(&self) -> bool {
        self.status == AttackStatus::Ok
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Fraction of the characters of `truth` matched at the same position in
/// `candidate`, letters compared case-insensitively. Empty truth scores 1.
pub fn char_accuracy(candidate: &str, truth: &str) -> f64 {
    let truth: Vec<char> = truth.chars().collect();
    if truth.is_empty() {
        return 1.0;
    }
    let hits = truth
        .iter()
        .zip(candidate.chars())
        .filter(|(t, c)| t.to_lowercase().eq(c.to_lowercase()))
        .count();
    hits as f64 / truth.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy() {
        assert_eq!(char_accuracy("abcd", "abcd"), 1.0);
        assert_eq!(char_accuracy("ABxd", "abcd"), 0.75);
        assert_eq!(char_accuracy("ab", "abcd"), 0.5);
        assert_eq!(char_accuracy("abcdef", "abcd"), 1.0);
        assert_eq!(char_accuracy("", ""), 1.0);
    }

    #[test]
    fn flattened_json() {
        let r = AttackReport::new("bm", AttackStatus::Ok).detail("L", 2).detail("taps", [2]);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["method"], "bm");
        assert_eq!(v["status"], "ok");
        assert_eq!(v["L"], 2);
        assert_eq!(v["taps"][0], 2);
        assert!(v.get("reason").is_none());
        let back: AttackReport = serde_json::from_value(v).unwrap();
        assert_eq!(back.details["L"], 2);
        let f = AttackReport::failed("x", "why");
        assert!(!f.is_ok());
        assert!(f.to_json().contains("\"failed\""));
    }
}
