//! JSON run reports.
//!
//! Schema (version "1"): one document per run with a stable field order,
//! so identical argv + seed reproduce the report byte for byte. Wall
//! clock lives only in the `timing` block, which consumers strip before
//! diffing.

use serde::{Deserialize, Serialize};

/// One named check with its predicted value, observation, and verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub predicted: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }
}

fn verdict(pass: bool) -> String {
    if pass { "pass" } else { "fail" }.to_string()
}

/// |observed - predicted| <= tolerance.
pub fn check_abs(name: &str, predicted: f64, observed: f64, tolerance: f64) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        predicted,
        observed,
        tolerance,
        verdict: verdict((observed - predicted).abs() <= tolerance),
        details: None,
    }
}

/// observed <= bound + tolerance.
pub fn check_at_most(name: &str, bound: f64, observed: f64, tolerance: f64) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        predicted: bound,
        observed,
        tolerance,
        verdict: verdict(observed <= bound + tolerance),
        details: None,
    }
}

/// observed >= bound - tolerance.
pub fn check_at_least(name: &str, bound: f64, observed: f64, tolerance: f64) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        predicted: bound,
        observed,
        tolerance,
        verdict: verdict(observed >= bound - tolerance),
        details: None,
    }
}

/// Wall-clock data, isolated so reports stay diffable.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TimingBlock {
    pub total_ms: u64,
    pub checks: Vec<(String, u64)>,
}

/// A full run report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub timing: TimingBlock,
}

impl RunReport {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        Self {
            version: "1".to_string(),
            command: command.to_string(),
            config,
            seed,
            checks: Vec::new(),
            timing: TimingBlock::default(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report as a JSON value with the timing block removed, for
    /// byte-stable comparisons.
    pub fn without_timing(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("report is an object").remove("timing");
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert!(check_abs("a", 0.5, 0.5004, 1e-3).passed());
        assert!(!check_abs("a", 0.5, 0.6, 1e-3).passed());
        assert!(check_at_most("b", 0.25, 0.25, 0.0).passed());
        assert!(!check_at_most("b", 0.25, 0.2501, 0.0).passed());
        assert!(check_at_least("c", 0.1, 0.5, 0.0).passed());
        assert!(!check_at_least("c", 0.1, 0.05, 0.0).passed());
    }

    #[test]
    fn timing_stripped_comparison() {
        let mut a = RunReport::new("x", serde_json::json!({"n": 3}), 7);
        a.checks.push(check_abs("a", 1.0, 1.0, 0.0));
        let mut b = a.clone();
        b.timing.total_ms = 999;
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.without_timing(), b.without_timing());
    }

    #[test]
    fn details_serialized_only_when_present() {
        let c = check_abs("a", 1.0, 1.0, 0.0);
        assert!(!serde_json::to_string(&c).unwrap().contains("details"));
        let c = c.with_details(serde_json::json!({"note": 1}));
        assert!(serde_json::to_string(&c).unwrap().contains("details"));
    }
}
