//! Machine-readable verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1.0";

/// Non-finite residuals are stored as this value so the JSON stays valid.
pub const NON_FINITE_RESIDUAL: f64 = f64::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRecord {
    pub name: String,
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionRecord {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub schema_version: String,
    pub suite: String,
    pub seed: u64,
    pub manifold: Option<String>,
    pub connection: Option<ConnectionRecord>,
    pub passed: bool,
    /// Points discarded because evaluation failed there.
    pub resampled_points: usize,
    pub checks: Vec<CheckRecord>,
    /// Reported quantities that are not residuals, such as commutant dimensions.
    pub metrics: BTreeMap<String, f64>,
    pub wall_time_seconds: f64,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Copy with the wall-time field zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport {
            wall_time_seconds: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<4} {:<40} max={:.3e} tol={:.1e} points={}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.tolerance,
                c.points
            ));
        }
        for (k, v) in &self.metrics {
            out.push_str(&format!("     {k:<40} {v}\n"));
        }
        out.push_str(&format!(
            "{}: {}\n",
            self.suite,
            if self.passed { "all checks passed" } else { "FAILED" }
        ));
        out
    }
}

/// Accumulates per-check maxima across sampled points.
#[derive(Debug, Default)]
pub struct ReportBuilder {
    checks: BTreeMap<String, (usize, f64, f64)>,
    overrides: BTreeMap<String, f64>,
    metrics: BTreeMap<String, f64>,
    resampled: usize,
}

impl ReportBuilder {
    pub fn new(overrides: BTreeMap<String, f64>) -> Self {
        ReportBuilder {
            overrides,
            ..Default::default()
        }
    }

    /// Records one observation of `name` with its default tolerance; a
    /// configured override takes precedence.
    pub fn record(&mut self, name: &str, residual: f64, tolerance: f64) {
        let tol = self.overrides.get(name).copied().unwrap_or(tolerance);
        let r = if residual.is_finite() {
            residual.abs()
        } else {
            NON_FINITE_RESIDUAL
        };
        let entry = self.checks.entry(name.to_string()).or_insert((0, 0.0, tol));
        entry.0 += 1;
        entry.1 = entry.1.max(r);
    }

    /// Folds in observations gathered by another builder.
    pub fn merge(&mut self, other: ReportBuilder) {
        for (name, (points, max, tol)) in other.checks {
            let tol = self.overrides.get(&name).copied().unwrap_or(tol);
            let entry = self.checks.entry(name).or_insert((0, 0.0, tol));
            entry.0 += points;
            entry.1 = entry.1.max(max);
        }
        self.metrics.extend(other.metrics);
        self.resampled += other.resampled;
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn resampled(&mut self) {
        self.resampled += 1;
    }

    pub fn finish(
        self,
        suite: &str,
        seed: u64,
        manifold: Option<String>,
        connection: Option<ConnectionRecord>,
        wall_time_seconds: f64,
    ) -> VerificationReport {
        let checks: Vec<CheckRecord> = self
            .checks
            .into_iter()
            .map(|(name, (points, max_residual, tolerance))| CheckRecord {
                passed: max_residual <= tolerance,
                name,
                points,
                max_residual,
                tolerance,
            })
            .collect();
        VerificationReport {
            schema_version: SCHEMA_VERSION.to_string(),
            suite: suite.to_string(),
            seed,
            manifold,
            connection,
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            resampled_points: self.resampled,
            checks,
            metrics: self.metrics,
            wall_time_seconds,
        }
    }
}
