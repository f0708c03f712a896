//! Machine-readable certification reports.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub wall_time_ms: f64,
}

impl Check {
    /// Pass iff residual <= tolerance.
    pub fn from_residual(name: &str, residual: f64, tolerance: f64, wall_time_ms: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: residual <= tolerance,
            residual,
            tolerance,
            wall_time_ms,
        }
    }

    /// Boolean check: residual is 0 on success, 1 on failure.
    pub fn from_flag(name: &str, ok: bool, wall_time_ms: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: ok,
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.5,
            wall_time_ms,
        }
    }
}

/// Plot-ready numeric table (convergence ladders, decay tables).
#[derive(Debug, Clone, Serialize)]
pub struct ReportTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub refine_levels: usize,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub tables: Vec<ReportTable>,
}

impl SuiteReport {
    pub fn new(
        suite: &str,
        seed: u64,
        refine_levels: usize,
        checks: Vec<Check>,
        tables: Vec<ReportTable>,
    ) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            seed,
            refine_levels,
            pass,
            checks,
            tables,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// One line per check, for terminal output.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {:<42} residual {:>10.3e}  tol {:>8.1e}  ({:.0} ms)",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.residual,
                    c.tolerance,
                    c.wall_time_ms
                )
            })
            .collect()
    }
}
