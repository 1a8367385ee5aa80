//! Numerical verification suites for the fractional heat semigroup.

// NaN-rejecting comparisons are written as `!(a > b)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::path::Path;

pub mod config;
pub mod data;
pub mod report;
pub mod suites;

pub use config::{Config, ConfigError, Suite};
pub use report::{Check, Report};

/// Why a run did not produce a passing report.
#[derive(Debug)]
pub enum RunError {
    Numerics(fracdiff::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Numerics(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "cannot write report: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Runs a suite and writes its report below `out`.
pub fn run(cfg: &Config, out: &Path) -> Result<Report, RunError> {
    let report = suites::run(cfg, Some(out)).map_err(RunError::Numerics)?;
    report.write(out, cfg).map_err(RunError::Io)?;
    Ok(report)
}

/// Suite names, their criteria and what they check.
pub fn list_suites() -> String {
    let mut s = String::new();
    for suite in Suite::ALL {
        let crit: Vec<String> = suite.criteria().iter().map(u8::to_string).collect();
        let _ = writeln!(s, "{:<14} criteria {:<8} {}", suite.name(), crit.join(","), suite.anchor());
    }
    s
}
