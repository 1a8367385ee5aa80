//! Suite results: named checks, CSV tables and the files written per run.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::{Config, Suite};

/// One pass/fail comparison of a measured against a predicted value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    #[serde(skip)]
    pub name: String,
    #[serde(skip)]
    pub criterion: u8,
    pub measured: f64,
    pub predicted: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `measured ≤ bound`.
    pub fn at_most(name: impl Into<String>, criterion: u8, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), criterion, measured, predicted: bound, tolerance: 0.0, pass: measured <= bound }
    }

    /// `measured ≥ bound`.
    pub fn at_least(name: impl Into<String>, criterion: u8, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), criterion, measured, predicted: bound, tolerance: 0.0, pass: measured >= bound }
    }

    /// `measured ≤ predicted + tolerance`.
    pub fn not_above(name: impl Into<String>, criterion: u8, measured: f64, predicted: f64, tolerance: f64) -> Self {
        Self { name: name.into(), criterion, measured, predicted, tolerance, pass: measured <= predicted + tolerance }
    }

    /// `|measured - predicted| ≤ tolerance`.
    pub fn near(name: impl Into<String>, criterion: u8, measured: f64, predicted: f64, tolerance: f64) -> Self {
        Self { name: name.into(), criterion, measured, predicted, tolerance, pass: (measured - predicted).abs() <= tolerance }
    }

    /// A reported quantity that only has to be finite.
    pub fn finite(name: impl Into<String>, criterion: u8, measured: f64) -> Self {
        Self { name: name.into(), criterion, measured, predicted: f64::INFINITY, tolerance: 0.0, pass: measured.is_finite() }
    }

    /// A boolean outcome, recorded as 1 or 0.
    pub fn holds(name: impl Into<String>, criterion: u8, ok: bool) -> Self {
        Self { name: name.into(), criterion, measured: if ok { 1.0 } else { 0.0 }, predicted: 1.0, tolerance: 0.0, pass: ok }
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
    /// `(file name, CSV body)`
    pub tables: Vec<(String, String)>,
}

impl Report {
    pub fn new(suite: Suite) -> Self {
        Self { suite, checks: Vec::new(), tables: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn table(&mut self, name: impl Into<String>, body: String) {
        self.tables.push((name.into(), body));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Checks belonging to one acceptance criterion.
    pub fn criterion(&self, n: u8) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.criterion == n)
    }

    /// Map from check name to `{measured, predicted, tolerance, pass}`;
    /// non-finite numbers become `null`.
    pub fn summary_json(&self) -> String {
        let map: BTreeMap<&str, &Check> = self.checks.iter().map(|c| (c.name.as_str(), c)).collect();
        serde_json::to_string_pretty(&map).expect("summary serializes")
    }

    /// Writes `summary.json`, `metadata.json`, `config.toml` and the tables.
    pub fn write(&self, dir: &Path, config: &Config) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.json"), self.summary_json() + "\n")?;
        let meta = serde_json::json!({
            "suite": self.suite.name(),
            "seed": config.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "tolerances": config.tolerances,
            "passed": self.passed(),
        });
        fs::write(dir.join("metadata.json"), serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n")?;
        fs::write(dir.join("config.toml"), config.to_toml())?;
        for (name, body) in &self.tables {
            fs::write(dir.join(name), body)?;
        }
        Ok(())
    }

    /// One line per check.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "[{}] {:<44} measured {:>13.6e}  predicted {:>13.6e}  tol {:.2e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.predicted,
                    c.tolerance
                )
            })
            .collect()
    }
}

/// CSV with a header row and 17-significant-digit floats.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| fracdiff::expansion::fmt17(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        assert!(Check::at_most("a", 1, 1.0, 1.0).pass);
        assert!(!Check::at_most("a", 1, f64::NAN, 1.0).pass);
        assert!(Check::not_above("a", 4, -1.9, -2.0, 0.15).pass);
        assert!(!Check::near("a", 4, -1.7, -2.0, 0.15).pass);
        assert!(!Check::finite("a", 6, f64::INFINITY).pass);
    }

    #[test]
    fn summary_is_keyed_by_name_and_nulls_non_finite() {
        let mut r = Report::new(Suite::Kernel);
        r.push(Check::finite("b", 2, 3.0));
        r.push(Check::at_most("a", 1, 0.5, 1.0));
        let v: serde_json::Value = serde_json::from_str(&r.summary_json()).unwrap();
        assert_eq!(v["a"]["pass"], true);
        assert!(v["b"]["predicted"].is_null());
        assert_eq!(csv(&["t", "v"], &[vec![1.0, 0.1]]), "t,v\n1.0000000000000000e0,1.0000000000000001e-1\n");
    }
}
