//! Runs every suite on its defaults and prints one verdict per criterion.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use fracdiff_cli::{suites, Config, Suite};

fn main() -> ExitCode {
    let mut verdicts: BTreeMap<u8, Vec<String>> = BTreeMap::new();
    for suite in Suite::ALL {
        let start = Instant::now();
        let cfg = Config::defaults(suite);
        match suites::run(&cfg, None) {
            Ok(report) => {
                for &n in suite.criteria() {
                    let failed: Vec<String> = report.criterion(n).filter(|c| !c.pass).map(|c| c.name.clone()).collect();
                    if report.criterion(n).next().is_none() {
                        verdicts.entry(n).or_default().push("no checks recorded".into());
                    }
                    verdicts.entry(n).or_default().extend(failed);
                }
                for line in report.lines() {
                    println!("  {suite}: {line}");
                }
            }
            Err(e) => {
                for &n in suite.criteria() {
                    verdicts.entry(n).or_default().push(format!("{suite} suite failed: {e}"));
                }
            }
        }
        println!("  {suite}: {:.1}s", start.elapsed().as_secs_f64());
    }
    let mut ok = true;
    for n in 1..=10u8 {
        let failures = verdicts.get(&n).cloned().unwrap_or_else(|| vec!["not covered".into()]);
        if failures.is_empty() {
            println!("criterion {n}: PASS");
        } else {
            ok = false;
            println!("criterion {n}: FAIL ({})", failures.join(", "));
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
