use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracdiff_cli::{list_suites, Config, Suite};

#[derive(Parser)]
#[command(name = "fracdiff", version, about = "Verification suites for the fractional heat semigroup")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suite described by a TOML config
    Run {
        config: PathBuf,
        /// Override the suite named in the config
        #[arg(long)]
        suite: Option<String>,
        /// Override the output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print only the verdict
        #[arg(long)]
        quiet: bool,
    },
    /// List the available suites
    List,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            print!("{}", list_suites());
            ExitCode::SUCCESS
        }
        Command::Run { config, suite, out, quiet } => run(config, suite, out, quiet),
    }
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {msg}");
    ExitCode::from(2)
}

fn run(path: PathBuf, suite: Option<String>, out: Option<PathBuf>, quiet: bool) -> ExitCode {
    let suite = match suite.as_deref().map(|s| Suite::parse(s).ok_or(s)) {
        None => None,
        Some(Ok(s)) => Some(s),
        Some(Err(s)) => return config_error(format!("unknown suite '{s}'")),
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return config_error(format!("cannot read {}: {e}", path.display())),
    };
    let cfg = match Config::from_toml(&text, suite) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let out = out.unwrap_or_else(|| PathBuf::from(&cfg.out));
    let report = match fracdiff_cli::run(&cfg, &out) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if !quiet {
        for line in report.lines() {
            println!("{line}");
        }
    }
    if report.passed() {
        println!("{}: PASS ({})", cfg.suite, out.display());
        ExitCode::SUCCESS
    } else {
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        eprintln!("{}: FAIL: {}", cfg.suite, failed.join(", "));
        ExitCode::from(1)
    }
}
