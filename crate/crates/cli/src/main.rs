use std::process::ExitCode;

use clap::Parser;
use isolab_cli::{emit, run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let report = match run(&config) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &config) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for check in report.checks.iter().filter(|c| c.asserted && !c.passed) {
        eprintln!("check failed: {}", check.name);
    }
    if report.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
