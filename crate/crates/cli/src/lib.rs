//! Batch driver for the hexagonal summation experiments.
//!
//! Exit status: 0 when every assertion holds, 1 on an assertion failure,
//! 2 on a configuration or I/O error.

pub mod config;
pub mod error;
pub mod family;
pub mod report;
pub mod sweeps;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use config::{Args, Command, ExperimentConfig};
use error::CliError;
use report::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Verify => verify::run_verify(cfg),
        Command::Kernel => sweeps::run_kernel(cfg),
        Command::Bernstein => sweeps::run_bernstein(cfg),
        Command::Approximate => sweeps::run_approximate(cfg),
        Command::Rates => sweeps::run_rates(cfg),
        Command::Kfun => sweeps::run_kfun(cfg),
    }
}

fn write_report(cfg: &ExperimentConfig, report: &Report) -> Result<(), CliError> {
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
        }
    }
}

/// Parses `argv`, runs the command, writes the report and returns the exit
/// status. Diagnostics go to stderr.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = ExperimentConfig::resolve(args).and_then(|cfg| {
        let report = run(&cfg)?;
        write_report(&cfg, &report)?;
        Ok(report)
    });
    match outcome {
        Ok(report) if report.passed() => EXIT_PASS,
        Ok(report) => {
            for f in &report.failures {
                eprintln!("assertion failed: {}", f.what);
            }
            EXIT_ASSERTION
        }
        Err(e) => {
            eprintln!("hexsum: {e}");
            EXIT_ERROR
        }
    }
}
