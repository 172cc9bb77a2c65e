//! Command-line and config-file settings.
//!
//! Precedence: flags, then the JSON config file, then per-command defaults.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use hexsum_core::Exponent;
use serde::Deserialize;

use crate::error::CliError;
use crate::family::Family;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Kernel,
    Bernstein,
    Approximate,
    Rates,
    Kfun,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Verify => "verify",
            Command::Kernel => "kernel",
            Command::Bernstein => "bernstein",
            Command::Approximate => "approximate",
            Command::Rates => "rates",
            Command::Kfun => "kfun",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Grid resolution: fixed, or chosen from `ρ` (kernel sweeps) or from the
/// input degree (spectral experiments).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for GridChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "auto" => Ok(GridChoice::Auto),
            other => match other.parse::<usize>() {
                Ok(n) if n >= 4 => Ok(GridChoice::Fixed(n)),
                _ => Err(format!("grid must be \"auto\" or an integer >= 4, got {other:?}")),
            },
        }
    }
}

impl fmt::Display for GridChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridChoice::Auto => f.write_str("auto"),
            GridChoice::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hexsum", version, about = "Summation experiments for Fourier series on the hexagon")]
pub struct Args {
    pub command: Command,
    /// Smallest k of the ladder rho = 1 - 2^-k
    #[arg(long)]
    pub rho_kmin: Option<i32>,
    /// Largest k of the ladder rho = 1 - 2^-k
    #[arg(long)]
    pub rho_kmax: Option<i32>,
    /// Order r of the summation method or kernel derivative
    #[arg(long)]
    pub r: Option<u32>,
    /// Order n of the radial derivative in the K-functional
    #[arg(long)]
    pub n: Option<u32>,
    /// Norm exponent: a number >= 1 or "inf"
    #[arg(long)]
    pub p: Option<String>,
    /// Grid points per axis, or "auto"
    #[arg(long)]
    pub grid: Option<String>,
    /// Spectral function JSON file
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for randomized checks
    #[arg(long)]
    pub seed: Option<u64>,
    /// Built-in test function: analytic, shell-decay:S, polynomial:D, basis:NU
    #[arg(long)]
    pub family: Option<String>,
}

/// Keys accepted in a config file. `p` may be a number or `"inf"`, `grid` an
/// integer or `"auto"`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub rho_kmin: Option<i32>,
    pub rho_kmax: Option<i32>,
    pub r: Option<u32>,
    pub n: Option<u32>,
    pub p: Option<serde_json::Value>,
    pub grid: Option<serde_json::Value>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub family: Option<String>,
}

impl FileConfig {
    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

fn value_to_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub k_min: i32,
    pub k_max: i32,
    /// `None` runs the command's default set of orders.
    pub r: Option<u32>,
    pub n: Option<u32>,
    pub p: Exponent,
    pub grid: GridChoice,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub families: Vec<Family>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

fn default_ladder(command: Command) -> (i32, i32) {
    match command {
        Command::Verify => (1, 7),
        Command::Kernel => (1, 4),
        Command::Bernstein => (1, 7),
        Command::Approximate => (1, 8),
        Command::Rates => (2, 8),
        Command::Kfun => (1, 6),
    }
}

fn default_p(command: Command) -> Exponent {
    match command {
        Command::Approximate | Command::Rates => Exponent::Finite(2.0),
        _ => Exponent::Finite(1.0),
    }
}

fn default_families(command: Command) -> Vec<Family> {
    match command {
        Command::Rates => vec![
            Family::Analytic,
            Family::ShellDecay(2.0),
            Family::ShellDecay(3.0),
            Family::ShellDecay(4.0),
            Family::SaturationPolynomial,
        ],
        Command::Kfun => vec![Family::ShellDecay(2.0), Family::ShellDecay(3.0), Family::ShellDecay(4.0)],
        _ => vec![Family::Analytic],
    }
}

impl ExperimentConfig {
    pub fn resolve(args: Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::read(path)?,
            None => FileConfig::default(),
        };
        let command = args.command;
        let (dk_min, dk_max) = default_ladder(command);
        let k_min = args.rho_kmin.or(file.rho_kmin).unwrap_or(dk_min);
        let k_max = args.rho_kmax.or(file.rho_kmax).unwrap_or(dk_max);
        if k_min > k_max {
            return Err(CliError::Config(format!("rho-kmin {k_min} exceeds rho-kmax {k_max}")));
        }
        if k_min < 1 {
            return Err(CliError::Config(format!("rho-kmin must be at least 1, got {k_min}")));
        }
        if k_max > 40 {
            return Err(CliError::Config(format!("rho-kmax {k_max} leaves no double precision room below 1")));
        }

        let p = match args.p.or_else(|| file.p.as_ref().map(value_to_string)) {
            Some(s) => s.parse::<Exponent>().map_err(|e| CliError::Config(e.to_string()))?,
            None => default_p(command),
        };
        let grid = match args.grid.or_else(|| file.grid.as_ref().map(value_to_string)) {
            Some(s) => s.parse::<GridChoice>().map_err(CliError::Config)?,
            None => GridChoice::Auto,
        };
        let input = args.input.or(file.input);
        let families = match (args.family.or(file.family), &input) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("--family and --input are mutually exclusive".into()));
            }
            (Some(name), None) => vec![name.parse::<Family>().map_err(CliError::Config)?],
            (None, Some(path)) => vec![Family::File(path.clone())],
            (None, None) => default_families(command),
        };

        Ok(ExperimentConfig {
            command,
            k_min,
            k_max,
            r: args.r.or(file.r),
            n: args.n.or(file.n),
            p,
            grid,
            input,
            out: args.out.or(file.out),
            format: args.format.or(file.format).unwrap_or_default(),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            families,
        })
    }

    /// `(k, ρ)` pairs of the ladder `ρ = 1 - 2^{-k}`.
    pub fn ladder(&self) -> Vec<(i32, f64)> {
        (self.k_min..=self.k_max).map(|k| (k, 1.0 - 2f64.powi(-k))).collect()
    }
}
