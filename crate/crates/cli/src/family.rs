//! Test functions selectable by name.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hexsum_core::families::{analytic_kernel, polynomial, shell_decay};
use hexsum_core::{spectral_file, HexIndex, SpectralFunction};

use crate::error::CliError;

/// `ρ0` of the analytic family.
pub const ANALYTIC_RHO0: f64 = 0.5;
/// Truncation degree of the analytic and shell-decay families.
pub const FAMILY_DEGREE: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `P(ρ0, ·)` truncated at [`FAMILY_DEGREE`].
    Analytic,
    /// Shell energy `(1 + ν)^{-2s}`, truncated at [`FAMILY_DEGREE`].
    ShellDecay(f64),
    Polynomial(u32),
    /// Polynomial of degree `r - 1`, the largest one left fixed by `A_{ρ,r}`.
    SaturationPolynomial,
    /// `φ_k` with `k = (ν, -ν, 0)`.
    Basis(u32),
    File(PathBuf),
}

impl Family {
    /// The spectral function for order `r` (only the saturation polynomial
    /// depends on it).
    pub fn build(&self, r: u32) -> Result<SpectralFunction, CliError> {
        Ok(match self {
            Family::Analytic => analytic_kernel(ANALYTIC_RHO0, FAMILY_DEGREE),
            Family::ShellDecay(s) => shell_decay(*s, FAMILY_DEGREE),
            Family::Polynomial(d) => polynomial(*d),
            Family::SaturationPolynomial => polynomial(r.saturating_sub(1)),
            Family::Basis(nu) => SpectralFunction::basis(HexIndex::from_pair(*nu as i64, -(*nu as i64))),
            Family::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                spectral_file::from_json(&text).map_err(|source| CliError::Input {
                    context: path.display().to_string(),
                    source,
                })?
            }
        })
    }

    /// Label for report rows; for the saturation polynomial it names the
    /// resolved degree.
    pub fn label(&self, r: u32) -> String {
        match self {
            Family::SaturationPolynomial => Family::Polynomial(r.saturating_sub(1)).to_string(),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Analytic => f.write_str("analytic"),
            Family::ShellDecay(s) => write!(f, "shell-decay:{s}"),
            Family::Polynomial(d) => write!(f, "polynomial:{d}"),
            Family::SaturationPolynomial => f.write_str("polynomial"),
            Family::Basis(nu) => write!(f, "basis:{nu}"),
            Family::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || format!("unknown family {s:?}; expected analytic, shell-decay:S, polynomial[:D], basis:NU");
        match (name, arg) {
            ("analytic", None) => Ok(Family::Analytic),
            ("shell-decay", Some(a)) => match a.parse::<f64>() {
                Ok(v) if v > 0.5 && v.is_finite() => Ok(Family::ShellDecay(v)),
                _ => Err(format!("shell-decay exponent must exceed 1/2, got {a:?}")),
            },
            ("polynomial", None) => Ok(Family::SaturationPolynomial),
            ("polynomial", Some(a)) => a.parse().map(Family::Polynomial).map_err(|_| bad()),
            ("basis", Some(a)) => a.parse().map(Family::Basis).map_err(|_| bad()),
            ("file", Some(a)) => Ok(Family::File(PathBuf::from(a))),
            _ => Err(bad()),
        }
    }
}
