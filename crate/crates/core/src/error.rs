use thiserror::Error;

use crate::lattice::HexIndex;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum HexError {
    #[error("homogeneous coordinates must sum to zero, got {t1} + {t2} + {t3} = {sum:e}")]
    NotOnPlane { t1: f64, t2: f64, t3: f64, sum: f64 },

    #[error("frequency index ({k1}, {k2}, {k3}) does not sum to zero")]
    IndexNotOnPlane { k1: i64, k2: i64, k3: i64 },

    #[error("radius rho = {0} outside [0, 1)")]
    RhoOutOfRange(f64),

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("grid size {0} is too small (need at least 4 points per axis)")]
    GridTooSmall(usize),

    #[error("norm exponent p = {0} must be at least 1")]
    InvalidExponent(f64),

    #[error("index {index} has degree {degree} above the declared max_degree {max_degree}")]
    DegreeTooLarge {
        index: HexIndex,
        degree: u32,
        max_degree: u32,
    },

    #[error("spectrum is not conjugate-symmetric at {0}")]
    NotHermitian(HexIndex),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed spectral file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, HexError>;
