//! Fourier analysis on the regular hexagon and Taylor-Abel-Poisson
//! summation of hexagonal Fourier series.
//!
//! * [`lattice`]: homogeneous coordinates, the fundamental hexagon, folding
//!   and frequency shells.
//! * [`fourier`]: sampling grids, basis functions, analysis and synthesis,
//!   grid `L_p` norms.
//! * [`poisson`]: classical and hexagonal Poisson kernels and their
//!   ρ-derivatives.
//! * [`taylor_abel_poisson`]: the means `A_{ρ,r}`, radial derivatives,
//!   K-functional brackets and the remainder identity.

pub mod error;
pub mod families;
pub mod fourier;
pub mod lattice;
pub mod poisson;
pub mod quadrature;
pub mod rational;
pub mod reduce;
pub mod spectral_file;
pub mod stats;
pub mod taylor_abel_poisson;

pub use error::{HexError, Result};
pub use fourier::{analyze, lp_norm, make_grid, phi, synthesize, Exponent, GridFunction, HexGrid, SpectralFunction};
pub use lattice::{fold, from_cartesian, index_shell, is_in_omega, to_cartesian, HexIndex, HexPoint};
