//! Built-in test functions with known smoothness.

use num_complex::Complex64;

use crate::fourier::SpectralFunction;
use crate::lattice::{indices_up_to, HexIndex};

/// The Poisson kernel `P(ρ0, ·)`: coefficient `ρ0^{|k|}` on every index up
/// to `max_degree`. Analytic; converges at the saturation rate.
pub fn analytic_kernel(rho0: f64, max_degree: u32) -> SpectralFunction {
    shellwise(max_degree, |nu| rho0.powi(nu as i32))
}

/// `L_2` norm of the part of `P(ρ0, ·)` above `max_degree`,
/// `(Σ_{ν > D} 6ν ρ0^{2ν})^{1/2}`.
pub fn analytic_kernel_tail_l2(rho0: f64, max_degree: u32) -> f64 {
    let q = rho0 * rho0;
    let m = max_degree as f64 + 1.0;
    (6.0 * q.powf(m) * (m * (1.0 - q) + q) / (1.0 - q).powi(2)).sqrt()
}

/// Shell-decay function `f_s`: `f̂(0) = 1` and
/// `f̂(k) = (1 + |k|)^{-s} / √(6|k|)` otherwise, so each shell carries energy
/// `(1 + ν)^{-2s}`.
pub fn shell_decay(s: f64, max_degree: u32) -> SpectralFunction {
    shellwise(max_degree, |nu| {
        if nu == 0 {
            1.0
        } else {
            (1.0 + nu as f64).powf(-s) / (6.0 * nu as f64).sqrt()
        }
    })
}

/// `L_2` norm of the part of `f_s` above `max_degree`.
pub fn shell_decay_tail_l2(s: f64, max_degree: u32) -> f64 {
    // Σ_{ν > D} (1+ν)^{-2s} <= ∫_{D+1}^∞ x^{-2s} dx
    let a = max_degree as f64 + 1.0;
    (a.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0)).sqrt()
}

/// Real trigonometric polynomial of exact degree `degree` with
/// coefficients `1 / (1 + |k|)`.
pub fn polynomial(degree: u32) -> SpectralFunction {
    shellwise(degree, |nu| 1.0 / (1.0 + nu as f64))
}

fn shellwise<F: Fn(u32) -> f64>(max_degree: u32, coeff: F) -> SpectralFunction {
    SpectralFunction::from_entries(
        max_degree,
        indices_up_to(max_degree)
            .into_iter()
            .map(|k: HexIndex| (k, Complex64::new(coeff(k.degree()), 0.0))),
    )
    .expect("indices respect max_degree")
    .mark_real()
    .expect("shellwise coefficients are conjugate-symmetric")
}
