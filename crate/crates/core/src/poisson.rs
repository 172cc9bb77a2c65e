//! Poisson kernels on the hexagon.
//!
//! The hexagonal kernel `P(ρ, t) = Σ_ν ρ^ν Σ_{k ∈ J_ν} φ_k(t)` factors
//! through the classical kernel `P_ρ(z) = (1 - ρ²) / (1 - 2ρ cos z + ρ²)`:
//!
//! ```text
//! P(ρ, t) = a(ρ) P_ρ(z1) P_ρ(z2) P_ρ(z3)
//!         + b(ρ) (P_ρ(z1) P_ρ(z2) + P_ρ(z1) P_ρ(z3) + P_ρ(z2) P_ρ(z3))
//! a(ρ) = (1 - ρ³) / (1 + ρ)³,   b(ρ) = ρ / (1 + ρ)²
//! ```
//!
//! ρ-derivatives of any order up to [`R_MAX`] are obtained from this product
//! form by the Leibniz rule, with exact derivatives of `a` and `b`.

use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HexError, Result};
use crate::fourier::HexGrid;
use crate::lattice::{shell_iter, HexPoint};
use crate::rational::{pair_weight, triple_weight};
use crate::reduce::{mean_f64, sum_complex};

/// Largest supported derivative order.
pub const R_MAX: usize = 6;

/// Samples required across the kernel peak by the automatic grid rule.
pub const PEAK_SAMPLES: f64 = 32.0;
pub const AUTO_GRID_MIN: usize = 64;
pub const AUTO_GRID_CAP: usize = 4096;

const FACTORIALS: [f64; R_MAX + 1] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];

/// Validated `(ρ, r)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    rho: f64,
    r: usize,
}

impl KernelEval {
    pub fn new(rho: f64, r: usize) -> Result<Self> {
        check_rho(rho)?;
        if r > R_MAX {
            return Err(HexError::OrderTooLarge { order: r, max: R_MAX });
        }
        Ok(Self { rho, r })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn r(&self) -> usize {
        self.r
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if (0.0..1.0).contains(&rho) {
        Ok(())
    } else {
        Err(HexError::RhoOutOfRange(rho))
    }
}

fn classical(rho: f64, z: f64) -> f64 {
    (1.0 - rho * rho) / (1.0 - 2.0 * rho * z.cos() + rho * rho)
}

/// `∂^j/∂ρ^j P_ρ(z)` for `j = 0..=r`.
///
/// Uses `P_ρ(z) = 2 Re 1/(1 - ρe^{iz}) - 1`, whose derivatives are
/// `2 Re j! e^{ijz} / (1 - ρe^{iz})^{j+1}`.
fn classical_table(rho: f64, z: f64, r: usize, out: &mut [f64; R_MAX + 1]) {
    out[0] = classical(rho, z);
    let e = Complex64::cis(z);
    let w = 1.0 / (1.0 - rho * e);
    let step = e * w;
    let mut term = w;
    for (j, slot) in out.iter_mut().enumerate().take(r + 1).skip(1) {
        term *= step * j as f64;
        *slot = 2.0 * term.re;
    }
}

/// `r`-th ρ-derivative of the classical Poisson kernel at angle `z`.
pub fn classical_kernel_deriv(rho: f64, z: f64, r: usize) -> Result<f64> {
    let k = KernelEval::new(rho, r)?;
    let mut table = [0.0; R_MAX + 1];
    classical_table(k.rho, z, k.r, &mut table);
    Ok(table[k.r])
}

/// `2 r! / (1 - ρ)^{r+1}`, the uniform bound on `|∂^r P_ρ(z)|`.
pub fn classical_deriv_bound(rho: f64, r: usize) -> f64 {
    2.0 * FACTORIALS[r] / (1.0 - rho).powi(r as i32 + 1)
}

/// Closed-form hexagonal Poisson kernel.
pub fn hex_kernel_closed(rho: f64, t: &HexPoint) -> Result<f64> {
    check_rho(rho)?;
    Ok(closed_unchecked(rho, t))
}

fn closed_unchecked(rho: f64, t: &HexPoint) -> f64 {
    let [p1, p2, p3] = t.z().map(|z| classical(rho, z));
    let a = (1.0 - rho * rho * rho) / (1.0 + rho).powi(3);
    let b = rho / (1.0 + rho).powi(2);
    a * p1 * p2 * p3 + b * (p1 * p2 + p1 * p3 + p2 * p3)
}

/// `Σ_{ν > cutoff} 6ν ρ^ν`, bounding the truncation error of the series.
pub fn series_tail_bound(rho: f64, cutoff: u32) -> f64 {
    let m = cutoff as f64 + 1.0;
    6.0 * rho.powf(m) * (m * (1.0 - rho) + rho) / (1.0 - rho).powi(2)
}

/// Truncated series value with its certified tail.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Shell sums `Σ_{k ∈ J_ν} φ_k(t)` for `ν = 0..=cutoff`, each in canonical
/// order, from tables of `exp(2πi m t_j / 3)`.
fn shell_sums(t: &HexPoint, cutoff: u32) -> Vec<Complex64> {
    let c = cutoff as i64;
    let w = 2.0 * std::f64::consts::PI / 3.0;
    let table = |tj: f64| -> Vec<Complex64> { (-c..=c).map(|m| Complex64::cis(w * m as f64 * tj)).collect() };
    let (e1, e2, e3) = (table(t.t1()), table(t.t2()), table(t.t3()));
    let at = |e: &[Complex64], m: i64| e[(m + c) as usize];
    (0..=cutoff)
        .map(|nu| {
            shell_iter(nu).fold(Complex64::default(), |acc, k| {
                acc + at(&e1, k.k1()) * at(&e2, k.k2()) * at(&e3, k.k3())
            })
        })
        .collect()
}

/// `Σ_{ν=0}^{cutoff} ρ^ν Σ_{k ∈ J_ν} φ_k(t)` with its tail bound.
pub fn hex_kernel_series(rho: f64, t: &HexPoint, cutoff: u32) -> Result<SeriesValue> {
    check_rho(rho)?;
    let sums = shell_sums(t, cutoff);
    let mut value = Complex64::default();
    let mut pw = 1.0;
    for s in &sums {
        value += s * pw;
        pw *= rho;
    }
    Ok(SeriesValue {
        value,
        tail_bound: series_tail_bound(rho, cutoff),
    })
}

/// Termwise `r`-th ρ-derivative of the kernel series,
/// `Σ_{ν >= r} ν!/(ν-r)! ρ^{ν-r} Σ_{J_ν} φ_k(t)`, truncated at `cutoff`.
pub fn hex_kernel_deriv_series(rho: f64, t: &HexPoint, r: usize, cutoff: u32) -> Result<Complex64> {
    check_rho(rho)?;
    let sums = shell_sums(t, cutoff);
    let terms: Vec<Complex64> = sums
        .iter()
        .enumerate()
        .skip(r)
        .map(|(nu, s)| {
            let falling: f64 = (0..r).map(|i| (nu - i) as f64).product();
            s * (falling * rho.powi((nu - r) as i32))
        })
        .collect();
    Ok(sum_complex(&terms))
}

/// Leibniz expansion of `∂^r` over the product form, one table per order.
#[derive(Debug)]
struct LeibnizTable {
    /// `(coefficient, j, r1, r2, r3)`: `∂^j a · ∂^{r1}P1 · ∂^{r2}P2 · ∂^{r3}P3`.
    triple: Vec<(f64, usize, [usize; 3])>,
    /// `(coefficient, j, r1, r2)`: `∂^j b · ∂^{r1}P_p · ∂^{r2}P_q` for each pair.
    pair: Vec<(f64, usize, [usize; 2])>,
}

fn leibniz_tables() -> &'static [LeibnizTable] {
    static TABLES: OnceLock<Vec<LeibnizTable>> = OnceLock::new();
    TABLES.get_or_init(|| {
        (0..=R_MAX)
            .map(|r| {
                let f = |n: usize| FACTORIALS[n];
                let mut triple = Vec::new();
                let mut pair = Vec::new();
                for j in 0..=r {
                    for r1 in 0..=r - j {
                        for r2 in 0..=r - j - r1 {
                            let r3 = r - j - r1 - r2;
                            triple.push((f(r) / (f(j) * f(r1) * f(r2) * f(r3)), j, [r1, r2, r3]));
                        }
                        let r2 = r - j - r1;
                        pair.push((f(r) / (f(j) * f(r1) * f(r2)), j, [r1, r2]));
                    }
                }
                LeibnizTable { triple, pair }
            })
            .collect()
    })
}

/// `∂^r P(ρ, ·)` prepared for repeated evaluation at a fixed `(ρ, r)`.
#[derive(Debug, Clone)]
pub struct KernelDerivative {
    eval: KernelEval,
    a: [f64; R_MAX + 1],
    b: [f64; R_MAX + 1],
}

impl KernelDerivative {
    pub fn new(rho: f64, r: usize) -> Result<Self> {
        let eval = KernelEval::new(rho, r)?;
        let mut a = [0.0; R_MAX + 1];
        let mut b = [0.0; R_MAX + 1];
        for (j, d) in triple_weight().derivatives(r).iter().enumerate() {
            a[j] = d.eval(rho);
        }
        for (j, d) in pair_weight().derivatives(r).iter().enumerate() {
            b[j] = d.eval(rho);
        }
        Ok(Self { eval, a, b })
    }

    pub fn rho(&self) -> f64 {
        self.eval.rho
    }

    pub fn r(&self) -> usize {
        self.eval.r
    }

    pub fn at(&self, t: &HexPoint) -> f64 {
        let (rho, r) = (self.eval.rho, self.eval.r);
        let mut p = [[0.0; R_MAX + 1]; 3];
        for (slot, z) in p.iter_mut().zip(t.z()) {
            classical_table(rho, z, r, slot);
        }
        let table = &leibniz_tables()[r];
        let triple: f64 = table
            .triple
            .iter()
            .map(|&(c, j, [r1, r2, r3])| c * self.a[j] * p[0][r1] * p[1][r2] * p[2][r3])
            .sum();
        let pairs: f64 = table
            .pair
            .iter()
            .map(|&(c, j, [r1, r2])| {
                c * self.b[j] * (p[0][r1] * p[1][r2] + p[0][r1] * p[2][r2] + p[1][r1] * p[2][r2])
            })
            .sum();
        triple + pairs
    }
}

/// Exact `r`-th ρ-derivative of the hexagonal kernel.
pub fn hex_kernel_deriv(rho: f64, t: &HexPoint, r: usize) -> Result<f64> {
    if r == 0 {
        return hex_kernel_closed(rho, t);
    }
    Ok(KernelDerivative::new(rho, r)?.at(t))
}

/// Grid size chosen for a given ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AutoGrid {
    pub n: usize,
    pub capped: bool,
}

/// `n = max(64, ceil(32 / (1 - ρ)))`, capped at 4096.
fn resolution_target(rho: f64) -> usize {
    // Guards against 32/(1-ρ) landing one ulp above an integer.
    let want = (PEAK_SAMPLES / (1.0 - rho) - 1e-9).ceil();
    if want.is_finite() {
        want as usize
    } else {
        usize::MAX
    }
}

pub fn auto_grid_size(rho: f64) -> AutoGrid {
    let n = resolution_target(rho).max(AUTO_GRID_MIN);
    AutoGrid {
        n: n.min(AUTO_GRID_CAP),
        capped: n > AUTO_GRID_CAP,
    }
}

/// Mean of `|∂^r P(ρ, ·)|` over one period.
#[derive(Debug, Clone, Copy)]
pub struct BernsteinValue {
    pub rho: f64,
    pub r: usize,
    pub value: f64,
    pub grid_n: usize,
    /// Grid resolution below `ceil(32 / (1 - ρ))`.
    pub under_resolved: bool,
}

impl BernsteinValue {
    /// `I(ρ) (1 - ρ)^r`.
    pub fn scaled(&self) -> f64 {
        self.value * (1.0 - self.rho).powi(self.r as i32)
    }
}

pub fn bernstein_integral(rho: f64, r: usize, grid: &HexGrid) -> Result<BernsteinValue> {
    let d = KernelDerivative::new(rho, r)?;
    let value = if r == 0 {
        grid.mean_of(|t| closed_unchecked(rho, t).abs())
    } else {
        grid.mean_of(|t| d.at(t).abs())
    };
    let need = resolution_target(rho);
    Ok(BernsteinValue {
        rho,
        r,
        value,
        grid_n: grid.n(),
        under_resolved: grid.n() < need,
    })
}

/// Which of the product integrals `I1`, `I2`, `I3` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    /// `|∂^{r}P_ρ(z1)|`
    I1,
    /// `|∂^{r1}P_ρ(z1) ∂^{r2}P_ρ(z2)|`
    I2,
    /// `|∂^{r1}P_ρ(z1) ∂^{r2}P_ρ(z2) ∂^{r3}P_ρ(z3)|`
    I3,
}

impl ProductKind {
    pub fn arity(&self) -> usize {
        match self {
            ProductKind::I1 => 1,
            ProductKind::I2 => 2,
            ProductKind::I3 => 3,
        }
    }
}

fn check_orders(which: ProductKind, orders: &[usize]) -> Result<()> {
    if orders.len() != which.arity() {
        return Err(HexError::InvalidArgument(format!(
            "{which:?} takes {} orders, got {}",
            which.arity(),
            orders.len()
        )));
    }
    if let Some(&o) = orders.iter().find(|&&o| o > R_MAX) {
        return Err(HexError::OrderTooLarge { order: o, max: R_MAX });
    }
    Ok(())
}

/// Grid mean of the absolute product of classical-kernel derivatives.
pub fn product_integral(rho: f64, which: ProductKind, orders: &[usize], grid: &HexGrid) -> Result<f64> {
    check_rho(rho)?;
    check_orders(which, orders)?;
    let top = *orders.iter().max().unwrap();
    let values: Vec<f64> = grid
        .points()
        .par_iter()
        .map(|t| {
            let z = t.z();
            let mut prod = 1.0;
            let mut table = [0.0; R_MAX + 1];
            for (zi, &o) in z.iter().zip(orders) {
                classical_table(rho, *zi, top, &mut table);
                prod *= table[o];
            }
            prod.abs()
        })
        .collect();
    Ok(mean_f64(&values))
}

/// Upper bounds `2r!/(1-ρ)^r`, `4 r1! r2!/(1-ρ)^r`, `8 r1! r2! r3!/(1-ρ)^{r+1}`.
pub fn product_bound(rho: f64, which: ProductKind, orders: &[usize]) -> Result<f64> {
    check_orders(which, orders)?;
    let r: usize = orders.iter().sum();
    let fact: f64 = orders.iter().map(|&o| FACTORIALS[o]).product();
    let d = 1.0 - rho;
    Ok(match which {
        ProductKind::I1 => 2.0 * fact / d.powi(r as i32),
        ProductKind::I2 => 4.0 * fact / d.powi(r as i32),
        ProductKind::I3 => 8.0 * fact / d.powi(r as i32 + 1),
    })
}

/// `(1 + ρ³) / (1 - ρ³)`, the value of `I3` with all orders zero.
pub fn triple_product_mean(rho: f64) -> f64 {
    (1.0 + rho.powi(3)) / (1.0 - rho.powi(3))
}
