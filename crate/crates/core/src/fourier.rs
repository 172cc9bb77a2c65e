//! Sampling grids, basis functions and the analysis/synthesis pair.
//!
//! The grid of size `n` samples `(t1, t2) = (3 m1 / n, 3 m2 / n)` for
//! `m ∈ {0..n-1}²`, folded into Ω. On these points
//!
//! ```text
//! φ_k(t) = exp(2πi (a m1 + b m2) / n),   a = 2 k1 + k2,  b = k1 + 2 k2,
//! ```
//!
//! so the equal-weight average of `φ_k` vanishes unless `n | a` and `n | b`.
//! For an index of degree `D` both `|a|, |b| <= 2D`, hence averages of
//! trigonometric polynomials of degree `d` (products of two have degree
//! `2d`) are exact whenever `4d < n`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{HexError, Result};
use crate::lattice::{fold, HexIndex, HexPoint};
use crate::reduce::{mean_complex, mean_f64};

const TWO_PI_3: f64 = 2.0 * PI / 3.0;

/// Basis function `φ_k(t) = exp((2πi/3) k·t)`.
pub fn phi(k: &HexIndex, t: &HexPoint) -> Complex64 {
    Complex64::cis(TWO_PI_3 * k.dot(t))
}

/// Uniform sampling rule over one period.
#[derive(Debug, Clone)]
pub struct HexGrid {
    n: usize,
    points: Vec<HexPoint>,
}

impl HexGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[HexPoint] {
        &self.points
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    /// Largest degree `d` with `4d < n`.
    pub fn exact_degree(&self) -> u32 {
        ((self.n - 1) / 4) as u32
    }

    /// Flat position of the sample `(m1, m2)`.
    pub fn position(&self, m1: usize, m2: usize) -> usize {
        m1 * self.n + m2
    }

    /// Grid mean of a real function evaluated at every point.
    pub fn mean_of<F>(&self, f: F) -> f64
    where
        F: Fn(&HexPoint) -> f64 + Sync + Send,
    {
        let values: Vec<f64> = self.points.par_iter().map(f).collect();
        mean_f64(&values)
    }

    /// Evaluate a complex function at every grid point.
    pub fn sample<F>(&self, f: F) -> GridFunction<'_>
    where
        F: Fn(&HexPoint) -> Complex64 + Sync + Send,
    {
        GridFunction {
            grid: self,
            values: self.points.par_iter().map(f).collect(),
        }
    }
}

/// Build the `n × n` grid. Rejects `n < 4`.
pub fn make_grid(n: usize) -> Result<HexGrid> {
    if n < 4 {
        return Err(HexError::GridTooSmall(n));
    }
    let step = 3.0 / n as f64;
    let points = (0..n * n)
        .map(|i| {
            let (m1, m2) = (i / n, i % n);
            fold(&HexPoint::from_pair(step * m1 as f64, step * m2 as f64))
        })
        .collect();
    Ok(HexGrid { n, points })
}

/// Complex samples aligned with the points of a grid.
#[derive(Debug, Clone)]
pub struct GridFunction<'g> {
    grid: &'g HexGrid,
    values: Vec<Complex64>,
}

impl<'g> GridFunction<'g> {
    pub fn new(grid: &'g HexGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(HexError::InvalidArgument(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &'g HexGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn mean(&self) -> Complex64 {
        mean_complex(&self.values)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }
}

/// Exponent of an `L_p` norm, `1 <= p <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(HexError::InvalidExponent(p))
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl FromStr for Exponent {
    type Err = HexError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| HexError::InvalidArgument(format!("cannot parse exponent {other:?}")))?;
                Exponent::new(p)
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Normalized `L_p` norm on the grid. For `p = ∞` the grid maximum, which
/// bounds the essential supremum from below.
pub fn lp_norm(g: &GridFunction<'_>, p: Exponent) -> f64 {
    lp_norm_values(g.values(), p)
}

pub(crate) fn lp_norm_values(values: &[Complex64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => values.iter().fold(0.0, |m, v| m.max(v.norm())),
        Exponent::Finite(2.0) => {
            let sq: Vec<f64> = values.par_iter().map(|v| v.norm_sqr()).collect();
            mean_f64(&sq).sqrt()
        }
        Exponent::Finite(1.0) => {
            let abs: Vec<f64> = values.par_iter().map(|v| v.norm()).collect();
            mean_f64(&abs)
        }
        Exponent::Finite(p) => {
            let pw: Vec<f64> = values.par_iter().map(|v| v.norm().powf(p)).collect();
            mean_f64(&pw).powf(1.0 / p)
        }
    }
}

/// Finitely many Fourier coefficients `f̂(k)`.
///
/// Coefficients are kept in shell-major order; iteration visits shells in
/// increasing degree and each shell in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    coeffs: BTreeMap<HexIndex, Complex64>,
    max_degree: u32,
    hermitian: bool,
}

impl SpectralFunction {
    pub fn new(max_degree: u32) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            max_degree,
            hermitian: false,
        }
    }

    pub fn from_entries<I>(max_degree: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (HexIndex, Complex64)>,
    {
        let mut f = Self::new(max_degree);
        for (k, c) in entries {
            f.insert(k, c)?;
        }
        Ok(f)
    }

    /// The single basis function `φ_k`.
    pub fn basis(k: HexIndex) -> Self {
        let mut f = Self::new(k.degree());
        f.coeffs.insert(k, Complex64::new(1.0, 0.0));
        f
    }

    pub fn constant(c: Complex64) -> Self {
        let mut f = Self::new(0);
        f.coeffs.insert(HexIndex::origin(), c);
        f
    }

    /// Set a coefficient; the index must respect `max_degree`.
    pub fn insert(&mut self, k: HexIndex, c: Complex64) -> Result<()> {
        if k.degree() > self.max_degree {
            return Err(HexError::DegreeTooLarge {
                index: k,
                degree: k.degree(),
                max_degree: self.max_degree,
            });
        }
        self.coeffs.insert(k, c);
        self.hermitian = false;
        Ok(())
    }

    pub fn get(&self, k: &HexIndex) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HexIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Largest degree carrying a nonzero coefficient, `None` for zero.
    pub fn support_degree(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .filter(|(_, c)| **c != Complex64::default())
            .map(|(k, _)| k.degree())
            .max()
    }

    /// Whether the conjugate-symmetry flag has been set and checked.
    pub fn is_marked_real(&self) -> bool {
        self.hermitian
    }

    /// Check `f̂(-k) = conj f̂(k)` within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_violation(tol).is_none()
    }

    fn hermitian_violation(&self, tol: f64) -> Option<HexIndex> {
        self.coeffs
            .iter()
            .find(|(k, c)| (self.get(&k.neg()) - c.conj()).norm() > tol)
            .map(|(k, _)| *k)
    }

    /// Set the reality flag after verifying conjugate symmetry within 1e-12.
    pub fn mark_real(mut self) -> Result<Self> {
        if let Some(k) = self.hermitian_violation(1e-12) {
            return Err(HexError::NotHermitian(k));
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Multiply shell `ν` by `m(ν)`; entries whose multiplier is exactly
    /// zero are dropped.
    pub fn map_shells<M>(&self, multiplier: M) -> SpectralFunction
    where
        M: Fn(u32) -> f64,
    {
        let mut cache: Vec<Option<f64>> = vec![None; self.max_degree as usize + 1];
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            let nu = k.degree() as usize;
            let m = *cache[nu].get_or_insert_with(|| multiplier(nu as u32));
            if m != 0.0 {
                coeffs.insert(*k, c * m);
            }
        }
        SpectralFunction {
            coeffs,
            max_degree: self.max_degree,
            hermitian: self.hermitian,
        }
    }

    /// Partial sum `S_m`: shells of degree at most `m`.
    pub fn truncated(&self, m: u32) -> SpectralFunction {
        self.map_shells(|nu| if nu <= m { 1.0 } else { 0.0 })
    }

    pub fn scale(&self, s: f64) -> SpectralFunction {
        self.map_shells(|_| s)
    }

    /// Coefficientwise `self + factor · other`.
    pub fn add_scaled(&self, other: &SpectralFunction, factor: f64) -> SpectralFunction {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *coeffs.entry(*k).or_default() += c * factor;
        }
        SpectralFunction {
            coeffs,
            max_degree: self.max_degree.max(other.max_degree),
            hermitian: self.hermitian && other.hermitian,
        }
    }

    pub fn sub(&self, other: &SpectralFunction) -> SpectralFunction {
        self.add_scaled(other, -1.0)
    }

    /// Largest coefficientwise difference over the union of supports.
    pub fn max_abs_diff(&self, other: &SpectralFunction) -> f64 {
        let a = self.coeffs.iter().map(|(k, c)| (c - other.get(k)).norm());
        let b = other.coeffs.iter().map(|(k, c)| (c - self.get(k)).norm());
        a.chain(b).fold(0.0, f64::max)
    }

    /// Exact `L_2` norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.coeffs.values().map(|c| c.norm_sqr()).collect();
        crate::reduce::sum_f64(&sq).sqrt()
    }

    /// Evaluate the trigonometric polynomial at one point.
    pub fn eval(&self, t: &HexPoint) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::default(), |acc, (k, c)| acc + c * phi(k, t))
    }
}

/// Direct synthesis on the grid, summing shell by shell in canonical order.
pub fn synthesize<'g>(f: &SpectralFunction, grid: &'g HexGrid) -> GridFunction<'g> {
    grid.sample(|t| f.eval(t))
}

/// Outcome of [`analyze`].
#[derive(Debug, Clone)]
pub struct Analysis {
    pub spectrum: SpectralFunction,
    /// False when `n < 4 max_degree + 1`; coefficients may then be aliased.
    pub exact: bool,
}

/// Grid inner products `⟨g, φ_k⟩` for every `|k| <= max_degree`.
pub fn analyze(g: &GridFunction<'_>, max_degree: u32) -> Analysis {
    let grid = g.grid();
    let indices = crate::lattice::indices_up_to(max_degree);
    let coeffs: Vec<(HexIndex, Complex64)> = indices
        .par_iter()
        .map(|k| {
            let prods: Vec<Complex64> = grid
                .points()
                .iter()
                .zip(g.values())
                .map(|(t, v)| v * phi(k, t).conj())
                .collect();
            (*k, mean_complex(&prods))
        })
        .collect();
    Analysis {
        spectrum: SpectralFunction {
            coeffs: coeffs.into_iter().collect(),
            max_degree,
            hermitian: false,
        },
        exact: grid.n() > 4 * max_degree as usize,
    }
}

/// Synthesis on the grid through a two-dimensional inverse FFT.
///
/// Coefficients are binned by `(2k1 + k2, k1 + 2k2) mod n`; agrees with
/// [`synthesize`] up to rounding and is used wherever many syntheses of
/// large spectra are needed.
pub fn synthesize_fft<'g>(f: &SpectralFunction, grid: &'g HexGrid) -> GridFunction<'g> {
    let n = grid.n();
    let mut data = vec![Complex64::default(); n * n];
    let ni = n as i64;
    for (k, c) in f.iter() {
        let a = (2 * k.k1() + k.k2()).rem_euclid(ni) as usize;
        let b = (k.k1() + 2 * k.k2()).rem_euclid(ni) as usize;
        data[a * n + b] += c;
    }
    let fft = FftPlanner::new().plan_fft_inverse(n);
    // transform along b (rows), transpose, transform along a, transpose back
    data.par_chunks_mut(n).for_each(|row| fft.process(row));
    let mut t = transpose(&data, n);
    t.par_chunks_mut(n).for_each(|row| fft.process(row));
    let values = transpose(&t, n);
    GridFunction { grid, values }
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = data[i * n + j];
        }
    }
    out
}
