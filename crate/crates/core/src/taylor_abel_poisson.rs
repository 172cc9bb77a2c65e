//! Taylor-Abel-Poisson means and the quantities used to study them.
//!
//! The mean `A_{ρ,r}` multiplies shell `ν` by
//!
//! ```text
//! λ_{ν,r}(ρ) = 1                                         ν < r
//! λ_{ν,r}(ρ) = Σ_{j<r} C(ν,j) (1-ρ)^j ρ^{ν-j}            ν >= r
//! ```
//!
//! i.e. it keeps the first `r` Taylor terms of the Poisson integral around
//! `ρ`. All operators here act on [`SpectralFunction`]s; norms are taken on
//! a [`HexGrid`].

use crate::error::{HexError, Result};
use crate::fourier::{lp_norm, synthesize_fft, Exponent, HexGrid, SpectralFunction};
use crate::poisson::check_rho;
use crate::quadrature::{gauss_legendre, integrate_adaptive};

/// `(ρ, r)` with `0 <= ρ < 1` and `r >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummationParams {
    rho: f64,
    r: u32,
}

impl SummationParams {
    pub fn new(rho: f64, r: u32) -> Result<Self> {
        check_rho(rho)?;
        if r == 0 {
            return Err(HexError::InvalidArgument("summation order r must be at least 1".into()));
        }
        Ok(Self { rho, r })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn r(&self) -> u32 {
        self.r
    }
}

/// `ν! / (ν - n)!`, zero for `ν < n`.
pub fn falling_factorial(nu: u32, n: u32) -> f64 {
    if nu < n {
        return 0.0;
    }
    (0..n).map(|i| (nu - i) as f64).product()
}

/// Multiplier `λ_{ν,r}(ρ)`.
///
/// The binomial terms are generated by the recurrence
/// `T_{j+1} = T_j (ν-j)/(j+1) (1-ρ)/ρ` starting from `T_0 = ρ^ν`.
pub fn lambda_coeff(nu: u32, r: u32, rho: f64) -> f64 {
    debug_assert!(r >= 1 && (0.0..1.0).contains(&rho));
    if nu < r {
        return 1.0;
    }
    if rho == 0.0 {
        return 0.0;
    }
    let ratio = (1.0 - rho) / rho;
    let mut term = rho.powi(nu as i32);
    let mut sum = term;
    for j in 0..r - 1 {
        term *= (nu - j) as f64 / (j + 1) as f64 * ratio;
        sum += term;
    }
    sum
}

fn ln_factorials(n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `1 - λ_{ν,r}(ρ)` summed directly as `Σ_{j>=r} C(ν,j)(1-ρ)^j ρ^{ν-j}`,
/// free of the cancellation in `1 - λ` as `ρ → 1`.
pub fn lambda_complement(nu: u32, r: u32, rho: f64) -> f64 {
    if nu < r {
        return 0.0;
    }
    if rho == 0.0 {
        return 1.0;
    }
    let lf = ln_factorials(nu);
    let (l1, l0) = ((1.0 - rho).ln(), rho.ln());
    (r..=nu)
        .rev()
        .map(|j| {
            let lc = lf[nu as usize] - lf[j as usize] - lf[(nu - j) as usize];
            (lc + j as f64 * l1 + (nu - j) as f64 * l0).exp()
        })
        .sum()
}

/// `A_{ρ,r}(f)`.
pub fn apply_operator(f: &SpectralFunction, p: SummationParams) -> SpectralFunction {
    f.map_shells(|nu| lambda_coeff(nu, p.r, p.rho))
}

/// `f - A_{ρ,r}(f)` with multipliers [`lambda_complement`].
pub fn deviation_spectrum(f: &SpectralFunction, p: SummationParams) -> SpectralFunction {
    f.map_shells(|nu| lambda_complement(nu, p.r, p.rho))
}

/// `∂^k/∂ρ^k P(f)(ρ, ·)`: shell multipliers `ν!/(ν-k)! ρ^{ν-k}`.
pub fn poisson_integral_derivative(f: &SpectralFunction, rho: f64, k: u32) -> Result<SpectralFunction> {
    check_rho(rho)?;
    Ok(f.map_shells(|nu| {
        if nu < k {
            0.0
        } else {
            falling_factorial(nu, k) * rho.powi((nu - k) as i32)
        }
    }))
}

/// `Σ_{k<r} (1-ρ)^k / k! · ∂^k P(f)(ρ, ·)`.
pub fn apply_operator_derivative_form(f: &SpectralFunction, p: SummationParams) -> SpectralFunction {
    let mut acc = SpectralFunction::new(f.max_degree());
    let mut weight = 1.0;
    for k in 0..p.r {
        if k > 0 {
            weight *= (1.0 - p.rho) / k as f64;
        }
        let d = poisson_integral_derivative(f, p.rho, k).expect("rho validated by SummationParams");
        acc = acc.add_scaled(&d, weight);
    }
    acc
}

/// Radial derivative `f^{[n]}`: shell `ν` scaled by `ν!/(ν-n)!`, shells
/// below `n` dropped.
pub fn radial_derivative(f: &SpectralFunction, n: u32) -> SpectralFunction {
    f.map_shells(|nu| falling_factorial(nu, n))
}

/// Poisson integral `P(f)(ρ, ·)`: shell `ν` scaled by `ρ^ν`.
pub fn poisson_integral_spectral(f: &SpectralFunction, rho: f64) -> Result<SpectralFunction> {
    poisson_integral_derivative(f, rho, 0)
}

/// `‖f - A_{ρ,r}(f)‖_p` on the grid.
pub fn deviation_norm(f: &SpectralFunction, p_sum: SummationParams, p: Exponent, grid: &HexGrid) -> f64 {
    lp_norm(&synthesize_fft(&deviation_spectrum(f, p_sum), grid), p)
}

/// `‖f - A_{ρ,r}(f)‖_2` from the coefficients,
/// `(Σ_ν (1-λ_ν)² Σ_{J_ν} |f̂(k)|²)^{1/2}`.
pub fn deviation_l2_exact(f: &SpectralFunction, p_sum: SummationParams) -> f64 {
    let mut shells = vec![0.0; f.max_degree() as usize + 1];
    for (k, c) in f.iter() {
        shells[k.degree() as usize] += c.norm_sqr();
    }
    shells
        .iter()
        .enumerate()
        .map(|(nu, e)| lambda_complement(nu as u32, p_sum.r, p_sum.rho).powi(2) * e)
        .sum::<f64>()
        .sqrt()
}

/// `M_p(ρ, f, r) = ‖P(f)^{[r]}(ρ, ·)‖_p`, shell multipliers `ν!/(ν-r)! ρ^ν`.
pub fn m_p(f: &SpectralFunction, rho: f64, r: u32, p: Exponent, grid: &HexGrid) -> Result<f64> {
    check_rho(rho)?;
    let g = f.map_shells(|nu| falling_factorial(nu, r) * rho.powi(nu as i32));
    Ok(lp_norm(&synthesize_fft(&g, grid), p))
}

/// Candidate `h` in the K-functional estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KfunCandidate {
    Zero,
    Identity,
    /// `A_{ζ,n}(f)`
    TaylorAbelPoisson { zeta: f64 },
    /// `S_m(f)`
    PartialSum { m: u32 },
}

impl std::fmt::Display for KfunCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KfunCandidate::Zero => write!(f, "zero"),
            KfunCandidate::Identity => write!(f, "identity"),
            KfunCandidate::TaylorAbelPoisson { zeta } => write!(f, "tap(zeta={zeta})"),
            KfunCandidate::PartialSum { m } => write!(f, "partial_sum(m={m})"),
        }
    }
}

/// Bracket for `K_n(δ, f)_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct KfunEstimate {
    pub delta: f64,
    pub n: u32,
    /// Smallest `‖f - h‖_p + δ^n ‖h^{[n]}‖_p` over the candidate family.
    pub upper: f64,
    /// `δ^n M_p(1 - δ, f, n)`, the lower side up to a constant.
    pub lower_proxy: f64,
    pub argmin_candidate: KfunCandidate,
}

/// Evaluate `‖f - h‖_p + δ^n ‖h^{[n]}‖_p` for one candidate.
pub fn kfun_candidate_value(
    f: &SpectralFunction,
    h: &SpectralFunction,
    delta: f64,
    n: u32,
    p: Exponent,
    grid: &HexGrid,
) -> f64 {
    let residual = lp_norm(&synthesize_fft(&f.sub(h), grid), p);
    let smooth = lp_norm(&synthesize_fft(&radial_derivative(h, n), grid), p);
    residual + delta.powi(n as i32) * smooth
}

/// Upper estimate of the K-functional over a fixed candidate family and the
/// matching lower proxy.
///
/// Candidates: `0`, `f`, `A_{ζ,n}(f)` for `ζ = 1 - δ 2^j`, `j = -2..=2`
/// (kept when `ζ ∈ [0, 1)`), and the partial sums `S_m(f)` for
/// `m <= max_degree`.
pub fn kfun_estimate(f: &SpectralFunction, delta: f64, n: u32, p: Exponent, grid: &HexGrid) -> Result<KfunEstimate> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(HexError::InvalidArgument(format!("delta = {delta} outside (0, 1/2]")));
    }
    if n == 0 {
        return Err(HexError::InvalidArgument("K-functional order n must be at least 1".into()));
    }
    let mut candidates: Vec<(KfunCandidate, SpectralFunction)> = vec![
        (KfunCandidate::Zero, SpectralFunction::new(f.max_degree())),
        (KfunCandidate::Identity, f.clone()),
    ];
    for j in -2..=2 {
        let zeta = 1.0 - delta * 2f64.powi(j);
        if (0.0..1.0).contains(&zeta) {
            let params = SummationParams::new(zeta, n)?;
            candidates.push((KfunCandidate::TaylorAbelPoisson { zeta }, apply_operator(f, params)));
        }
    }
    for m in 0..=f.max_degree() {
        candidates.push((KfunCandidate::PartialSum { m }, f.truncated(m)));
    }

    let mut best = (f64::INFINITY, KfunCandidate::Zero);
    for (label, h) in &candidates {
        let v = kfun_candidate_value(f, h, delta, n, p, grid);
        if v < best.0 {
            best = (v, *label);
        }
    }
    let lower_proxy = delta.powi(n as i32) * m_p(f, 1.0 - delta, n, p, grid)?;
    Ok(KfunEstimate {
        delta,
        n,
        upper: best.0,
        lower_proxy,
        argmin_candidate: best.1,
    })
}

/// Both sides of the coefficient identity
/// `1 - λ_{ν,r}(ρ) = 1/(r-1)! ∫_ρ^1 (1-ζ)^{r-1} ν!/(ν-r)! ζ^{ν-r} dζ`,
/// the right side by adaptive quadrature.
pub fn remainder_coefficient_check(nu: u32, r: u32, rho: f64) -> Result<(f64, f64)> {
    check_rho(rho)?;
    if r < 2 || nu < r {
        return Err(HexError::InvalidArgument(format!("need nu >= r >= 2, got nu={nu}, r={r}")));
    }
    let lhs = 1.0 - lambda_coeff(nu, r, rho);
    let scale = falling_factorial(nu, r) / falling_factorial(r - 1, r - 1);
    let rhs = integrate_adaptive(
        |z| scale * (1.0 - z).powi(r as i32 - 1) * z.powi((nu - r) as i32),
        rho,
        1.0,
        1e-13,
    )?;
    Ok((lhs, rhs))
}

/// `‖1/(r-1)! ∫_ρ^1 (1-ζ)^{r-1} ∂^r P(f)(ζ, ·) dζ‖_p`.
///
/// The ζ-integral runs over grid functions, with Gauss–Legendre nodes after
/// the substitution `ζ = 1 - (1-ρ)u`, `u ∈ [0, 1]`.
pub fn remainder_integral_norm(
    f: &SpectralFunction,
    p_sum: SummationParams,
    p: Exponent,
    grid: &HexGrid,
    zeta_nodes: usize,
) -> Result<f64> {
    let r = p_sum.r;
    if r < 2 {
        return Err(HexError::InvalidArgument("remainder form needs r >= 2".into()));
    }
    if zeta_nodes < 16 {
        return Err(HexError::InvalidArgument(format!("zeta_nodes = {zeta_nodes} < 16")));
    }
    let width = 1.0 - p_sum.rho;
    let inv_fact = 1.0 / falling_factorial(r - 1, r - 1);
    let (nodes, weights) = gauss_legendre(zeta_nodes);
    let mut acc = vec![num_complex::Complex64::default(); grid.len()];
    for (x, w) in nodes.iter().zip(&weights) {
        let u = 0.5 * (x + 1.0);
        let zeta = 1.0 - width * u;
        let factor = 0.5 * w * width * inv_fact * (width * u).powi(r as i32 - 1);
        let d = poisson_integral_derivative(f, zeta, r)?;
        for (a, v) in acc.iter_mut().zip(synthesize_fft(&d, grid).values()) {
            *a += v * factor;
        }
    }
    Ok(crate::fourier::lp_norm_values(&acc, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{make_grid, synthesize};
    use crate::lattice::{index_shell, indices_up_to, HexIndex};
    use crate::poisson::hex_kernel_closed;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spectrum(rng: &mut ChaCha8Rng, degree: u32) -> SpectralFunction {
        SpectralFunction::from_entries(
            degree,
            indices_up_to(degree)
                .into_iter()
                .map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
        )
        .unwrap()
    }

    fn binomial(n: u32, k: u32) -> f64 {
        (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
    }

    #[test]
    fn params_validation() {
        assert!(SummationParams::new(0.5, 0).is_err());
        assert!(SummationParams::new(1.0, 1).is_err());
        assert!(SummationParams::new(0.0, 3).is_ok());
    }

    #[test]
    fn lambda_examples() {
        for nu in 0..3 {
            assert_eq!(lambda_coeff(nu, 3, 0.4), 1.0);
        }
        for nu in 1..20 {
            assert!((lambda_coeff(nu, 1, 0.7) - 0.7f64.powi(nu as i32)).abs() <= 1e-15);
        }
        assert!((lambda_coeff(2, 2, 0.5) - 0.75).abs() <= 1e-15);
        assert_eq!(lambda_coeff(5, 2, 0.0), 0.0);
    }

    #[test]
    fn binomial_weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for nu in 0..=60 {
            let rho: f64 = rng.gen_range(0.0..1.0);
            let total: f64 = (0..=nu)
                .map(|k| binomial(nu, k) * (1.0 - rho).powi(k as i32) * rho.powi((nu - k) as i32))
                .sum();
            assert!((total - 1.0).abs() <= 1e-12, "nu={nu}");
        }
    }

    #[test]
    fn lambda_and_complement_partition_unity() {
        for nu in 0..=200 {
            for r in 1..=6 {
                for &rho in &[0.01, 0.3, 0.5, 0.9, 0.999] {
                    let s = lambda_coeff(nu, r, rho) + lambda_complement(nu, r, rho);
                    assert!((s - 1.0).abs() <= 1e-12, "nu={nu} r={r} rho={rho} s={s}");
                }
            }
        }
    }

    #[test]
    fn lambda_in_unit_interval_and_decreasing_deviation() {
        for nu in 0..=200 {
            for r in 1..=6 {
                let mut prev = f64::INFINITY;
                for i in 0..=100 {
                    let rho = i as f64 / 101.0;
                    let l = lambda_coeff(nu, r, rho);
                    assert!((0.0..=1.0 + 1e-15).contains(&l));
                    let dev = lambda_complement(nu, r, rho);
                    assert!(dev <= prev * (1.0 + 1e-12), "nu={nu} r={r} rho={rho}");
                    prev = dev;
                }
            }
        }
    }

    #[test]
    fn operator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let f = random_spectrum(&mut rng, 6);
        let p = SummationParams::new(0.6, 7).unwrap();
        assert_eq!(apply_operator(&f, p), f);

        let p = SummationParams::new(0.0, 3).unwrap();
        let a = apply_operator(&f, p);
        assert_eq!(a, f.truncated(2));

        let p = SummationParams::new(0.35, 1).unwrap();
        let a = apply_operator(&f, p);
        assert!(a.max_abs_diff(&poisson_integral_spectral(&f, 0.35).unwrap()) <= 1e-15);
    }

    #[test]
    fn derivative_form_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let f = random_spectrum(&mut rng, 10);
        let p = SummationParams::new(0.42, 1).unwrap();
        let d = apply_operator_derivative_form(&f, p);
        assert!(d.max_abs_diff(&poisson_integral_spectral(&f, 0.42).unwrap()) <= 1e-15);

        let low = f.truncated(3);
        let p = SummationParams::new(0.42, 4).unwrap();
        assert!(apply_operator_derivative_form(&low, p).max_abs_diff(&low) <= 1e-13);

        for &rho in &[0.3, 0.7] {
            for r in 1..=4 {
                let p = SummationParams::new(rho, r).unwrap();
                let a = apply_operator(&f, p);
                let b = apply_operator_derivative_form(&f, p);
                assert!(a.max_abs_diff(&b) <= 1e-12, "rho={rho} r={r}");
            }
        }
    }

    #[test]
    fn radial_derivative_examples() {
        let k = HexIndex::new(4, -1, -3).unwrap();
        let d = radial_derivative(&SpectralFunction::basis(k), 2);
        assert_eq!(d.get(&k), Complex64::new(12.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let low = random_spectrum(&mut rng, 2);
        assert!(radial_derivative(&low, 3).is_empty());

        // Multipliers compose as products of falling factorials, which is not
        // the order a+b multiplier.
        let f = random_spectrum(&mut rng, 20);
        for a in 0..5 {
            for b in 0..5 {
                let lhs = radial_derivative(&radial_derivative(&f, a), b);
                for (k, c) in f.iter() {
                    let nu = k.degree();
                    let m = falling_factorial(nu, a) * falling_factorial(nu, b);
                    assert!((lhs.get(k) - c * m).norm() <= 1e-12 * (c.norm() * m).max(1.0));
                }
            }
        }
        let k = HexIndex::new(2, -1, -1).unwrap();
        let twice = radial_derivative(&radial_derivative(&SpectralFunction::basis(k), 1), 1);
        assert_eq!(twice.get(&k), Complex64::new(4.0, 0.0));
        assert_eq!(radial_derivative(&SpectralFunction::basis(k), 2).get(&k), Complex64::new(2.0, 0.0));
        for nu in 0..=20u32 {
            for a in 0..=nu {
                for b in 0..=nu - a {
                    let lhs = falling_factorial(nu, a) * falling_factorial(nu - a, b);
                    assert_eq!(lhs, falling_factorial(nu, a + b));
                }
            }
        }
    }

    #[test]
    fn poisson_integral_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let f = random_spectrum(&mut rng, 5);
        let p0 = poisson_integral_spectral(&f, 0.0).unwrap();
        assert_eq!(p0.len(), 1);
        assert_eq!(p0.get(&HexIndex::origin()), f.get(&HexIndex::origin()));
        assert!(poisson_integral_spectral(&f, 1.0).is_err());

        // P(f^[n]) = ρ^n ∂^n P(f)
        for n in 0..=4 {
            let lhs = poisson_integral_spectral(&radial_derivative(&f, n), 0.6).unwrap();
            let rhs = poisson_integral_derivative(&f, 0.6, n).unwrap().scale(0.6f64.powi(n as i32));
            assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
        }
    }

    #[test]
    fn poisson_integral_matches_grid_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let f = random_spectrum(&mut rng, 5);
        // Unit l1 coefficient mass keeps the absolute tolerance scale-free.
        let mass: f64 = f.iter().map(|(_, c)| c.norm()).sum();
        let f = f.scale(1.0 / mass);
        let n = 48;
        let g = make_grid(n).unwrap();
        let rho = 0.5;
        let fv = synthesize(&f, &g);
        let kernel: Vec<f64> = g.points().iter().map(|s| hex_kernel_closed(rho, s).unwrap()).collect();
        let spectral = synthesize(&poisson_integral_spectral(&f, rho).unwrap(), &g);
        let mut err: f64 = 0.0;
        for m1 in 0..n {
            for m2 in 0..n {
                let mut acc = Complex64::default();
                for s1 in 0..n {
                    for s2 in 0..n {
                        let v = fv.values()[g.position((m1 + s1) % n, (m2 + s2) % n)];
                        acc += v * kernel[g.position(s1, s2)];
                    }
                }
                let conv = acc / (n * n) as f64;
                err = err.max((conv - spectral.values()[g.position(m1, m2)]).norm());
            }
        }
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn deviation_examples() {
        let g = make_grid(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let low = random_spectrum(&mut rng, 2);
        let p = SummationParams::new(0.5, 3).unwrap();
        assert_eq!(deviation_norm(&low, p, Exponent::Finite(1.0), &g), 0.0);

        let k = HexIndex::new(5, -2, -3).unwrap();
        let basis = SpectralFunction::basis(k);
        let p = SummationParams::new(0.7, 2).unwrap();
        let expect = 1.0 - lambda_coeff(5, 2, 0.7);
        for e in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(3.5), Exponent::Infinity] {
            assert!((deviation_norm(&basis, p, e, &g) - expect).abs() <= 1e-13);
        }

        let f = random_spectrum(&mut rng, 7);
        let p = SummationParams::new(0.8, 3).unwrap();
        let grid_l2 = deviation_norm(&f, p, Exponent::Finite(2.0), &g);
        assert!((grid_l2 - deviation_l2_exact(&f, p)).abs() <= 1e-10);
    }

    #[test]
    fn m_p_examples() {
        let g = make_grid(32).unwrap();
        let k = HexIndex::new(6, -6, 0).unwrap();
        let basis = SpectralFunction::basis(k);
        for r in 0..=4 {
            let v = m_p(&basis, 0.6, r, Exponent::Finite(1.5), &g).unwrap();
            let expect = falling_factorial(6, r) * 0.6f64.powi(6);
            assert!((v - expect).abs() <= 1e-12 * expect);
        }
        let low = SpectralFunction::from_entries(
            1,
            index_shell(1).into_iter().map(|k| (k, Complex64::new(1.0, 0.0))),
        )
        .unwrap();
        assert_eq!(m_p(&low, 0.6, 2, Exponent::Infinity, &g).unwrap(), 0.0);
    }

    #[test]
    fn kfun_examples() {
        let g = make_grid(64).unwrap();
        let low = SpectralFunction::from_entries(
            1,
            indices_up_to(1).into_iter().map(|k| (k, Complex64::new(0.5, 0.0))),
        )
        .unwrap();
        let est = kfun_estimate(&low, 0.25, 2, Exponent::Finite(2.0), &g).unwrap();
        assert_eq!(est.upper, 0.0);

        let k = HexIndex::new(7, -3, -4).unwrap();
        let basis = SpectralFunction::basis(k);
        for &delta in &[0.5, 0.2, 0.05, 0.01] {
            for n in 1..=3 {
                let est = kfun_estimate(&basis, delta, n, Exponent::Finite(1.0), &g).unwrap();
                let cap = 1f64.min(delta.powi(n as i32) * falling_factorial(7, n));
                assert!(est.upper <= cap + 1e-12, "delta={delta} n={n}");
                assert!(est.lower_proxy >= 0.0);
            }
        }
        assert!(kfun_estimate(&basis, 0.6, 1, Exponent::Finite(1.0), &g).is_err());
        assert!(kfun_estimate(&basis, 0.0, 1, Exponent::Finite(1.0), &g).is_err());
    }

    #[test]
    fn remainder_coefficient_identity() {
        for (nu, r, rho) in [(5, 2, 0.5), (30, 4, 0.9), (2, 2, 0.1), (12, 3, 0.99)] {
            let (lhs, rhs) = remainder_coefficient_check(nu, r, rho).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10, "nu={nu} r={r} rho={rho}");
        }
        let (lhs, rhs) = remainder_coefficient_check(6, 3, 1.0 - 1e-9).unwrap();
        assert!(lhs.abs() < 1e-12 && rhs.abs() < 1e-12);
        assert!(remainder_coefficient_check(5, 1, 0.5).is_err());
    }

    #[test]
    fn remainder_integral_matches_deviation() {
        let g = make_grid(40).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let f = random_spectrum(&mut rng, 8);
        for (rho, r) in [(0.5, 2), (0.8, 3)] {
            let p = SummationParams::new(rho, r).unwrap();
            for e in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
                let a = remainder_integral_norm(&f, p, e, &g, 64).unwrap();
                let b = deviation_norm(&f, p, e, &g);
                assert!((a - b).abs() <= 1e-8, "rho={rho} r={r} {a} {b}");
            }
        }
        let low = f.truncated(1);
        let p = SummationParams::new(0.5, 2).unwrap();
        assert!(remainder_integral_norm(&low, p, Exponent::Finite(2.0), &g, 16).unwrap() <= 1e-15);
        let p1 = SummationParams::new(0.5, 1).unwrap();
        assert!(remainder_integral_norm(&f, p1, Exponent::Finite(2.0), &g, 64).is_err());
        assert!(remainder_integral_norm(&f, p, Exponent::Finite(2.0), &g, 8).is_err());
    }

    #[test]
    fn saturation_fixed_points() {
        for r in 1..=5 {
            for &rho in &[0.01, 0.5, 0.99] {
                let p = SummationParams::new(rho, r).unwrap();
                for nu in 0..r + 4 {
                    for k in index_shell(nu) {
                        let b = SpectralFunction::basis(k);
                        let a = apply_operator(&b, p);
                        if nu < r {
                            assert_eq!(a, b);
                        } else {
                            assert!(a.get(&k).re < 1.0);
                        }
                    }
                }
            }
        }
    }
}
