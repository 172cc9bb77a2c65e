//! The invariant suite: each check reports its measured residual against a
//! tolerance. Random inputs come from the configured seed; tolerances leave
//! enough margin that pass/fail does not depend on it.

use hexsum_core::lattice::{indices_up_to, is_period, shell_iter};
use hexsum_core::poisson::{
    auto_grid_size, classical_deriv_bound, classical_kernel_deriv, hex_kernel_closed, hex_kernel_deriv,
    hex_kernel_deriv_series, hex_kernel_series, product_bound, product_integral, triple_product_mean,
    ProductKind,
};
use hexsum_core::fourier::synthesize_fft;
use hexsum_core::taylor_abel_poisson::{
    apply_operator, apply_operator_derivative_form, deviation_l2_exact, deviation_norm, lambda_coeff,
    lambda_complement, poisson_integral_derivative, poisson_integral_spectral, radial_derivative,
    remainder_coefficient_check, remainder_integral_norm, SummationParams,
};
use hexsum_core::{
    analyze, fold, from_cartesian, index_shell, is_in_omega, lp_norm, make_grid, phi, synthesize, to_cartesian,
    Exponent, HexIndex, HexPoint, SpectralFunction,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::family::Family;
use crate::report::{Cell, Report};

struct Suite {
    report: Report,
    seed: u64,
    stream: u64,
}

impl Suite {
    fn rng(&mut self) -> ChaCha8Rng {
        self.stream += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    fn record(&mut self, name: &str, residual: f64, tolerance: f64, grid_n: Option<usize>) {
        let ok = residual <= tolerance;
        let status = self
            .report
            .check(ok, || format!("{name}: residual {residual:e} exceeds {tolerance:e}"));
        self.report.push(vec![
            name.into(),
            residual.into(),
            tolerance.into(),
            grid_n.map_or(Cell::Empty, Cell::from),
            status.into(),
        ]);
    }
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> HexPoint {
    HexPoint::from_pair(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))
}

fn random_spectrum(rng: &mut ChaCha8Rng, degree: u32) -> SpectralFunction {
    SpectralFunction::from_entries(
        degree,
        indices_up_to(degree)
            .into_iter()
            .map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
    )
    .expect("indices respect the degree")
}

fn real_spectrum(rng: &mut ChaCha8Rng, degree: u32) -> SpectralFunction {
    let mut f = SpectralFunction::new(degree);
    for k in indices_up_to(degree) {
        if k < k.neg() {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            f.insert(k, c).expect("degree bound");
            f.insert(k.neg(), c.conj()).expect("degree bound");
        } else if k == k.neg() {
            f.insert(k, Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).expect("degree bound");
        }
    }
    f.mark_real().expect("conjugate-symmetric by construction")
}

fn bool_residual(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn lattice_checks(s: &mut Suite) {
    let mut mismatches = 0usize;
    for nu in 0..=20u32 {
        let n = nu as i64;
        let mut brute: Vec<HexIndex> = Vec::new();
        for k1 in -n..=n {
            for k2 in -n..=n {
                let k = HexIndex::from_pair(k1, k2);
                if k.degree() == nu {
                    brute.push(k);
                }
            }
        }
        let mut fast = index_shell(nu);
        brute.sort();
        fast.sort();
        mismatches += usize::from(brute != fast);
        let expected = if nu == 0 { 1 } else { 6 * nu as usize };
        mismatches += usize::from(shell_iter(nu).count() != expected);
    }
    s.record("shell enumeration matches brute force, nu <= 20", mismatches as f64, 0.0, None);

    let mut rng = s.rng();
    let mut roundtrip: f64 = 0.0;
    let mut fold_err: f64 = 0.0;
    let mut outside = 0usize;
    let ks = indices_up_to(5);
    for _ in 0..1000 {
        let t = random_point(&mut rng, 4.0);
        let (x1, x2) = to_cartesian(&t);
        let back = from_cartesian(x1, x2);
        roundtrip = roundtrip.max((back.t1() - t.t1()).abs().max((back.t2() - t.t2()).abs()));
        let f = fold(&t);
        outside += usize::from(!is_in_omega(&f) || fold(&f) != f);
        for k in &ks {
            fold_err = fold_err.max((phi(k, &f) - phi(k, &t)).norm());
        }
    }
    s.record("cartesian round trip", roundtrip, 1e-12, None);
    s.record("fold lands in the hexagon and is idempotent", outside as f64, 0.0, None);
    s.record("basis functions are invariant under folding, degree <= 5", fold_err, 1e-12, None);

    let generators_ok = is_period(1, 1) && is_period(3, 0) && !is_period(1, 0) && !is_period(0, 1);
    s.record("period lattice generators", bool_residual(generators_ok), 0.0, None);
}

fn fourier_checks(s: &mut Suite) -> Result<(), CliError> {
    let g = make_grid(64)?;
    let ks = indices_up_to(8);
    let tables: Vec<Vec<Complex64>> = ks
        .par_iter()
        .map(|k| g.points().iter().map(|t| phi(k, t)).collect())
        .collect();
    let w = g.weight();
    let ortho = (0..ks.len())
        .into_par_iter()
        .map(|i| {
            (0..ks.len())
                .map(|j| {
                    let ip: Complex64 =
                        tables[i].iter().zip(&tables[j]).map(|(a, b)| a * b.conj()).sum::<Complex64>() * w;
                    (ip - if i == j { 1.0 } else { 0.0 }).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    s.record("discrete orthonormality, degree <= 8", ortho, 1e-12, Some(64));

    let mut rng = s.rng();
    let f = random_spectrum(&mut rng, 6);
    let back = analyze(&synthesize(&f, &g), 6).spectrum;
    s.record("analysis inverts synthesis, degree 6", back.max_abs_diff(&f), 1e-12, Some(64));

    let fft_gap = synthesize(&f, &g)
        .values()
        .iter()
        .zip(synthesize_fft(&f, &g).values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    s.record("FFT synthesis matches direct synthesis", fft_gap, 1e-11, Some(64));

    let real = real_spectrum(&mut rng, 6);
    s.record("real spectra synthesize to real values", synthesize(&real, &g).max_imag(), 1e-12, Some(64));

    let v = synthesize(&real, &g);
    let ps = [
        Exponent::Finite(1.0),
        Exponent::Finite(1.5),
        Exponent::Finite(2.0),
        Exponent::Finite(4.0),
        Exponent::Infinity,
    ];
    let norms: Vec<f64> = ps.iter().map(|&p| lp_norm(&v, p)).collect();
    let drop = norms.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    s.record("grid norms are nondecreasing in p", drop, 1e-12 * norms[4], Some(64));
    Ok(())
}

fn kernel_checks(s: &mut Suite) -> Result<(), CliError> {
    let mut rng = s.rng();
    let mut excess: f64 = 0.0;
    for _ in 0..2000 {
        let rho = rng.gen_range(0.0..0.95);
        let z = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        for r in 1..=6 {
            let v = classical_kernel_deriv(rho, z, r)?;
            excess = excess.max(v.abs() / classical_deriv_bound(rho, r) - 1.0);
        }
    }
    s.record("classical kernel derivative bound (relative excess)", excess.max(0.0), 1e-12, None);

    let mut mean_err: f64 = 0.0;
    let mut negativity: f64 = 0.0;
    for &rho in &[0.3, 0.6, 0.9] {
        let g = make_grid(auto_grid_size(rho).n)?;
        let vals: Vec<f64> = g.points().par_iter().map(|t| hex_kernel_closed(rho, t)).collect::<Result<_, _>>()?;
        mean_err = mean_err.max((hexsum_core::reduce::mean_f64(&vals) - 1.0).abs());
        negativity = negativity.max(-vals.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    s.record("kernel mean is 1, rho in {0.3, 0.6, 0.9}", mean_err, 1e-6, None);
    s.record("kernel is nonnegative", negativity.max(0.0), 0.0, None);

    let mut rng = s.rng();
    let pts: Vec<HexPoint> = (0..200).map(|_| fold(&random_point(&mut rng, 1.0))).collect();
    let mut closed_gap: f64 = 0.0;
    for t in &pts {
        let series = hex_kernel_series(0.8, t, 400)?;
        closed_gap = closed_gap.max((series.value - hex_kernel_closed(0.8, t)?).norm());
    }
    s.record("closed form matches series, rho = 0.8, cutoff 400", closed_gap, 1e-9, None);

    let mut deriv_gap: f64 = 0.0;
    for t in pts.iter().take(40) {
        for r in 1..=4 {
            let series = hex_kernel_deriv_series(0.5, t, r, 300)?;
            let closed = hex_kernel_deriv(0.5, t, r)?;
            deriv_gap = deriv_gap.max((series - closed).norm() / closed.abs().max(1.0));
        }
    }
    s.record("kernel derivatives match termwise series, r <= 4", deriv_gap, 1e-8, None);

    let mut i2_err: f64 = 0.0;
    let mut i3_err: f64 = 0.0;
    let mut bound_excess: f64 = 0.0;
    let cases: &[(ProductKind, &[usize])] = &[
        (ProductKind::I1, &[2]),
        (ProductKind::I2, &[1, 1]),
        (ProductKind::I3, &[1, 0, 1]),
    ];
    for i in 1..=9 {
        let rho = i as f64 / 10.0;
        let g = make_grid(auto_grid_size(rho).n)?;
        i2_err = i2_err.max((product_integral(rho, ProductKind::I2, &[0, 0], &g)? - 1.0).abs());
        let i3 = product_integral(rho, ProductKind::I3, &[0, 0, 0], &g)?;
        i3_err = i3_err.max((i3 / triple_product_mean(rho) - 1.0).abs());
        for (which, orders) in cases {
            let v = product_integral(rho, *which, orders, &g)?;
            bound_excess = bound_excess.max(v / product_bound(rho, *which, orders)? - 1.0);
        }
    }
    s.record("pair product integral equals 1", i2_err, 1e-4, None);
    s.record("triple product integral exact value (relative)", i3_err, 1e-4, None);
    s.record("product integrals respect their bounds", bound_excess.max(0.0), 0.0, None);
    Ok(())
}

fn operator_checks(s: &mut Suite, input: Option<&SpectralFunction>) -> Result<(), CliError> {
    let mut partition: f64 = 0.0;
    let mut range: f64 = 0.0;
    for nu in 0..=200 {
        for r in 1..=6 {
            for &rho in &[0.01, 0.3, 0.5, 0.9, 0.999] {
                let l = lambda_coeff(nu, r, rho);
                partition = partition.max((l + lambda_complement(nu, r, rho) - 1.0).abs());
                range = range.max(-l).max(l - 1.0);
            }
        }
    }
    s.record("lambda plus complement is 1", partition, 1e-12, None);
    s.record("lambda lies in [0, 1]", range.max(0.0), 1e-15, None);

    let mut rng = s.rng();
    let mut spectra: Vec<SpectralFunction> = (0..50)
        .map(|_| {
            let d = rng.gen_range(0..=10);
            random_spectrum(&mut rng, d)
        })
        .collect();
    if let Some(f) = input {
        spectra.push(f.clone());
    }
    let mut equiv: f64 = 0.0;
    for f in &spectra {
        for r in 1..=4 {
            for &rho in &[0.3, 0.7] {
                let p = SummationParams::new(rho, r)?;
                let scale = f.iter().map(|(_, c)| c.norm()).fold(1.0, f64::max);
                equiv = equiv.max(apply_operator(f, p).max_abs_diff(&apply_operator_derivative_form(f, p)) / scale);
            }
        }
    }
    s.record("spectral and derivative forms of the operator agree", equiv, 1e-12, None);

    let f = random_spectrum(&mut rng, 8);
    let mut commute: f64 = 0.0;
    for n in 0..=4 {
        let lhs = poisson_integral_spectral(&radial_derivative(&f, n), 0.6)?;
        let rhs = poisson_integral_derivative(&f, 0.6, n)?.scale(0.6f64.powi(n as i32));
        commute = commute.max(lhs.max_abs_diff(&rhs));
    }
    s.record("Poisson integral commutes with radial derivatives", commute, 1e-12, None);

    let mut sat = 0usize;
    for r in 1..=6 {
        for step in 1..20 {
            let rho = step as f64 / 20.0;
            let p = SummationParams::new(rho, r)?;
            let low = random_spectrum(&mut rng, r - 1);
            sat += usize::from(apply_operator(&low, p) != low);
            for nu in r..=40 {
                let k = HexIndex::from_pair(nu as i64, 0);
                let a = apply_operator(&SpectralFunction::basis(k), p).get(&k);
                sat += usize::from(!(a.re < 1.0 && a.re >= 0.0 && a.im == 0.0));
            }
        }
    }
    s.record("saturation: low polynomials fixed, higher shells damped", sat as f64, 0.0, None);

    let mut ident: f64 = 0.0;
    for r in 2..=4 {
        for nu in r..=30 {
            for i in 1..=9 {
                let (lhs, rhs) = remainder_coefficient_check(nu, r, i as f64 / 10.0)?;
                ident = ident.max((lhs - rhs).abs());
            }
        }
    }
    s.record("coefficient remainder identity", ident, 1e-10, None);

    let g = make_grid(32)?;
    let f = real_spectrum(&mut rng, 6);
    let mut rem: f64 = 0.0;
    for r in 2..=3 {
        let p = SummationParams::new(0.7, r)?;
        let a = remainder_integral_norm(&f, p, Exponent::Finite(1.0), &g, 32)?;
        let b = deviation_norm(&f, p, Exponent::Finite(1.0), &g);
        rem = rem.max((a - b).abs());
    }
    s.record("integral remainder form matches the deviation", rem, 1e-8, Some(32));

    let mut l2: f64 = 0.0;
    for r in 1..=3 {
        let p = SummationParams::new(0.9, r)?;
        l2 = l2.max((deviation_norm(&f, p, Exponent::Finite(2.0), &g) - deviation_l2_exact(&f, p)).abs());
    }
    s.record("grid L2 deviation equals spectral L2 deviation", l2, 1e-10, Some(32));
    Ok(())
}

fn input_checks(s: &mut Suite, f: &SpectralFunction) -> Result<(), CliError> {
    let d = f.max_degree();
    let n = (4 * d as usize + 1).max(16);
    let g = make_grid(n)?;
    let back = analyze(&synthesize_fft(f, &g), d).spectrum;
    s.record("input: analysis inverts synthesis", back.max_abs_diff(f), 1e-10, Some(n));
    Ok(())
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let input = match cfg.families.as_slice() {
        [fam @ Family::File(_)] => Some(fam.build(1)?),
        _ => None,
    };
    let mut s = Suite {
        report: Report::new("verify", &["invariant", "residual", "tolerance", "grid_n", "status"]),
        seed: cfg.seed,
        stream: 0,
    };
    lattice_checks(&mut s);
    fourier_checks(&mut s)?;
    kernel_checks(&mut s)?;
    operator_checks(&mut s, input.as_ref())?;
    if let Some(f) = &input {
        input_checks(&mut s, f)?;
    }
    Ok(s.report)
}
