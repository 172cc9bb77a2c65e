//! Acceptance gate: one line per criterion, non-zero exit on any failure.

use std::time::Instant;

use hexsum_core::families::{analytic_kernel, analytic_kernel_tail_l2, shell_decay};
use hexsum_core::lattice::indices_up_to;
use hexsum_core::poisson::{
    auto_grid_size, bernstein_integral, hex_kernel_closed, hex_kernel_series, product_integral,
    triple_product_mean, ProductKind,
};
use hexsum_core::stats::fit_line;
use hexsum_core::taylor_abel_poisson::{
    apply_operator, apply_operator_derivative_form, deviation_l2_exact, kfun_estimate,
    lambda_complement, poisson_integral_spectral, remainder_coefficient_check, SummationParams,
};
use hexsum_core::{fold, make_grid, phi, synthesize, Exponent, HexIndex, HexPoint, SpectralFunction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_spectrum(rng: &mut ChaCha8Rng, degree: u32) -> SpectralFunction {
    SpectralFunction::from_entries(
        degree,
        indices_up_to(degree)
            .into_iter()
            .map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
    )
    .unwrap()
}

fn rho_tenths() -> impl Iterator<Item = f64> {
    (1..=9).map(|i| i as f64 / 10.0)
}

fn orthonormality() -> Outcome {
    let g = make_grid(64).unwrap();
    let ks = indices_up_to(8);
    let tables: Vec<Vec<Complex64>> = ks
        .par_iter()
        .map(|k| g.points().iter().map(|t| phi(k, t)).collect())
        .collect();
    let w = g.weight();
    let err = (0..ks.len())
        .into_par_iter()
        .map(|i| {
            let mut worst: f64 = 0.0;
            for j in 0..ks.len() {
                let ip: Complex64 = tables[i].iter().zip(&tables[j]).map(|(a, b)| a * b.conj()).sum::<Complex64>() * w;
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - want).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    outcome(err <= 1e-12, format!("{} indices, max |<phi_k, phi_l> - delta| = {err:.3e}", ks.len()))
}

fn kernel_mean() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for &rho in &[0.3, 0.6, 0.9] {
        let n = auto_grid_size(rho).n;
        let g = make_grid(n).unwrap();
        let mean = g.mean_of(|t| hex_kernel_closed(rho, t).unwrap());
        worst = worst.max((mean - 1.0).abs());
        parts.push(format!("rho={rho} n={n}"));
    }
    outcome(worst <= 1e-6, format!("{}, max |mean - 1| = {worst:.3e}", parts.join(", ")))
}

fn closed_vs_series() -> Outcome {
    let rho = 0.8;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points: Vec<HexPoint> = (0..1000)
        .map(|_| fold(&HexPoint::from_pair(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let (diff, tail) = points
        .par_iter()
        .map(|t| {
            let s = hex_kernel_series(rho, t, 400).unwrap();
            let c = hex_kernel_closed(rho, t).unwrap();
            ((s.value - c).norm(), s.tail_bound)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    outcome(
        diff <= 1e-9 && tail <= 1e-9,
        format!("rho=0.8 cutoff=400, max diff = {diff:.3e}, tail bound = {tail:.3e}"),
    )
}

fn product_values() -> Outcome {
    let mut worst2: f64 = 0.0;
    let mut worst3: f64 = 0.0;
    for rho in rho_tenths() {
        let g = make_grid(auto_grid_size(rho).n).unwrap();
        let i2 = product_integral(rho, ProductKind::I2, &[0, 0], &g).unwrap();
        let i3 = product_integral(rho, ProductKind::I3, &[0, 0, 0], &g).unwrap();
        worst2 = worst2.max((i2 - 1.0).abs());
        worst3 = worst3.max((i3 / triple_product_mean(rho) - 1.0).abs());
    }
    outcome(
        worst2 <= 1e-4 && worst3 <= 1e-4,
        format!("max rel err I2 = {worst2:.3e}, I3 = {worst3:.3e}"),
    )
}

fn bernstein_shape() -> Outcome {
    let ks: Vec<i32> = (1..=7).collect();
    let grids: Vec<_> = ks
        .iter()
        .map(|&k| make_grid(auto_grid_size(1.0 - 2f64.powi(-k)).n).unwrap())
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in 1..=3 {
        let scaled: Vec<f64> = ks
            .iter()
            .zip(&grids)
            .map(|(&k, g)| bernstein_integral(1.0 - 2f64.powi(-k), r, g).unwrap().scaled())
            .collect();
        let bounded = scaled.iter().all(|v| v.is_finite() && *v > 0.0);
        let ratio = scaled[6] / scaled[5];
        let c_emp = scaled.iter().cloned().fold(0.0, f64::max);
        pass &= bounded && (0.9..=1.1).contains(&ratio);
        parts.push(format!("r={r} C_emp={c_emp:.4} ratio={ratio:.4}"));
    }
    outcome(pass, parts.join(", "))
}

fn operator_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let degree = rng.gen_range(0..=10);
        let f = random_spectrum(&mut rng, degree);
        let rho = rng.gen_range(0.0..1.0);
        for r in 1..=4 {
            let p = SummationParams::new(rho, r).unwrap();
            worst = worst.max(apply_operator(&f, p).max_abs_diff(&apply_operator_derivative_form(&f, p)));
        }
    }
    outcome(worst <= 1e-12, format!("50 spectra, r<=4, max coefficient diff = {worst:.3e}"))
}

fn coefficient_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for r in 2..=4 {
        for nu in r..=30 {
            for rho in rho_tenths() {
                let (lhs, rhs) = remainder_coefficient_check(nu, r, rho).unwrap();
                worst = worst.max((lhs - rhs).abs());
                cases += 1;
            }
        }
    }
    // Below nu = r both sides vanish identically.
    outcome(worst <= 1e-10, format!("{cases} cases, max |lhs - rhs| = {worst:.3e}"))
}

fn saturation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut fixed = true;
    let mut damped = true;
    for r in 1..=6 {
        for step in 1..20 {
            let rho = step as f64 / 20.0;
            let p = SummationParams::new(rho, r).unwrap();
            let f = random_spectrum(&mut rng, r - 1);
            fixed &= apply_operator(&f, p) == f;
            for nu in r..=40 {
                let k = HexIndex::from_pair(nu as i64, 0);
                let a = apply_operator(&SpectralFunction::basis(k), p).get(&k);
                damped &= a.im == 0.0 && a.re < 1.0 && a.re >= 0.0 && lambda_complement(nu, r, rho) > 0.0;
            }
        }
    }
    outcome(fixed && damped, format!("fixed points exact: {fixed}, strict damping: {damped}"))
}

fn rate_law() -> Outcome {
    let (rho0, degree) = (0.5, 64);
    let f = analytic_kernel(rho0, degree);
    let tail = analytic_kernel_tail_l2(rho0, degree);
    let mut pass = true;
    let mut parts = vec![format!("degree={degree} tail={tail:.1e}")];
    for r in 1..=3 {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for k in 2..=8 {
            let rho = 1.0 - 2f64.powi(-k);
            let dev = deviation_l2_exact(&f, SummationParams::new(rho, r).unwrap());
            // The truncated tail moves the deviation by at most `tail`.
            pass &= tail <= 1e-6 * dev;
            x.push(-(k as f64));
            y.push(dev.log2());
        }
        let fit = fit_line(&x, &y).unwrap();
        pass &= (fit.slope - r as f64).abs() <= 0.15;
        parts.push(format!("r={r} slope={:.4}", fit.slope));
    }
    outcome(pass, parts.join(", "))
}

fn convolution_oracle() -> Outcome {
    let n = 48;
    let rho = 0.5;
    let g = make_grid(n).unwrap();
    let kernel: Vec<f64> = g.points().iter().map(|s| hex_kernel_closed(rho, s).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut inputs: Vec<SpectralFunction> = indices_up_to(5).into_iter().map(SpectralFunction::basis).collect();
    let raw = random_spectrum(&mut rng, 5);
    let mass: f64 = raw.iter().map(|(_, c)| c.norm()).sum();
    inputs.push(raw.scale(1.0 / mass));
    let errs: Vec<f64> = inputs
        .par_iter()
        .map(|f| {
            let fv = synthesize(f, &g);
            let spectral = synthesize(&poisson_integral_spectral(f, rho).unwrap(), &g);
            let mut worst: f64 = 0.0;
            for m1 in 0..n {
                for m2 in 0..n {
                    let mut acc = Complex64::default();
                    for s1 in 0..n {
                        for s2 in 0..n {
                            acc += fv.values()[g.position((m1 + s1) % n, (m2 + s2) % n)] * kernel[g.position(s1, s2)];
                        }
                    }
                    let conv = acc / (n * n) as f64;
                    worst = worst.max((conv - spectral.values()[g.position(m1, m2)]).norm());
                }
            }
            worst
        })
        .collect();
    let (basis_err, random_err) = (errs[..errs.len() - 1].iter().cloned().fold(0.0, f64::max), errs[errs.len() - 1]);
    // Grid sampling folds kernel coefficients of degree >= 2n/3 onto the
    // input shells; this is the exact discrepancy for a single basis function.
    let kv: Vec<Complex64> = kernel.iter().map(|&v| v.into()).collect();
    let aliased = hexsum_core::analyze(&hexsum_core::GridFunction::new(&g, kv).unwrap(), 5).spectrum;
    let floor = aliased
        .iter()
        .map(|(k, c)| (c - rho.powi(k.degree() as i32)).norm())
        .fold(0.0, f64::max);
    let err = basis_err.max(random_err);
    outcome(
        err <= 1e-8,
        format!(
            "n=48 rho=0.5, basis functions deg<=5: {basis_err:.3e}, random unit-l1 f: {random_err:.3e}, aliasing floor {floor:.3e}"
        ),
    )
}

fn kfun_sandwich() -> Outcome {
    let g = make_grid(256).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for &s in &[2.0, 3.0, 4.0] {
        let f = shell_decay(s, 64);
        for n in 1..=2u32 {
            let mut c: f64 = 0.0;
            for k in 1..=6 {
                let delta = 2f64.powi(-k);
                let est = kfun_estimate(&f, delta, n, Exponent::Finite(1.0), &g).unwrap();
                pass &= est.upper > 0.0 && est.upper.is_finite();
                let ratio = est.lower_proxy / est.upper;
                let rho = 1.0 - delta;
                let bern = bernstein_integral(rho, n as usize, &make_grid(auto_grid_size(rho).n).unwrap()).unwrap();
                let allowed = (rho.powi(n as i32) * bern.scaled()).max(1.0) * (1.0 + 1e-9);
                pass &= ratio <= allowed;
                c = c.max(ratio);
            }
            pass &= c.is_finite();
            parts.push(format!("s={s} n={n} C={c:.4}"));
        }
    }
    outcome(pass, parts.join(", "))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("discrete orthonormality", orthonormality),
        ("kernel mean", kernel_mean),
        ("closed form vs series", closed_vs_series),
        ("product integral values", product_values),
        ("Bernstein-type shape", bernstein_shape),
        ("operator equivalence", operator_equivalence),
        ("coefficient identity", coefficient_identity),
        ("saturation", saturation),
        ("rate law", rate_law),
        ("Poisson integral oracle", convolution_oracle),
        ("K-functional sandwich", kfun_sandwich),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {:>2}. {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
