//! Parameter sweeps over the ladder `ρ = 1 - 2^{-k}`.
//!
//! Ladder points are evaluated on the rayon pool and collected in ladder
//! order, so reports do not depend on scheduling.

use hexsum_core::poisson::{
    auto_grid_size, bernstein_integral, hex_kernel_closed, hex_kernel_series, product_integral,
    series_tail_bound, triple_product_mean, ProductKind, R_MAX,
};
use hexsum_core::stats::fit_line;
use hexsum_core::taylor_abel_poisson::{
    deviation_l2_exact, deviation_norm, falling_factorial, kfun_estimate, lambda_coeff, SummationParams,
};
use hexsum_core::{fold, make_grid, Exponent, HexGrid, HexPoint, SpectralFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, GridChoice};
use crate::error::CliError;
use crate::family::Family;
use crate::report::{Cell, Report};

/// Tail-bound target for the truncated kernel series.
const SERIES_TAIL: f64 = 1e-12;
const SERIES_POINTS: usize = 32;
const MEAN_TOL: f64 = 1e-6;
const SERIES_TOL: f64 = 1e-9;
const PRODUCT_REL_TOL: f64 = 1e-4;
const RATIO_BAND: (f64, f64) = (0.9, 1.1);
/// Smallest ladder top at which the last-two-points ratio is asserted.
const RATIO_MIN_K: i32 = 5;
const SLOPE_TOL: f64 = 0.15;
const ORACLE_SLOPE_TOL: f64 = 1e-9;
const MIN_FIT_POINTS: usize = 4;
const AGREE_TOL: f64 = 1e-10;

fn kernel_grid(cfg: &ExperimentConfig, rho: f64) -> (usize, bool) {
    match cfg.grid {
        GridChoice::Fixed(n) => (n, false),
        GridChoice::Auto => {
            let a = auto_grid_size(rho);
            (a.n, a.capped)
        }
    }
}

/// Grid for norms of a degree-`degree` polynomial: grid averages of
/// products of two such polynomials are exact once `n > 4 degree`.
pub fn spectral_grid_size(cfg: &ExperimentConfig, degree: u32) -> usize {
    match cfg.grid {
        GridChoice::Fixed(n) => n,
        GridChoice::Auto => (4 * degree as usize + 1).max(64),
    }
}

fn orders(explicit: Option<u32>, default: &[u32]) -> Vec<u32> {
    match explicit {
        Some(r) => vec![r],
        None => default.to_vec(),
    }
}

fn grid(n: usize) -> Result<HexGrid, CliError> {
    Ok(make_grid(n)?)
}

fn series_cutoff(rho: f64) -> u32 {
    let mut c = 1;
    while series_tail_bound(rho, c) > SERIES_TAIL && c < 1 << 20 {
        c += 1;
    }
    c
}

struct KernelPoint {
    grid_n: usize,
    capped: bool,
    mean: f64,
    min: f64,
    cutoff: u32,
    series_diff: f64,
    tail: f64,
    i2: f64,
    i3: f64,
}

pub fn run_kernel(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let mut report = Report::new(
        "kernel",
        &[
            "k", "rho", "grid_n", "grid_capped", "kernel_mean", "kernel_min", "series_cutoff", "series_points",
            "series_max_rel_diff", "tail_bound", "i2", "i3", "i3_exact", "tolerance", "status",
        ],
    );
    let ladder = cfg.ladder();
    let points: Vec<KernelPoint> = ladder
        .par_iter()
        .map(|&(k, rho)| -> Result<KernelPoint, CliError> {
            let (grid_n, capped) = kernel_grid(cfg, rho);
            let g = grid(grid_n)?;
            let values: Vec<f64> = g.points().par_iter().map(|t| hex_kernel_closed(rho, t)).collect::<Result<_, _>>()?;
            let mean = hexsum_core::reduce::mean_f64(&values);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let cutoff = series_cutoff(rho);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (k as u64).wrapping_mul(0x9e37_79b9));
            let sample: Vec<HexPoint> = (0..SERIES_POINTS)
                .map(|_| fold(&HexPoint::from_pair(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                .collect();
            let mut series_diff: f64 = 0.0;
            let mut tail: f64 = 0.0;
            for t in &sample {
                let s = hex_kernel_series(rho, t, cutoff)?;
                let c = hex_kernel_closed(rho, t)?;
                series_diff = series_diff.max((s.value - c).norm() / c.abs().max(1.0));
                tail = tail.max(s.tail_bound);
            }
            let i2 = product_integral(rho, ProductKind::I2, &[0, 0], &g)?;
            let i3 = product_integral(rho, ProductKind::I3, &[0, 0, 0], &g)?;
            Ok(KernelPoint {
                grid_n,
                capped,
                mean,
                min,
                cutoff,
                series_diff,
                tail,
                i2,
                i3,
            })
        })
        .collect::<Result<_, _>>()?;

    for (&(k, rho), pt) in ladder.iter().zip(&points) {
        let exact = triple_product_mean(rho);
        let ok = (pt.mean - 1.0).abs() <= MEAN_TOL
            && pt.min >= 0.0
            && pt.series_diff <= SERIES_TOL
            && (pt.i2 - 1.0).abs() <= PRODUCT_REL_TOL
            && (pt.i3 / exact - 1.0).abs() <= PRODUCT_REL_TOL;
        let status = report.check(ok, || format!("kernel checks failed at k={k} (rho={rho})"));
        report.push(vec![
            k.into(),
            rho.into(),
            pt.grid_n.into(),
            pt.capped.into(),
            pt.mean.into(),
            pt.min.into(),
            pt.cutoff.into(),
            SERIES_POINTS.into(),
            pt.series_diff.into(),
            pt.tail.into(),
            pt.i2.into(),
            pt.i3.into(),
            exact.into(),
            format!("mean {MEAN_TOL:e}; series rel {SERIES_TOL:e}; products rel {PRODUCT_REL_TOL:e}").into(),
            status.into(),
        ]);
    }
    Ok(report)
}

pub fn run_bernstein(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let rs = orders(cfg.r, &[0, 1, 2, 3]);
    if let Some(&r) = rs.iter().find(|&&r| r as usize > R_MAX) {
        return Err(CliError::Config(format!("bernstein supports r <= {R_MAX}, got {r}")));
    }
    let mut report = Report::new(
        "bernstein",
        &[
            "kind", "r", "k", "rho", "I", "scaled", "last_ratio", "grid_n", "grid_capped", "under_resolved",
            "tolerance", "status",
        ],
    );
    let ladder = cfg.ladder();
    // One grid at a time: the largest auto grid holds 4096^2 points.
    let mut table = vec![Vec::with_capacity(ladder.len()); rs.len()];
    for &(_, rho) in &ladder {
        let (n, capped) = kernel_grid(cfg, rho);
        let g = grid(n)?;
        for (slot, &r) in table.iter_mut().zip(&rs) {
            slot.push((bernstein_integral(rho, r as usize, &g)?, capped));
        }
    }

    for (&r, values) in rs.iter().zip(&table) {
        for (&(k, rho), (b, capped)) in ladder.iter().zip(values) {
            let s = b.scaled();
            let (ok, tol) = if r == 0 {
                ((s - 1.0).abs() <= MEAN_TOL, format!("|scaled - 1| <= {MEAN_TOL:e}"))
            } else {
                (s.is_finite() && s > 0.0, "finite".to_string())
            };
            let status = report.check(ok, || format!("bernstein r={r} k={k}: scaled = {s}"));
            report.push(vec![
                "point".into(),
                r.into(),
                k.into(),
                rho.into(),
                b.value.into(),
                s.into(),
                Cell::Empty,
                b.grid_n.into(),
                (*capped).into(),
                b.under_resolved.into(),
                tol.into(),
                status.into(),
            ]);
        }
        let scaled: Vec<f64> = values.iter().map(|(b, _)| b.scaled()).collect();
        let c_emp = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ratio = match scaled.len() {
            0 | 1 => None,
            m => Some(scaled[m - 1] / scaled[m - 2]),
        };
        let asserted = r >= 1 && cfg.k_max >= RATIO_MIN_K && ratio.is_some();
        let status = if asserted {
            let q = ratio.unwrap_or(f64::NAN);
            report.check((RATIO_BAND.0..=RATIO_BAND.1).contains(&q), || {
                format!("bernstein r={r}: last-two ratio {q} outside [{}, {}]", RATIO_BAND.0, RATIO_BAND.1)
            })
        } else {
            "not-asserted"
        };
        report.push(vec![
            "summary".into(),
            r.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            c_emp.into(),
            ratio.map_or(Cell::Empty, Cell::Float),
            values.iter().map(|(b, _)| b.grid_n).max().unwrap_or(0).into(),
            values.iter().any(|(_, c)| *c).into(),
            values.iter().any(|(b, _)| b.under_resolved).into(),
            format!("last_ratio in [{}, {}] when k_max >= {RATIO_MIN_K}", RATIO_BAND.0, RATIO_BAND.1).into(),
            status.into(),
        ]);
    }
    Ok(report)
}

fn shares_fixed_space(f: &SpectralFunction, r: u32) -> bool {
    f.support_degree().is_none_or(|d| d < r)
}

pub fn run_approximate(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let rs = orders(cfg.r, &[1, 2, 3]);
    let mut report = Report::new(
        "approximate",
        &[
            "family", "r", "k", "rho", "p", "deviation", "scaled", "deviation_l2_exact", "grid_n", "tolerance",
            "status",
        ],
    );
    let ladder = cfg.ladder();
    for family in &cfg.families {
        for &r in &rs {
            if r == 0 {
                return Err(CliError::Config("approximate needs r >= 1".into()));
            }
            let f = family.build(r)?;
            let n = spectral_grid_size(cfg, f.max_degree());
            let g = grid(n)?;
            let rows: Vec<(f64, f64)> = ladder
                .par_iter()
                .map(|&(_, rho)| -> Result<(f64, f64), CliError> {
                    let params = SummationParams::new(rho, r)?;
                    Ok((deviation_norm(&f, params, cfg.p, &g), deviation_l2_exact(&f, params)))
                })
                .collect::<Result<_, _>>()?;
            let fixed = shares_fixed_space(&f, r);
            for (&(k, rho), &(dev, exact)) in ladder.iter().zip(&rows) {
                let mut ok = dev.is_finite();
                let mut tol = Vec::new();
                if fixed {
                    ok &= dev == 0.0;
                    tol.push("deviation exactly 0".to_string());
                }
                if cfg.p == Exponent::Finite(2.0) {
                    ok &= (dev - exact).abs() <= AGREE_TOL * exact.max(1.0);
                    tol.push(format!("|grid - exact| <= {AGREE_TOL:e}"));
                }
                let label = family.label(r);
                let status = report.check(ok, || format!("approximate {label} r={r} k={k}: deviation {dev}, exact {exact}"));
                report.push(vec![
                    label.into(),
                    r.into(),
                    k.into(),
                    rho.into(),
                    cfg.p.to_string().into(),
                    dev.into(),
                    (dev / (1.0 - rho).powi(r as i32)).into(),
                    exact.into(),
                    n.into(),
                    if tol.is_empty() { "finite".to_string() } else { tol.join("; ") }.into(),
                    status.into(),
                ]);
            }
        }
    }
    Ok(report)
}

/// Per-index `(Σ_k (1 - λ_{|k|,r}(ρ))² |f̂(k)|²)^{1/2}`, with `λ` from its
/// defining finite sum.
pub fn brute_force_l2_deviation(f: &SpectralFunction, r: u32, rho: f64) -> f64 {
    f.iter()
        .map(|(k, c)| (1.0 - lambda_coeff(k.degree(), r, rho)).powi(2) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn log2_fit(ladder: &[(i32, f64)], devs: &[f64]) -> Option<hexsum_core::stats::LineFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = ladder
        .iter()
        .zip(devs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(&(_, rho), d)| ((1.0 - rho).log2(), d.log2()))
        .unzip();
    if x.len() < MIN_FIT_POINTS {
        return None;
    }
    fit_line(&x, &y)
}

pub fn run_rates(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let ladder = cfg.ladder();
    if ladder.len() < MIN_FIT_POINTS {
        return Err(CliError::Config(format!(
            "rate fits need at least {MIN_FIT_POINTS} ladder points, got {}",
            ladder.len()
        )));
    }
    let rs = orders(cfg.r, &[1, 2, 3]);
    let exact_l2 = cfg.p == Exponent::Finite(2.0);
    let mut report = Report::new(
        "rates",
        &[
            "kind", "family", "r", "k", "rho", "p", "deviation", "scaled", "slope", "stderr", "residual",
            "oracle_slope", "grid_n", "tolerance", "status",
        ],
    );
    for family in &cfg.families {
        for &r in &rs {
            if r == 0 {
                return Err(CliError::Config("rates needs r >= 1".into()));
            }
            let f = family.build(r)?;
            let label = family.label(r);
            let (grid_cell, g) = if exact_l2 {
                (Cell::Text("spectral".into()), None)
            } else {
                let n = spectral_grid_size(cfg, f.max_degree());
                (Cell::from(n), Some(grid(n)?))
            };
            let devs: Vec<f64> = ladder
                .par_iter()
                .map(|&(_, rho)| -> Result<f64, CliError> {
                    let params = SummationParams::new(rho, r)?;
                    Ok(match &g {
                        None => deviation_l2_exact(&f, params),
                        Some(g) => deviation_norm(&f, params, cfg.p, g),
                    })
                })
                .collect::<Result<_, _>>()?;
            for (&(k, rho), &d) in ladder.iter().zip(&devs) {
                report.push(vec![
                    "point".into(),
                    label.clone().into(),
                    r.into(),
                    k.into(),
                    rho.into(),
                    cfg.p.to_string().into(),
                    d.into(),
                    (d / (1.0 - rho).powi(r as i32)).into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    grid_cell.clone(),
                    Cell::Empty,
                    Cell::Empty,
                ]);
            }

            let all_zero = devs.iter().all(|&d| d == 0.0);
            let fit = log2_fit(&ladder, &devs);
            let mut oracle_cell = Cell::Empty;
            let (slope_cell, stderr_cell, resid_cell) = match (&fit, all_zero) {
                (_, true) => (Cell::from("exact-zero"), Cell::Empty, Cell::Empty),
                (Some(fit), false) => (fit.slope.into(), fit.stderr.into(), fit.residual.into()),
                (None, false) => (Cell::from("undetermined"), Cell::Empty, Cell::Empty),
            };
            let (ok, tol) = if shares_fixed_space(&f, r) {
                (all_zero, "deviation exactly 0".to_string())
            } else if let Some(fit) = &fit {
                match family {
                    Family::Analytic => (
                        (fit.slope - r as f64).abs() <= SLOPE_TOL,
                        format!("|slope - r| <= {SLOPE_TOL}"),
                    ),
                    Family::ShellDecay(_) if exact_l2 => {
                        let oracle: Vec<f64> =
                            ladder.iter().map(|&(_, rho)| brute_force_l2_deviation(&f, r, rho)).collect();
                        match log2_fit(&ladder, &oracle) {
                            Some(o) => {
                                oracle_cell = o.slope.into();
                                (
                                    (fit.slope - o.slope).abs() <= ORACLE_SLOPE_TOL,
                                    format!("|slope - oracle| <= {ORACLE_SLOPE_TOL:e}"),
                                )
                            }
                            None => (false, "oracle fit failed".to_string()),
                        }
                    }
                    _ => (fit.slope.is_finite(), "finite".to_string()),
                }
            } else {
                (false, format!("at least {MIN_FIT_POINTS} nonzero deviations"))
            };
            let status = report.check(ok, || format!("rates {label} r={r}: {tol} violated"));
            report.push(vec![
                "fit".into(),
                label.into(),
                r.into(),
                Cell::Empty,
                Cell::Empty,
                cfg.p.to_string().into(),
                Cell::Empty,
                Cell::Empty,
                slope_cell,
                stderr_cell,
                resid_cell,
                oracle_cell,
                grid_cell,
                tol.into(),
                status.into(),
            ]);
        }
    }
    Ok(report)
}

/// `max(1, ρ^n δ^n I_n(ρ))`, the constant the sandwich `δ^n M_p <= C K_n`
/// can be checked against for `n <= R_MAX`.
fn sandwich_constant(n: u32, rho: f64) -> Result<Option<(f64, usize)>, CliError> {
    if n as usize > R_MAX {
        return Ok(None);
    }
    // The kernel integral always uses the ρ-dependent resolution rule.
    let gn = auto_grid_size(rho).n;
    let b = bernstein_integral(rho, n as usize, &grid(gn)?)?;
    Ok(Some(((rho.powi(n as i32) * b.scaled()).max(1.0), gn)))
}

pub fn run_kfun(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let ns = orders(cfg.n, &[1, 2]);
    if ns.contains(&0) {
        return Err(CliError::Config("K-functional order n must be at least 1".into()));
    }
    let ladder: Vec<(i32, f64)> = cfg.ladder().into_iter().map(|(k, _)| (k, 2f64.powi(-k))).collect();
    let mut report = Report::new(
        "kfun",
        &[
            "kind", "family", "n", "k", "delta", "p", "lower_proxy", "upper", "candidate", "ratio", "bound",
            "grid_n", "bound_grid_n", "tolerance", "status",
        ],
    );
    let mut bounds = Vec::with_capacity(ns.len());
    for &n in &ns {
        let mut per_k = Vec::with_capacity(ladder.len());
        for &(_, delta) in &ladder {
            per_k.push(sandwich_constant(n, 1.0 - delta)?);
        }
        bounds.push(per_k);
    }

    for family in &cfg.families {
        for (&n, bound_row) in ns.iter().zip(&bounds) {
            let f = family.build(n)?;
            let label = family.label(n);
            let grid_n = spectral_grid_size(cfg, f.max_degree());
            let g = grid(grid_n)?;
            let estimates: Vec<_> = ladder
                .par_iter()
                .map(|&(_, delta)| kfun_estimate(&f, delta, n, cfg.p, &g))
                .collect::<Result<_, _>>()?;
            let mut c: f64 = 0.0;
            let mut all_ok = true;
            for ((&(k, delta), est), bound) in ladder.iter().zip(&estimates).zip(bound_row) {
                let ratio = if est.upper == 0.0 && est.lower_proxy == 0.0 {
                    0.0
                } else {
                    est.lower_proxy / est.upper
                };
                c = c.max(ratio);
                let mut ok = est.upper.is_finite() && ratio.is_finite();
                let mut tol = vec!["finite ratio".to_string()];
                if let Some((b, _)) = bound {
                    ok &= ratio <= b * (1.0 + 1e-9);
                    tol.push("ratio <= bound".into());
                }
                if shares_fixed_space(&f, n) {
                    ok &= est.upper == 0.0;
                    tol.push("upper exactly 0".into());
                }
                if let Family::Basis(nu) = family {
                    let cap = 1f64.min(delta.powi(n as i32) * falling_factorial(*nu, n));
                    ok &= est.upper <= cap + 1e-12;
                    tol.push("upper <= min(1, delta^n nu!/(nu-n)!)".into());
                }
                all_ok &= ok;
                let status = report.check(ok, || format!("kfun {label} n={n} k={k}: lower {} upper {}", est.lower_proxy, est.upper));
                report.push(vec![
                    "point".into(),
                    label.clone().into(),
                    n.into(),
                    k.into(),
                    delta.into(),
                    cfg.p.to_string().into(),
                    est.lower_proxy.into(),
                    est.upper.into(),
                    est.argmin_candidate.to_string().into(),
                    ratio.into(),
                    bound.map_or(Cell::Empty, |(b, _)| b.into()),
                    grid_n.into(),
                    bound.map_or(Cell::Empty, |(_, gn)| gn.into()),
                    tol.join("; ").into(),
                    status.into(),
                ]);
            }
            report.push(vec![
                "summary".into(),
                label.into(),
                n.into(),
                Cell::Empty,
                Cell::Empty,
                cfg.p.to_string().into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                c.into(),
                Cell::Empty,
                grid_n.into(),
                Cell::Empty,
                "ratio column maximum is the recorded constant".into(),
                if all_ok { "pass" } else { "fail" }.into(),
            ]);
        }
    }
    Ok(report)
}
