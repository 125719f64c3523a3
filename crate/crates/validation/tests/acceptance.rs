//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use boundmoments::closed_form::{
    harmonic_exact, morse_exact, pt_exact, pt_k_at_level, pt_k_at_level_asymptotic,
    pt_k_from_kappa, quartic_k_at_level, quartic_m2,
};
use boundmoments::moments::{
    choose_gamma, gamma_spread, moment_estimate, normalized_moment, orbit_averages, Kernel,
};
use boundmoments::oracle::{eigenvalue_sequence, solve_eigen, OracleOptions};
use boundmoments::quantize::{quantize, Order};
use boundmoments::safe_terms::delta_f;
use boundmoments::wavefield::{default_grid, synthesize, WaveField};
use boundmoments::{Potential, Result};
use num_complex::Complex64;

const KAPPA: f64 = 8.9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn eps1_at_optimal_gamma(p: &Potential, k: f64, n: usize) -> Result<(f64, f64)> {
    let eps0 = quantize(p, k, n, Order::Zero, 1.0)?.eps0;
    let gamma = choose_gamma(p, eps0)?;
    Ok((quantize(p, k, n, Order::One, gamma)?.eps1, gamma))
}

fn eigenvalues() -> Result<Outcome> {
    let start = Instant::now();
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(KAPPA);
    let mut errs = Vec::new();
    for n in 0..=8 {
        let (eps1, _) = eps1_at_optimal_gamma(&p, k, n)?;
        errs.push(rel(eps1, pt_exact(k, n).unwrap()));
    }
    let secs = start.elapsed().as_secs_f64();
    let low = errs[..=6].iter().cloned().fold(0.0, f64::max);
    let all = errs.iter().cloned().fold(0.0, f64::max);
    Ok(outcome(
        low <= 1e-5 && all <= 5e-5 && secs < 5.0,
        format!(
            "max rel err n<=6 {low:.2e} (<= 1e-5), n<=8 {all:.2e} (<= 5e-5), {secs:.2} s (< 5 s)"
        ),
    ))
}

fn rms_widths() -> Result<Outcome> {
    let start = Instant::now();
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(KAPPA);
    let (mut e0, mut e2) = (Vec::new(), Vec::new());
    for n in 0..=8 {
        let exact = solve_eigen(&p, k, n, 1e-10)?.rms_width();
        let (eps1, gamma) = eps1_at_optimal_gamma(&p, k, n)?;
        let (w0, w2) = moment_estimate(&p, eps1, k, gamma)?.rms_width();
        e0.push(rel(w0, exact));
        e2.push(rel(w2, exact));
    }
    let secs = start.elapsed().as_secs_f64();
    let max0 = e0.iter().cloned().fold(0.0, f64::max);
    let max2 = e2.iter().cloned().fold(0.0, f64::max);
    let tight = e2.iter().filter(|&&e| e <= 2e-4).count();
    let list: Vec<String> = e2.iter().map(|e| format!("{e:.1e}")).collect();
    Ok(outcome(
        max0 <= 0.10 && max2 <= 1e-3 && tight >= 7 && secs < 30.0,
        format!(
            "order-0 max {max0:.3} (<= 0.10); order-2 [{}] max {max2:.2e} (<= 1e-3), {tight}/9 <= 2e-4 (>= 7); {secs:.1} s (< 30 s)",
            list.join(" ")
        ),
    ))
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn slopes() -> Result<Outcome> {
    let p = Potential::poschl_teller();
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [-0.8, -0.6, -0.4, -0.2] {
        let gamma = choose_gamma(&p, eps)?;
        let (mut xs, mut e0, mut e2) = (Vec::new(), Vec::new(), Vec::new());
        for n in 2..=8 {
            // The oracle needs the exact k_n; the estimate uses its asymptotic form.
            let exact = solve_eigen(&p, pt_k_at_level(eps, n), n, 1e-11)?.rms_width();
            let k = pt_k_at_level_asymptotic(eps, n);
            let (w0, w2) = moment_estimate(&p, eps, k, gamma)?.rms_width();
            xs.push((n + 1) as f64);
            e0.push(rel(w0, exact));
            e2.push(rel(w2, exact));
        }
        let (s0, s2) = (loglog_slope(&xs, &e0), loglog_slope(&xs, &e2));
        let ok = (s0 + 2.0).abs() <= 0.4 && (s2 + 4.0).abs() <= 0.6;
        pass &= ok;
        parts.push(format!(
            "eps {eps}: {s0:.2}/{s2:.2}{}",
            if ok { "" } else { " (out)" }
        ));
    }
    Ok(outcome(
        pass,
        format!(
            "slopes order-0/order-2 (-2 +- 0.4 / -4 +- 0.6): {}",
            parts.join(", ")
        ),
    ))
}

fn quartic() -> Result<Outcome> {
    let p = Potential::quartic();
    let mut errs = Vec::new();
    for n in [4, 9] {
        let k = quartic_k_at_level(1.0, n);
        let exact = solve_eigen(&p, k, n, 1e-11)?.rms_width();
        let (eps1, gamma) = eps1_at_optimal_gamma(&p, k, n)?;
        errs.push(rel(
            moment_estimate(&p, eps1, k, gamma)?.rms_width().1,
            exact,
        ));
    }
    let mut closed = 0.0f64;
    for eps in [0.5, 1.0, 2.0] {
        let k = quartic_k_at_level(eps, 4);
        let gamma = choose_gamma(&p, eps)?;
        let m = normalized_moment(&p, eps, k, gamma, 2)?;
        let (c0, c2) = quartic_m2(eps, k);
        closed = closed
            .max(rel(m.order0, c0))
            .max(rel(m.order2.unwrap(), c2));
    }
    // "About 1e-5" is read as within a factor of two.
    let pass = (5e-6..=2e-5).contains(&errs[0]) && errs[1] <= 1e-6 && closed <= 1e-8;
    Ok(outcome(
        pass,
        format!(
            "order-2 rms err n=4 {:.2e} (in [5e-6, 2e-5]), n=9 {:.2e} (<= 1e-6); closed form vs quadrature {closed:.1e} (<= 1e-8)",
            errs[0], errs[1]
        ),
    ))
}

fn gamma_independence() -> Result<Outcome> {
    let fixtures = [
        (Potential::morse(), [-0.8, -0.5, -0.2]),
        (Potential::poschl_teller(), [-0.8, -0.5, -0.2]),
        (Potential::quartic(), [0.5, 1.0, 2.0]),
    ];
    let mut checked = 0;
    let mut misses = Vec::new();
    for (p, energies) in &fixtures {
        for &eps in energies {
            let g = choose_gamma(p, eps)?;
            for kernel in [Kernel::K0, Kernel::K1, Kernel::K2] {
                let s = gamma_spread(p, eps, &[g / 4.0, g, 4.0 * g], kernel)?;
                checked += 1;
                if !s.within(1e-8, 1e-12) {
                    misses.push(format!(
                        "{} eps {eps} {kernel:?} abs {:.1e} rel {:.1e}",
                        p.name(),
                        s.abs_spread,
                        s.rel_spread
                    ));
                }
            }
        }
    }
    Ok(outcome(
        misses.is_empty(),
        format!(
            "{}/{checked} spreads within 1e-8 relative or 1e-12 absolute{}",
            checked - misses.len(),
            if misses.is_empty() {
                String::new()
            } else {
                format!("; out: {}", misses.join(", "))
            }
        ),
    ))
}

fn exactness() -> Result<Outcome> {
    let h = Potential::harmonic();
    let k = 10.0;
    let (mut df, mut kern, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..4 {
        let eps = harmonic_exact(k, n);
        let oracle = solve_eigen(&h, k, n, 1e-12)?;
        for gamma in [0.5, 1.0, 2.0] {
            df = df.max(delta_f(&h, eps, gamma)?.abs());
            let a = orbit_averages(&h, eps, gamma)?;
            kern = kern.max(a.k0.abs()).max(a.k1.abs()).max(a.k2.abs());
            let m = normalized_moment(&h, eps, k, gamma, 2)?.order2.unwrap();
            m2 = m2
                .max((m - eps / 2.0).abs())
                .max((m - oracle.moment(2)).abs());
        }
    }
    let morse = Potential::morse();
    let (mut e0, mut mdf) = (0.0f64, 0.0f64);
    for n in 0..4 {
        let est = quantize(&morse, k, n, Order::Zero, 1.0)?;
        e0 = e0.max((est.eps0 - morse_exact(k, n).unwrap()).abs());
        mdf = mdf.max(delta_f(&morse, est.eps0, 1.0)?.abs());
    }
    let pass = df <= 1e-10 && kern <= 1e-10 && m2 <= 1e-8 && e0 <= 1e-10 && mdf <= 1e-6;
    Ok(outcome(
        pass,
        format!(
            "harmonic |dF| {df:.1e}, |<K>| {kern:.1e} (<= 1e-10), M2/M0 vs eps/2 and oracle {m2:.1e} (<= 1e-8); \
             Morse eps0 {e0:.1e} (<= 1e-10), |dF| {mdf:.1e} (<= 1e-6)"
        ),
    ))
}

fn delta_f_pt() -> Result<Outcome> {
    let p = Potential::poschl_teller();
    let mut worst = 0.0f64;
    for eps in [-0.8, -0.5, -0.2] {
        let g = choose_gamma(&p, eps)?;
        for gamma in [g / 4.0, g, 4.0 * g] {
            worst = worst.max((delta_f(&p, eps, gamma)? - PI / 4.0).abs());
        }
    }
    Ok(outcome(
        worst <= 1e-6,
        format!("max |dF - pi/4| {worst:.1e} (<= 1e-6)"),
    ))
}

/// Peak-to-valley-relative maximum error after optimal global phase.
fn field_error(w: &WaveField, reference: &[f64]) -> f64 {
    let norm_w = w.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let norm_r = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    let overlap: Complex64 = w
        .values
        .iter()
        .zip(reference)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let rotate = overlap / overlap.norm() / norm_w * norm_r;
    let hi = reference.iter().cloned().fold(f64::MIN, f64::max);
    let lo = reference.iter().cloned().fold(f64::MAX, f64::min);
    w.values
        .iter()
        .zip(reference)
        .map(|(a, b)| (a * rotate - b).norm())
        .fold(0.0, f64::max)
        / (hi - lo)
}

fn wavefield() -> Result<Outcome> {
    let h = Potential::harmonic();
    let k = 10.0;
    let eps = harmonic_exact(k, 0);
    let grid = default_grid(&h, eps, k, 1.0, 1024)?;
    let w = synthesize(&h, eps, k, 1.0, 0, &grid)?;
    let exact: Vec<f64> = grid.iter().map(|x| (-0.5 * k * x * x).exp()).collect();
    let ground = field_error(&w, &exact);

    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(KAPPA);
    let mut pass = ground <= 1e-6;
    let mut parts = Vec::new();
    for n in 0..=8 {
        let state = solve_eigen(&p, k, n, 1e-10)?.fine;
        let stride = (state.grid.len() / 3000).max(1);
        let grid: Vec<f64> = state.grid.iter().step_by(stride).cloned().collect();
        let reference: Vec<f64> = state.u.iter().step_by(stride).cloned().collect();
        let (eps1, gamma) = eps1_at_optimal_gamma(&p, k, n)?;
        let errs: Vec<Option<f64>> = (0..=2)
            .map(|order| {
                synthesize(&p, eps1, k, gamma, order, &grid)
                    .ok()
                    .map(|w| field_error(&w, &reference))
            })
            .collect();
        let ok = match (errs[0], errs[1], errs[2]) {
            (Some(a), Some(b), Some(c)) => a < 0.10 && b < a && c < b,
            _ => false,
        };
        pass &= ok;
        let show = |e: Option<f64>| e.map_or("none".to_string(), |e| format!("{e:.3e}"));
        parts.push(format!(
            "n{n} {}/{}/{}{}",
            show(errs[0]),
            show(errs[1]),
            show(errs[2]),
            if ok { "" } else { " (out)" }
        ));
    }
    Ok(outcome(
        pass,
        format!(
            "harmonic ground {ground:.1e} (<= 1e-6); PT orders 0/1/2 (< 0.10, decreasing): {}",
            parts.join(", ")
        ),
    ))
}

fn oracle_self_check() -> Result<Outcome> {
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(KAPPA);
    let opts = OracleOptions {
        points_per_wavelength: 40.0,
        ..Default::default()
    };
    let mut order = f64::INFINITY;
    for n in [0, 4, 8] {
        let seq = eigenvalue_sequence(&p, k, n, &opts, 3)?;
        let exact = pt_exact(k, n).unwrap();
        let (d1, d2) = ((seq[0].1 - exact).abs(), (seq[1].1 - exact).abs());
        let d3 = (seq[2].1 - exact).abs();
        order = order.min((d1 / d2).log2()).min((d2 / d3).log2());
    }
    let mut agree = 0.0f64;
    for n in 0..=8 {
        agree = agree.max((solve_eigen(&p, k, n, 1e-10)?.eps - pt_exact(k, n).unwrap()).abs());
    }
    Ok(outcome(
        order >= 3.5 && agree <= 1e-8,
        format!("observed order {order:.2} (>= 3.5); max |eps - exact| {agree:.1e} (<= 1e-8)"),
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("Poschl-Teller eigenvalues", eigenvalues),
        ("Poschl-Teller rms widths", rms_widths),
        ("convergence slopes", slopes),
        ("quartic widths and closed form", quartic),
        ("gamma independence", gamma_independence),
        ("exactness suite", exactness),
        ("Poschl-Teller dF", delta_f_pt),
        ("wavefield synthesis", wavefield),
        ("oracle self-check", oracle_self_check),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} | {} [{secs:.1} s]",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
