//! The invariant suite behind `boundmoments verify`.

use std::f64::consts::PI;

use anyhow::Result;
use boundmoments::classical::action_area;
use boundmoments::closed_form::{
    harmonic_exact, morse_exact, pt_area, pt_eps0, pt_exact, pt_k_from_kappa, quartic_area,
    quartic_k_at_level, quartic_m2,
};
use boundmoments::moments::{
    choose_gamma, gamma_spread, normalized_moment, orbit_averages, Kernel,
};
use boundmoments::oracle::solve_eigen;
use boundmoments::quantize::{quantize, Order};
use boundmoments::safe_terms::delta_f;
use boundmoments::wavefield::{default_grid, normalize_field, synthesize};
use boundmoments::Potential;
use rayon::prelude::*;

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        pass: worst <= tol,
        detail: format!("{worst:.2e} (<= {tol:.0e})"),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn turning_points() -> Result<Check> {
    let mut worst = 0.0f64;
    for (p, eps) in [
        (Potential::poschl_teller(), -0.5),
        (Potential::morse(), -0.3),
        (Potential::quartic(), 1.5),
        (Potential::polynomial(&[0.0, 0.0, 0.5, 0.1, 0.05])?, 0.4),
    ] {
        let tp = p.turning_points(eps, None)?;
        worst = worst
            .max((p.value(tp.x1) - eps).abs())
            .max((p.value(tp.x2) - eps).abs());
    }
    Ok(check("turning points lie on the energy", worst, 1e-12))
}

fn areas() -> Result<Check> {
    let pt = Potential::poschl_teller();
    let quartic = Potential::quartic();
    let mut worst = 0.0f64;
    for eps in [-0.8, -0.5, -0.2] {
        worst = worst.max(rel(action_area(&pt, eps)?, pt_area(eps)));
    }
    for eps in [0.5, 1.0, 2.0] {
        worst = worst.max(rel(action_area(&quartic, eps)?, quartic_area(eps)));
    }
    Ok(check("orbit areas match closed forms", worst, 1e-10))
}

fn delta_f_values() -> Result<Vec<Check>> {
    let h = Potential::harmonic();
    let pt = Potential::poschl_teller();
    let morse = Potential::morse();
    let (mut dh, mut dpt, mut dm) = (0.0f64, 0.0f64, 0.0f64);
    for gamma in [0.5, 1.0, 2.0] {
        for eps in [0.3, 1.0] {
            dh = dh.max(delta_f(&h, eps, gamma)?.abs());
        }
        for eps in [-0.8, -0.5, -0.2] {
            dpt = dpt.max((delta_f(&pt, eps, gamma)? - PI / 4.0).abs());
            dm = dm.max(delta_f(&morse, eps, gamma)?.abs());
        }
    }
    Ok(vec![
        check("harmonic dF vanishes", dh, 1e-10),
        check("Poschl-Teller dF is pi/4", dpt, 1e-6),
        check("Morse dF vanishes", dm, 1e-6),
    ])
}

fn quantization() -> Result<Vec<Check>> {
    let k = 10.0;
    let (h, morse) = (Potential::harmonic(), Potential::morse());
    let (mut dh, mut dm) = (0.0f64, 0.0f64);
    for n in 0..4 {
        dh = dh.max((quantize(&h, k, n, Order::One, 1.0)?.eps1 - harmonic_exact(k, n)).abs());
        dm = dm.max(
            (quantize(&morse, k, n, Order::Zero, 1.0)?.eps0 - morse_exact(k, n).unwrap()).abs(),
        );
    }
    let pt = Potential::poschl_teller();
    let kp = pt_k_from_kappa(8.9);
    let dp = max_of(
        (0..9)
            .map(|n| {
                quantize(&pt, kp, n, Order::Zero, 1.0).map(|e| (e.eps0 - pt_eps0(kp, n)).abs())
            })
            .collect::<boundmoments::Result<Vec<_>>>()?,
    );
    Ok(vec![
        check("harmonic levels exact at order 1", dh, 1e-10),
        check("Morse levels exact at order 0", dm, 1e-10),
        check("Poschl-Teller order-0 closed form", dp, 1e-10),
    ])
}

fn kernels() -> Result<Vec<Check>> {
    let h = Potential::harmonic();
    let mut zero = 0.0f64;
    for eps in [0.3, 1.0] {
        for gamma in [0.5, 1.0, 2.0] {
            let a = orbit_averages(&h, eps, gamma)?;
            zero = zero.max(a.k0.abs()).max(a.k1.abs()).max(a.k2.abs());
        }
    }
    // Near the Morse threshold <K0> is a small difference of large terms and
    // carries about 1e-10 of rounding, hence the looser floor.
    let fixtures = [
        (Potential::morse(), [-0.8, -0.5, -0.2]),
        (Potential::poschl_teller(), [-0.8, -0.5, -0.2]),
        (Potential::quartic(), [0.5, 1.0, 2.0]),
    ];
    let mut misses = 0;
    let mut worst = 0.0f64;
    for (p, energies) in &fixtures {
        for &eps in energies {
            let g = choose_gamma(p, eps)?;
            for kernel in [Kernel::K0, Kernel::K1, Kernel::K2] {
                let s = gamma_spread(p, eps, &[g / 4.0, g, 4.0 * g], kernel)?;
                worst = worst.max(s.abs_spread);
                if !s.within(1e-8, 1e-9) {
                    misses += 1;
                }
            }
        }
    }
    Ok(vec![
        check("harmonic kernel averages vanish", zero, 1e-10),
        Check {
            name: "kernel averages independent of gamma",
            pass: misses == 0,
            detail: format!(
                "{misses}/27 outside 1e-8 relative or 1e-9 absolute, largest absolute {worst:.1e}"
            ),
        },
    ])
}

fn moments() -> Result<Vec<Check>> {
    let h = Potential::harmonic();
    let k = 10.0;
    let mut dh = 0.0f64;
    for n in 0..3 {
        let eps = harmonic_exact(k, n);
        for gamma in [0.5, 2.0] {
            dh = dh
                .max((normalized_moment(&h, eps, k, gamma, 2)?.order2.unwrap() - eps / 2.0).abs());
        }
    }
    let q = Potential::quartic();
    let mut dq = 0.0f64;
    for eps in [0.5, 1.0, 2.0] {
        let k = quartic_k_at_level(eps, 4);
        let m = normalized_moment(&q, eps, k, choose_gamma(&q, eps)?, 2)?;
        let (c0, c2) = quartic_m2(eps, k);
        dq = dq.max(rel(m.order0, c0)).max(rel(m.order2.unwrap(), c2));
    }
    Ok(vec![
        check("harmonic M2/M0 = eps/2", dh, 1e-8),
        check("quartic M2/M0 closed form", dq, 1e-8),
    ])
}

fn wavefield() -> Result<Check> {
    let h = Potential::harmonic();
    let k = 10.0;
    let eps = harmonic_exact(k, 0);
    let grid = default_grid(&h, eps, k, 1.0, 401)?;
    let w = normalize_field(&synthesize(&h, eps, k, 1.0, 0, &grid)?)?;
    let exact: Vec<f64> = grid
        .iter()
        .map(|x| (k / PI).powf(0.25) * (-0.5 * k * x * x).exp())
        .collect();
    let worst = max_of(w.values.iter().zip(&exact).map(|(u, e)| (u - e).norm())) / w.peak();
    Ok(check("harmonic ground state synthesis", worst, 1e-6))
}

fn oracle() -> Result<Check> {
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(8.9);
    let errs = (0..9usize)
        .into_par_iter()
        .map(|n| Ok((solve_eigen(&p, k, n, 1e-10)?.eps - pt_exact(k, n).unwrap()).abs()))
        .collect::<Result<Vec<_>>>()?;
    Ok(check(
        "Numerov oracle matches exact levels",
        max_of(errs),
        1e-8,
    ))
}

/// Runs every check; an error inside a check is reported as its failure.
pub fn run_all() -> Vec<Check> {
    let single = |name: &'static str, r: Result<Check>| vec![r.unwrap_or_else(|e| failed(name, e))];
    let many =
        |name: &'static str, r: Result<Vec<Check>>| r.unwrap_or_else(|e| vec![failed(name, e)]);
    [
        single("turning points", turning_points()),
        single("areas", areas()),
        many("dF", delta_f_values()),
        many("quantization", quantization()),
        many("kernels", kernels()),
        many("moments", moments()),
        single("wavefield", wavefield()),
        single("oracle", oracle()),
    ]
    .into_iter()
    .flatten()
    .collect()
}

fn failed(name: &'static str, e: anyhow::Error) -> Check {
    Check {
        name,
        pass: false,
        detail: format!("error: {e:#}"),
    }
}
