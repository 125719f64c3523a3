//! Figure datasets, selected with `figures --which`.
//!
//! | which | columns |
//! |-------|---------|
//! | 1 | `n,eps_exact,eps0,eps1,rel_err0,rel_err1` (Poschl-Teller, kappa = 8.9) |
//! | 4 | `n,rms_oracle,rms_0,rms_2,rel_err0,rel_err2` (Poschl-Teller, kappa = 8.9) |
//! | 5 | `eps,n,k,rms_oracle,rms_0,rms_2` (Poschl-Teller at fixed eps, k = k_n) |
//! | 6 | `eps,n,err_order0,err_order2` (same states as 5, absolute relative errors) |
//! | 8 | `n,eps_oracle,eps1,err_eps1,rms_oracle,rms_0,rms_2,err_order0,err_order2` (quartic, k = 10) |

use anyhow::{bail, Result};
use boundmoments::closed_form::{
    pt_exact, pt_k_at_level, pt_k_at_level_asymptotic, pt_k_from_kappa,
};
use boundmoments::moments::{choose_gamma, moment_estimate};
use boundmoments::oracle::solve_eigen;
use boundmoments::quantize::{quantize, Order};
use boundmoments::Potential;
use rayon::prelude::*;

use crate::run::rel_err;
use crate::svg::{Chart, Series};
use crate::table::{Cell, Table};

pub const FIXED_ENERGIES: [f64; 4] = [-0.8, -0.6, -0.4, -0.2];
const KAPPA: f64 = 8.9;
const QUARTIC_K: f64 = 10.0;

/// Order-1 eigenvalue at the gamma chosen for its order-0 energy.
fn eps1_auto(p: &Potential, k: f64, n: usize) -> Result<(f64, f64, f64)> {
    let eps0 = quantize(p, k, n, Order::Zero, 1.0)?.eps0;
    let gamma = choose_gamma(p, eps0)?;
    Ok((eps0, quantize(p, k, n, Order::One, gamma)?.eps1, gamma))
}

/// Least-squares slope of `ln |y|` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn collect<F>(levels: impl IntoParallelIterator<Item = usize>, f: F) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(usize) -> Result<Vec<Cell>> + Sync + Send,
{
    levels.into_par_iter().map(f).collect()
}

pub fn figure(which: u8, tol: f64) -> Result<(Table, Chart)> {
    match which {
        1 => figure1(tol),
        4 => figure4(tol),
        5 => figure5(tol),
        6 => figure6(tol),
        8 => figure8(tol),
        other => bail!("no dataset for figure {other}; choose 1, 4, 5, 6 or 8"),
    }
}

fn figure1(_tol: f64) -> Result<(Table, Chart)> {
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(KAPPA);
    let mut t = Table::new(&["n", "eps_exact", "eps0", "eps1", "rel_err0", "rel_err1"]);
    for row in collect(0..9usize, |n| {
        let exact = pt_exact(k, n).expect("kappa = 8.9 has nine levels");
        let (eps0, eps1, _) = eps1_auto(&p, k, n)?;
        Ok(vec![
            n.into(),
            exact.into(),
            eps0.into(),
            eps1.into(),
            rel_err(eps0, exact).into(),
            rel_err(eps1, exact).into(),
        ])
    })? {
        t.push(row);
    }
    let n = t.column("n");
    let chart = Chart::new(
        "Poschl-Teller kappa = 8.9 eigenvalues",
        "n",
        "|relative error|",
    )
    .log(false, true)
    .with(Series::new("order 0", &n, &t.column("rel_err0")))
    .with(Series::new("order 1", &n, &t.column("rel_err1")));
    Ok((t, chart))
}

fn figure4(tol: f64) -> Result<(Table, Chart)> {
    let p = Potential::poschl_teller();
    let k = pt_k_from_kappa(KAPPA);
    let mut t = Table::new(&["n", "rms_oracle", "rms_0", "rms_2", "rel_err0", "rel_err2"]);
    for row in collect(0..9usize, |n| {
        let exact = solve_eigen(&p, k, n, tol)?.rms_width();
        let (_, eps1, gamma) = eps1_auto(&p, k, n)?;
        let (w0, w2) = moment_estimate(&p, eps1, k, gamma)?.rms_width();
        Ok(vec![
            n.into(),
            exact.into(),
            w0.into(),
            w2.into(),
            rel_err(w0, exact).into(),
            rel_err(w2, exact).into(),
        ])
    })? {
        t.push(row);
    }
    let n = t.column("n");
    let chart = Chart::new(
        "Poschl-Teller kappa = 8.9 rms widths",
        "n",
        "|relative error|",
    )
    .log(false, true)
    .with(Series::new("order 0", &n, &t.column("rel_err0")))
    .with(Series::new("order 2", &n, &t.column("rel_err2")));
    Ok((t, chart))
}

/// `(eps, n, k_n, rms_oracle, rms_0, rms_2)`.
type FixedEnergyRow = (f64, usize, f64, f64, f64, f64);

/// Rows of the fixed-energy sweep.
fn fixed_energy_rows(tol: f64) -> Result<Vec<FixedEnergyRow>> {
    let p = Potential::poschl_teller();
    let jobs: Vec<(f64, usize)> = FIXED_ENERGIES
        .iter()
        .flat_map(|&e| (0..9usize).map(move |n| (e, n)))
        .collect();
    jobs.into_par_iter()
        .map(|(eps, n)| {
            // Exact k_n for the numerical states, its asymptotic form for the estimate.
            let k = pt_k_at_level(eps, n);
            let exact = solve_eigen(&p, k, n, tol)?.rms_width();
            let gamma = choose_gamma(&p, eps)?;
            let (w0, w2) =
                moment_estimate(&p, eps, pt_k_at_level_asymptotic(eps, n), gamma)?.rms_width();
            Ok((eps, n, k, exact, w0, w2))
        })
        .collect()
}

fn figure5(tol: f64) -> Result<(Table, Chart)> {
    let mut t = Table::new(&["eps", "n", "k", "rms_oracle", "rms_0", "rms_2"]);
    let rows = fixed_energy_rows(tol)?;
    for &(eps, n, k, exact, w0, w2) in &rows {
        t.push(vec![
            eps.into(),
            n.into(),
            k.into(),
            exact.into(),
            w0.into(),
            w2.into(),
        ]);
    }
    let mut chart =
        Chart::new("Poschl-Teller rms widths at fixed energy", "n", "rms width").log(false, true);
    for eps in FIXED_ENERGIES {
        let pick: Vec<_> = rows.iter().filter(|r| r.0 == eps).collect();
        let n: Vec<f64> = pick.iter().map(|r| r.1 as f64).collect();
        chart = chart
            .with(Series::new(
                format!("oracle eps = {eps}"),
                &n,
                &pick.iter().map(|r| r.3).collect::<Vec<_>>(),
            ))
            .with(Series::new(
                format!("order 2 eps = {eps}"),
                &n,
                &pick.iter().map(|r| r.5).collect::<Vec<_>>(),
            ));
    }
    Ok((t, chart))
}

fn figure6(tol: f64) -> Result<(Table, Chart)> {
    let mut t = Table::new(&["eps", "n", "err_order0", "err_order2"]);
    let rows = fixed_energy_rows(tol)?;
    for &(eps, n, _, exact, w0, w2) in &rows {
        t.push(vec![
            eps.into(),
            n.into(),
            rel_err(w0, exact).abs().into(),
            rel_err(w2, exact).abs().into(),
        ]);
    }
    let mut chart = Chart::new(
        "Poschl-Teller rms width errors",
        "n + 1",
        "|relative error|",
    )
    .log(true, true);
    for eps in FIXED_ENERGIES {
        let pick: Vec<_> = rows.iter().filter(|r| r.0 == eps).collect();
        let x: Vec<f64> = pick.iter().map(|r| (r.1 + 1) as f64).collect();
        let e0: Vec<f64> = pick.iter().map(|r| rel_err(r.4, r.3)).collect();
        let e2: Vec<f64> = pick.iter().map(|r| rel_err(r.5, r.3)).collect();
        chart = chart
            .with(Series::new(format!("order 0 eps = {eps}"), &x, &e0))
            .with(Series::new(format!("order 2 eps = {eps}"), &x, &e2));
    }
    Ok((t, chart))
}

/// Fitted slopes over `n = 2..8` for each fixed energy, from a figure 6 table.
pub fn figure6_slopes(t: &Table) -> Vec<(f64, f64, f64)> {
    let (eps, n) = (t.column("eps"), t.column("n"));
    let (e0, e2) = (t.column("err_order0"), t.column("err_order2"));
    FIXED_ENERGIES
        .iter()
        .map(|&target| {
            let idx: Vec<usize> = (0..eps.len())
                .filter(|&i| eps[i] == target && n[i] >= 2.0)
                .collect();
            let x: Vec<f64> = idx.iter().map(|&i| n[i] + 1.0).collect();
            let pick = |e: &[f64]| idx.iter().map(|&i| e[i]).collect::<Vec<f64>>();
            (
                target,
                loglog_slope(&x, &pick(&e0)),
                loglog_slope(&x, &pick(&e2)),
            )
        })
        .collect()
}

fn figure8(tol: f64) -> Result<(Table, Chart)> {
    let p = Potential::quartic();
    let k = QUARTIC_K;
    let mut t = Table::new(&[
        "n",
        "eps_oracle",
        "eps1",
        "err_eps1",
        "rms_oracle",
        "rms_0",
        "rms_2",
        "err_order0",
        "err_order2",
    ]);
    for row in collect(0..10usize, |n| {
        let oracle = solve_eigen(&p, k, n, tol)?;
        let exact = oracle.rms_width();
        let (_, eps1, gamma) = eps1_auto(&p, k, n)?;
        let (w0, w2) = moment_estimate(&p, eps1, k, gamma)?.rms_width();
        Ok(vec![
            n.into(),
            oracle.eps.into(),
            eps1.into(),
            rel_err(eps1, oracle.eps).abs().into(),
            exact.into(),
            w0.into(),
            w2.into(),
            rel_err(w0, exact).abs().into(),
            rel_err(w2, exact).abs().into(),
        ])
    })? {
        t.push(row);
    }
    let x: Vec<f64> = t.column("n").iter().map(|n| n + 1.0).collect();
    let chart = Chart::new("quartic oscillator", "n + 1", "|relative error|")
        .log(true, true)
        .with(Series::new(
            "eigenvalue, order 1",
            &x,
            &t.column("err_eps1"),
        ))
        .with(Series::new(
            "rms width, order 0",
            &x,
            &t.column("err_order0"),
        ))
        .with(Series::new(
            "rms width, order 2",
            &x,
            &t.column("err_order2"),
        ));
    Ok((t, chart))
}
