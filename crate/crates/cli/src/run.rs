use anyhow::{bail, Result};
use boundmoments::moments::moment_estimate;
use boundmoments::oracle::solve_eigen;
use boundmoments::quantize::{quantize, Order};
use boundmoments::wavefield::{default_grid, normalize_field, synthesize};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::svg::{Chart, Series};
use crate::table::{Cell, Table};

pub const EIGEN_HEADER: [&str; 7] = [
    "n",
    "k",
    "eps0",
    "eps1",
    "eps_oracle",
    "rel_err0",
    "rel_err1",
];
pub const MOMENTS_HEADER: [&str; 13] = [
    "n",
    "k",
    "gamma",
    "eps_used",
    "m1_0",
    "m1_2",
    "m2_0",
    "m2_2",
    "rms_0",
    "rms_2",
    "rms_oracle",
    "rel_err0",
    "rel_err2",
];
pub const WAVEFIELD_HEADER: [&str; 4] = ["x", "re_u", "im_u", "abs_u"];

/// `(estimate - reference) / |reference|`.
pub fn rel_err(estimate: f64, reference: f64) -> f64 {
    (estimate - reference) / reference.abs()
}

pub fn eigen(cfg: &RunConfig) -> Result<(Table, Chart)> {
    if cfg.order > 1 {
        bail!("eigenvalues are available at order 0 or 1");
    }
    let p = &cfg.potential;
    let rows = cfg
        .levels
        .clone()
        .into_par_iter()
        .map(|n| -> Result<Vec<Cell>> {
            let eps0 = quantize(p, cfg.k, n, Order::Zero, 1.0)?.eps0;
            let eps1 = if cfg.order == 1 {
                let gamma = cfg.gamma.single(p, eps0)?;
                quantize(p, cfg.k, n, Order::One, gamma)?.eps1
            } else {
                eps0
            };
            let exact = solve_eigen(p, cfg.k, n, cfg.tol)?.eps;
            Ok(vec![
                n.into(),
                cfg.k.into(),
                eps0.into(),
                eps1.into(),
                exact.into(),
                rel_err(eps0, exact).into(),
                rel_err(eps1, exact).into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&EIGEN_HEADER);
    rows.into_iter().for_each(|r| table.push(r));
    let n = table.column("n");
    let chart = Chart::new(
        &format!("eigenvalue errors, {} k = {}", p, cfg.k),
        "n",
        "|relative error|",
    )
    .log(false, true)
    .with(Series::new("order 0", &n, &table.column("rel_err0")))
    .with(Series::new("order 1", &n, &table.column("rel_err1")));
    Ok((table, chart))
}

pub fn moments(cfg: &RunConfig) -> Result<(Table, Chart)> {
    let p = &cfg.potential;
    let rows = cfg
        .levels
        .clone()
        .into_par_iter()
        .map(|n| -> Result<Vec<Vec<Cell>>> {
            let eps0 = quantize(p, cfg.k, n, Order::Zero, 1.0)?.eps0;
            let exact = solve_eigen(p, cfg.k, n, cfg.tol)?.rms_width();
            cfg.gamma
                .values(p, eps0)?
                .into_iter()
                .map(|gamma| {
                    let eps = if cfg.order >= 1 {
                        quantize(p, cfg.k, n, Order::One, gamma)?.eps1
                    } else {
                        eps0
                    };
                    let m = moment_estimate(p, eps, cfg.k, gamma)?;
                    let (rms0, rms2) = m.rms_width();
                    Ok(vec![
                        n.into(),
                        cfg.k.into(),
                        gamma.into(),
                        eps.into(),
                        m.m1_over_m0.0.into(),
                        m.m1_over_m0.1.into(),
                        m.m2_over_m0.0.into(),
                        m.m2_over_m0.1.into(),
                        rms0.into(),
                        rms2.into(),
                        exact.into(),
                        rel_err(rms0, exact).into(),
                        rel_err(rms2, exact).into(),
                    ])
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&MOMENTS_HEADER);
    rows.into_iter().flatten().for_each(|r| table.push(r));
    let n = table.column("n");
    let chart = Chart::new(
        &format!("rms width errors, {} k = {}", p, cfg.k),
        "n",
        "|relative error|",
    )
    .log(false, true)
    .with(Series::new("order 0", &n, &table.column("rel_err0")))
    .with(Series::new("order 2", &n, &table.column("rel_err2")));
    Ok((table, chart))
}

pub fn wavefield(cfg: &RunConfig) -> Result<(Table, Chart)> {
    if cfg.levels.start() != cfg.levels.end() {
        bail!("wavefield takes a single level, got {:?}", cfg.levels);
    }
    let n = *cfg.levels.start();
    let p = &cfg.potential;
    let eps0 = quantize(p, cfg.k, n, Order::Zero, 1.0)?.eps0;
    let gamma = cfg.gamma.single(p, eps0)?;
    let eps = quantize(p, cfg.k, n, Order::One, gamma)?.eps1;
    let grid = default_grid(p, eps, cfg.k, gamma, cfg.points)?;
    let field = normalize_field(&synthesize(p, eps, cfg.k, gamma, cfg.order, &grid)?)?;
    let mut table = Table::new(&WAVEFIELD_HEADER);
    for (x, u) in field.grid.iter().zip(&field.values) {
        table.push(vec![(*x).into(), u.re.into(), u.im.into(), u.norm().into()]);
    }
    let x = table.column("x");
    let chart = Chart::new(&format!("{} n = {n}, order {}", p, cfg.order), "x", "U(x)")
        .with(Series::new("Re U", &x, &table.column("re_u")))
        .with(Series::new("|U|", &x, &table.column("abs_u")));
    Ok((table, chart))
}
