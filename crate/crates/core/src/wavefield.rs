//! Direct synthesis of a bound state as a superposition of Gaussians
//! centred on the classical orbit.
//!
//! Each element at orbit time `tau` has width `1/sqrt(k gamma)`, carries the
//! local momentum as its carrier frequency, and is weighted by
//! `A(tau) sqrt(Y'(tau)) exp(i k L(tau))` with `Y = gamma X + i P`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::classical::{action_area_between, OrbitNodes};
use crate::numerics::periodic_antiderivative;
use crate::potentials::Potential;
use crate::safe_terms::{a1_rate_from_derivs, check_gamma, delta_f, script_f_from_derivs};
use crate::{Error, Result};

/// Largest circuit phase mismatch accepted, in radians.
pub const MAX_PHASE_MISMATCH: f64 = 0.1;

/// Exponents below this contribute nothing in double precision.
const EXP_FLOOR: f64 = -745.0;

/// How the amplitude series is evaluated at orders 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeForm {
    /// `1 + A1/(ik) + A2/(ik)^2`, cut at the requested order.
    Truncated,
    /// `(1 - script_F / k^2) exp(-i A1 / k)`, which agrees with the
    /// truncated series to the same order and keeps the circuit phase exact.
    Resummed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub form: AmplitudeForm,
    /// Stop doubling the orbit nodes once the field changes by less than
    /// this fraction of its peak.
    pub tol: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            form: AmplitudeForm::Resummed,
            tol: 1e-6,
            min_nodes: 256,
            max_nodes: 1 << 17,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub order: u8,
    pub gamma: f64,
    pub eps: f64,
    pub k: f64,
}

impl WaveField {
    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Trapezoid `sum |U|^2 dx` over the grid.
    pub fn norm_squared(&self) -> f64 {
        trapezoid(&self.grid, self.values.iter().map(|v| v.norm_sqr()))
    }

    /// `M_m / M_0` of `|U|^2` on the grid.
    pub fn moment(&self, m: i32) -> f64 {
        let num = trapezoid(
            &self.grid,
            self.grid
                .iter()
                .zip(&self.values)
                .map(|(x, v)| x.powi(m) * v.norm_sqr()),
        );
        num / self.norm_squared()
    }
}

fn trapezoid<I: Iterator<Item = f64>>(grid: &[f64], values: I) -> f64 {
    let v: Vec<f64> = values.collect();
    if v.len() < 2 {
        return 0.0;
    }
    grid.windows(2)
        .zip(v.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum()
}

/// `npts` equispaced points covering the orbit plus six Gaussian widths on each side.
pub fn default_grid(p: &Potential, eps: f64, k: f64, gamma: f64, npts: usize) -> Result<Vec<f64>> {
    check_gamma(gamma)?;
    if npts < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    let tp = p.turning_points(eps, None)?;
    let margin = 6.0 / (k * gamma).sqrt();
    let (a, b) = (tp.x1 - margin, tp.x2 + margin);
    Ok((0..npts)
        .map(|i| a + (b - a) * i as f64 / (npts - 1) as f64)
        .collect())
}

/// One Gaussian element of the superposition.
#[derive(Debug, Clone, Copy)]
struct Element {
    x: f64,
    p: f64,
    weight: Complex64,
}

/// Circuit phase mismatch of the superposition at `eps`, wrapped to `(-pi, pi]`.
pub fn phase_mismatch(p: &Potential, eps: f64, k: f64, delta_f: Option<f64>) -> Result<f64> {
    let tp = p.turning_points(eps, None)?;
    let area = action_area_between(p, &tp)?;
    Ok(wrap(k * area - PI + delta_f.map_or(0.0, |d| d / k)))
}

fn wrap(phase: f64) -> f64 {
    let t = phase.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Superposition at `order` 0, 1 or 2 on `grid`, with default options.
pub fn synthesize(
    p: &Potential,
    eps: f64,
    k: f64,
    gamma: f64,
    order: u8,
    grid: &[f64],
) -> Result<WaveField> {
    synthesize_with(p, eps, k, gamma, order, grid, &SynthesisOptions::default())
}

pub fn synthesize_with(
    p: &Potential,
    eps: f64,
    k: f64,
    gamma: f64,
    order: u8,
    grid: &[f64],
    opts: &SynthesisOptions,
) -> Result<WaveField> {
    check_gamma(gamma)?;
    if order > 2 {
        return Err(Error::OrderTooHigh(order as usize));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidInput(format!(
            "k must be finite and positive, got {k}"
        )));
    }
    let delta_f = if order >= 1 {
        Some(delta_f(p, eps, gamma)?)
    } else {
        None
    };
    let mismatch = phase_mismatch(p, eps, k, delta_f)?;
    if mismatch.abs() > MAX_PHASE_MISMATCH {
        return Err(Error::PhaseMismatch(mismatch));
    }
    let mut n = opts.min_nodes.max(16);
    let mut previous: Option<Vec<Complex64>> = None;
    while n <= opts.max_nodes {
        let current = evaluate(p, eps, k, gamma, order, grid, opts.form, n)?;
        if let (Some(prev), Some(cur)) = (&previous, &current) {
            let peak = cur.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let change = cur
                .iter()
                .zip(prev)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            if peak == 0.0 {
                return Err(Error::ZeroField);
            }
            if change <= opts.tol * peak {
                return Ok(WaveField {
                    grid: grid.to_vec(),
                    values: current.unwrap(),
                    order,
                    gamma,
                    eps,
                    k,
                });
            }
        }
        previous = current;
        n *= 2;
    }
    Err(Error::NoConvergence(format!(
        "field synthesis did not settle with {} orbit nodes",
        n / 2
    )))
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    p: &Potential,
    eps: f64,
    k: f64,
    gamma: f64,
    order: u8,
    grid: &[f64],
    form: AmplitudeForm,
    n: usize,
) -> Result<Option<Vec<Complex64>>> {
    let Some(elements) = elements(p, eps, k, gamma, order, form, n)? else {
        return Ok(None);
    };
    if let Some(e) = elements
        .iter()
        .find(|e| !(e.weight.re.is_finite() && e.weight.im.is_finite()))
    {
        return Err(Error::NonFinite(format!("Gaussian weight at x = {}", e.x)));
    }
    let scale = 0.5 * k * gamma;
    Ok(Some(
        grid.par_iter()
            .map(|&x| {
                elements
                    .iter()
                    .filter_map(|e| {
                        let d = x - e.x;
                        let re = -scale * d * d;
                        (re > EXP_FLOOR).then(|| e.weight * Complex64::new(re, k * d * e.p).exp())
                    })
                    .sum()
            })
            .collect(),
    ))
}

fn elements(
    p: &Potential,
    eps: f64,
    k: f64,
    gamma: f64,
    order: u8,
    form: AmplitudeForm,
    n: usize,
) -> Result<Option<Vec<Element>>> {
    let tp = p.turning_points(eps, None)?;
    let nodes = OrbitNodes::new(p, tp, n)?;
    let derivs: Vec<[f64; 6]> = nodes.x.iter().map(|&x| p.derivs(x)).collect();
    let tau = nodes.tau();
    let action = nodes.action();
    let h = nodes.step();
    let period = nodes.dtau_dtheta.iter().sum::<f64>() * h;
    let area = nodes
        .p
        .iter()
        .zip(&nodes.dtau_dtheta)
        .map(|(p, w)| p * p * w)
        .sum::<f64>()
        * h;

    // sqrt(Y') on a continuous branch; Y' turns once clockwise per circuit.
    let mut roots = Vec::with_capacity(n);
    let mut arg = 0.0;
    for (j, (d, &mom)) in derivs.iter().zip(&nodes.p).enumerate() {
        let yp = Complex64::new(gamma * mom, -0.5 * d[1]);
        let a = yp.arg();
        if j == 0 {
            arg = a;
        } else {
            let step = wrap(a - arg);
            if step.abs() > 0.25 * PI {
                // Too sparse to follow the branch; the caller refines.
                return Ok(None);
            }
            arg += step;
        }
        roots.push(Complex64::from_polar(yp.norm().sqrt(), 0.5 * arg));
    }

    let a1: Vec<Complex64> = if order >= 1 {
        let rates: Vec<Complex64> = derivs
            .iter()
            .zip(&nodes.p)
            .zip(&nodes.dtau_dtheta)
            .map(|((d, &mom), w)| a1_rate_from_derivs(d, gamma, mom) * *w)
            .collect();
        periodic_antiderivative(&rates, nodes.theta[0], 0.0)
    } else {
        vec![Complex64::new(0.0, 0.0); n]
    };
    let drift = if order >= 1 {
        // Re A1 over the whole circuit, from the mean of its rate.
        let rate_sum: f64 = derivs
            .iter()
            .zip(&nodes.p)
            .zip(&nodes.dtau_dtheta)
            .map(|((d, &mom), w)| a1_rate_from_derivs(d, gamma, mom).re * w)
            .sum();
        rate_sum * h
    } else {
        0.0
    };
    // Phase gained per circuit on these nodes: k area from L, -pi from
    // sqrt(Y'), and the drift of Re A1 entering through exp(-i A1/k).
    let mismatch = wrap(k * area - PI - drift / k);

    let norm = (k / (2.0 * PI)).sqrt() * h;
    let ik = Complex64::new(0.0, k);
    Ok(Some(
        (0..n)
            .map(|j| {
                let amplitude = match (order, form) {
                    (0, _) => Complex64::new(1.0, 0.0),
                    (1, AmplitudeForm::Truncated) => 1.0 + a1[j] / ik,
                    (_, AmplitudeForm::Truncated) => {
                        let f = script_f_from_derivs(&derivs[j], gamma, nodes.x[j], nodes.p[j]);
                        1.0 + a1[j] / ik + (0.5 * a1[j] * a1[j] + f) / (ik * ik)
                    }
                    (1, AmplitudeForm::Resummed) => (a1[j] / ik).exp(),
                    (_, AmplitudeForm::Resummed) => {
                        let f = script_f_from_derivs(&derivs[j], gamma, nodes.x[j], nodes.p[j]);
                        (1.0 - f / (k * k)) * (a1[j] / ik).exp()
                    }
                };
                // Residual mismatch is spread evenly along the orbit.
                let phase = k * action[j] - mismatch * tau[j] / period;
                Element {
                    x: nodes.x[j],
                    p: nodes.p[j],
                    weight: norm
                        * nodes.dtau_dtheta[j]
                        * amplitude
                        * roots[j]
                        * Complex64::from_polar(1.0, phase),
                }
            })
            .collect(),
    ))
}

/// Unit trapezoid norm, with the largest-magnitude value made real and positive.
pub fn normalize_field(w: &WaveField) -> Result<WaveField> {
    let (imax, peak) = w
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.norm()))
        .fold((0, 0.0), |acc, (i, m)| if m > acc.1 { (i, m) } else { acc });
    let norm = w.norm_squared().sqrt();
    if !(peak > 0.0 && norm > 0.0) {
        return Err(Error::ZeroField);
    }
    let rotate = w.values[imax].conj() / peak / norm;
    Ok(WaveField {
        values: w.values.iter().map(|v| v * rotate).collect(),
        ..w.clone()
    })
}
