//! First and second amplitude corrections of the Gaussian superposition.
//!
//! Along the orbit, `A1/a0` grows at a rate that is the sum of a term with
//! a `P^-4` pole and the derivative of a periodic bracket with the same pole.
//! The two poles cancel; [`a1_rate`] evaluates the cancelled rational form
//! `N / (12 z^4)` with `z = 2 gamma P - i V'`, whose modulus squared is
//! `V'^2 + 4 gamma^2 P^2 > 0` on a non-degenerate orbit.

use num_complex::Complex64;

use crate::classical::{trajectory_from_derivs, OrbitNodes};
use crate::potentials::{Potential, TurningPoints};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Allowed `|P^2 - (eps - V)|`, relative to `max(1, |eps|)`.
const ON_SHELL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafeParams {
    pub gamma: f64,
    pub a0: f64,
    /// Integration constant of `A1`; every reported observable is free of it.
    pub f1: Complex64,
    /// Integration constant of the second correction.
    pub f2: Complex64,
}

impl SafeParams {
    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            gamma,
            a0: 1.0,
            f1: Complex64::new(0.0, 0.0),
            f2: Complex64::new(0.0, 0.0),
        })
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "gamma must be finite and positive, got {gamma}"
        )))
    }
}

/// Amplitude corrections at one point of the orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionSample {
    pub x: f64,
    pub p: f64,
    pub a1_over_a0: Complex64,
    pub script_f: Complex64,
    pub a2_over_a0: Complex64,
}

impl CorrectionSample {
    /// Builds the sample with `A2/a0 = (A1/a0)^2 / 2 + script_F`.
    pub fn compose(x: f64, p: f64, a1_over_a0: Complex64, script_f: Complex64) -> Self {
        Self {
            x,
            p,
            a1_over_a0,
            script_f,
            a2_over_a0: 0.5 * a1_over_a0 * a1_over_a0 + script_f,
        }
    }
}

fn check_on_shell(pot: &Potential, eps: f64, x: f64, mom: f64) -> Result<[f64; 6]> {
    let v = pot.derivs(x);
    let residual = mom * mom - (eps - v[0]);
    if !(residual.abs() <= ON_SHELL_TOL * eps.abs().max(1.0)) {
        return Err(Error::EnergyConstraint {
            x,
            p: mom,
            residual,
        });
    }
    Ok(v)
}

/// `d(A1/a0)/dtau` at the on-shell point `(x, mom)`.
pub fn a1_rate(pot: &Potential, eps: f64, gamma: f64, x: f64, mom: f64) -> Result<Complex64> {
    check_gamma(gamma)?;
    let v = check_on_shell(pot, eps, x, mom)?;
    Ok(a1_rate_from_derivs(&v, gamma, mom))
}

pub(crate) fn a1_rate_from_derivs(v: &[f64; 6], gamma: f64, p: f64) -> Complex64 {
    let (v1, v2, v3, v4) = (v[1], v[2], v[3], v[4]);
    let g2 = gamma * gamma;
    let g4 = g2 * g2;
    let p2 = p * p;
    let v1s = v1 * v1;
    let re = 2.0 * v1s * v1 * v3 - 3.0 * v1s * v2 * v2 + 21.0 * v1s * v2 * g2 - 30.0 * v1s * g4
        + 12.0 * v4 * g2 * p2 * p2
        + p2 * (-3.0 * v1s * v4 + 16.0 * v1 * v2 * v3 - 15.0 * v2 * v2 * v2 + 42.0 * v2 * v2 * g2
            - 24.0 * v2 * g4);
    let im = p2 * p * (-12.0 * v1 * v4 * gamma + 32.0 * v2 * v3 * gamma - 24.0 * v3 * g2 * gamma)
        + p * (-2.0 * v1s * v3 * gamma + 18.0 * v1 * v2 * v2 * gamma - 36.0 * v1 * v2 * g2 * gamma);
    let z = Complex64::new(2.0 * gamma * p, -v1);
    let z2 = z * z;
    Complex64::new(re, im) / (12.0 * z2 * z2)
}

/// `script_F`, the part of `A2/a0` beyond `(A1/a0)^2 / 2`, with `f2 = 0`.
pub fn script_f(pot: &Potential, eps: f64, gamma: f64, x: f64, mom: f64) -> Result<Complex64> {
    check_gamma(gamma)?;
    let v = check_on_shell(pot, eps, x, mom)?;
    Ok(script_f_from_derivs(&v, gamma, x, mom))
}

pub(crate) fn script_f_from_derivs(v: &[f64; 6], gamma: f64, x: f64, p: f64) -> Complex64 {
    let d = trajectory_from_derivs(v, x, p);
    let y = |j: usize| Complex64::new(gamma * d.x(j), d.x(j + 1));
    let (y1, y2, y3) = (y(1), y(2), y(3));
    let (v1, v2, v3, v4, v5) = (v[1], v[2], v[3], v[4], v[5]);
    let c = 2.0 * gamma * gamma - v2;
    let y1_2 = y1 * y1;
    let y1_3 = y1_2 * y1;
    let y1_4 = y1_2 * y1_2;
    let t0 = c * c * (5.0 * y2 * y2 - 2.0 * y1 * y3) / (64.0 * y1_3 * y1_3);
    let t1 = (c * (v1 * y1 + 5.0 * p * y2) - I * (9.0 * y2 * y2 - 4.0 * y1 * y3)) * v3
        / (96.0 * y1_4 * y1);
    let t2 = (2.0 * y1_2 + (gamma * y1 - 7.0 * I * y2) * p) * v4 / (96.0 * y1_4);
    let t3 = I * p * p * v5 / (96.0 * y1_3);
    t0 + t1 - t2 - t3
}

/// Smallest orbit node count tried by [`delta_f`].
const DELTA_F_START: usize = 64;
const DELTA_F_MAX: usize = 1 << 16;

/// Real change of `A1/a0` over one counterclockwise circuit.
pub fn delta_f(pot: &Potential, eps: f64, gamma: f64) -> Result<f64> {
    let tp = pot.turning_points(eps, None)?;
    delta_f_between(pot, &tp, gamma)
}

/// As [`delta_f`] for already located turning points.
pub fn delta_f_between(pot: &Potential, tp: &TurningPoints, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let mut n = DELTA_F_START;
    let (mut previous, _) = circuit_sum(pot, tp, gamma, n)?;
    while n < DELTA_F_MAX {
        n *= 2;
        let (current, magnitude) = circuit_sum(pot, tp, gamma, n)?;
        // The integrand is large near shallow turning points and cancels
        // over the circuit, so roundoff scales with the integral of |rate|.
        if (current - previous).abs() <= 1e-12 + 1e-13 * magnitude {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::NoConvergence(format!(
        "delta_F at eps = {} did not settle",
        tp.eps
    )))
}

/// `-Re oint rate dtau` on `n` orbit nodes, and `oint |Re rate| dtau`.
fn circuit_sum(pot: &Potential, tp: &TurningPoints, gamma: f64, n: usize) -> Result<(f64, f64)> {
    let nodes = OrbitNodes::new(pot, *tp, n)?;
    let rates: Vec<f64> = nodes
        .x
        .iter()
        .zip(&nodes.p)
        .map(|(&x, &p)| a1_rate_from_derivs(&pot.derivs(x), gamma, p).re)
        .collect();
    let total = -nodes.circuit_integral(&rates);
    let magnitude = nodes.circuit_integral(&rates.iter().map(|r| r.abs()).collect::<Vec<_>>());
    if !total.is_finite() {
        return Err(Error::NonFinite("delta_F integrand".into()));
    }
    Ok((total, magnitude))
}
