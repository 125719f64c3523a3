//! The classical orbit at energy `eps`, traversed with `X' = P` so that
//! `P' = -V'(X)/2` and `P^2 = eps - V(X)`.
//!
//! Starting at the right turning point the orbit runs clockwise in the
//! `(X, P)` plane and `L' = P X' = P^2` grows by the enclosed area each circuit.

use std::f64::consts::PI;

use crate::numerics::{periodic_antiderivative_real, Dopri5, InvSqrtWeight, QuadratureSpec};
use crate::potentials::{Potential, TurningPoints};
use crate::{Error, Result};

/// Phase-space area `2 int sqrt(eps - V) dx` of the orbit at `eps`.
pub fn action_area(p: &Potential, eps: f64) -> Result<f64> {
    let tp = p.turning_points(eps, None)?;
    action_area_between(p, &tp)
}

/// As [`action_area`] for already located turning points.
pub fn action_area_between(p: &Potential, tp: &TurningPoints) -> Result<f64> {
    let weight = InvSqrtWeight::new(p, *tp);
    let [v] = weight.integrate(
        |x| [tp.eps - p.value(x)],
        &QuadratureSpec::endpoint_invsqrt(),
    )?;
    Ok(2.0 * v)
}

/// `tau`-period of one circuit, `2 int dx / sqrt(eps - V)`.
pub fn period(p: &Potential, tp: &TurningPoints) -> Result<f64> {
    let weight = InvSqrtWeight::new(p, *tp);
    let [v] = weight.integrate(|_| [1.0], &QuadratureSpec::endpoint_invsqrt())?;
    Ok(2.0 * v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PscSample {
    pub tau: f64,
    pub x: f64,
    pub p: f64,
    pub l: f64,
}

/// One circuit of the orbit sampled at equispaced `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceCurve {
    pub eps: f64,
    pub chi: f64,
    pub tp: TurningPoints,
    /// `n_tau` samples starting at `(x2, 0)`; the closing point is not repeated.
    pub samples: Vec<PscSample>,
    pub period: f64,
    /// Gain in `L` over the circuit, equal to the enclosed area.
    pub area: f64,
}

impl PhaseSpaceCurve {
    /// Area from the samples by the periodic trapezoid rule on `P dX/dtau`.
    pub fn sampled_area(&self) -> f64 {
        let h = self.period / self.samples.len() as f64;
        self.samples.iter().map(|s| s.p * s.p).sum::<f64>() * h
    }
}

/// Integrates the orbit from `(x2, 0)` around one circuit.
pub fn psc_sample(p: &Potential, eps: f64, n_tau: usize) -> Result<PhaseSpaceCurve> {
    if n_tau < 64 {
        return Err(Error::InvalidInput(format!("n_tau = {n_tau} is below 64")));
    }
    let tp = p.turning_points(eps, None)?;
    let estimate = period(p, &tp)?;
    let rhs = |_t: f64, y: &[f64; 3]| {
        let d = p.derivs(y[0]);
        [y[1], -0.5 * d[1], y[1] * y[1]]
    };
    let mut times: Vec<f64> = (0..n_tau)
        .map(|j| estimate * j as f64 / n_tau as f64)
        .collect();
    times.push(estimate);
    let ode = Dopri5::new(1e-12, 1e-14);
    let states = ode.solve(rhs, 0.0, [tp.x2, 0.0, 0.0], &times)?;
    let end = states[n_tau];

    // The quadrature period is exact up to its tolerance; a Newton step on
    // P(T) = 0 absorbs what is left.
    let slope = -0.5 * p.derivs(end[0])[1];
    let shift = -end[1] / slope;
    let period = estimate + shift;
    let area = end[2] + end[1] * end[1] * shift;
    let closure = (end[0] - tp.x2).abs().max(end[1].abs());
    if !(closure <= 1e-7 * tp.width()) || !(shift.abs() <= 1e-6 * estimate) {
        return Err(Error::LoopNotClosed(format!(
            "orbit misses its start by {closure:e} after tau = {estimate}"
        )));
    }
    // Resample on the corrected period by uniform rescaling of tau; the
    // shift is far below the integrator tolerance so this only relabels.
    let samples = states[..n_tau]
        .iter()
        .enumerate()
        .map(|(j, y)| PscSample {
            tau: period * j as f64 / n_tau as f64,
            x: y[0],
            p: y[1],
            l: y[2],
        })
        .collect();
    Ok(PhaseSpaceCurve {
        eps,
        chi: 1.0,
        tp,
        samples,
        period,
        area,
    })
}

/// `tau`-derivatives along the orbit through `(x, p)`.
///
/// `x[j]` holds `d^j X / dtau^j` for `j = 0..=5`; the momentum derivatives
/// are `P^(j) = X^(j+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryDerivs {
    pub x: [f64; 6],
}

impl TrajectoryDerivs {
    /// `d^j X / dtau^j`, `j <= 5`.
    pub fn x(&self, j: usize) -> f64 {
        self.x[j]
    }

    /// `d^j P / dtau^j`, `j <= 4`.
    pub fn p(&self, j: usize) -> f64 {
        self.x[j + 1]
    }
}

/// Closed-form `tau`-derivatives of `X` and `P` at a phase-space point,
/// obtained by differentiating `P' = -V'(X)/2` with `X' = P`.
pub fn trajectory_derivs(pot: &Potential, x: f64, p: f64) -> TrajectoryDerivs {
    trajectory_from_derivs(&pot.derivs(x), x, p)
}

pub(crate) fn trajectory_from_derivs(v: &[f64; 6], x: f64, p: f64) -> TrajectoryDerivs {
    let (v1, v2, v3, v4) = (v[1], v[2], v[3], v[4]);
    let p2 = p * p;
    TrajectoryDerivs {
        x: [
            x,
            p,
            -0.5 * v1,
            -0.5 * v2 * p,
            -0.5 * (v3 * p2 - 0.5 * v2 * v1),
            -0.5 * (v4 * p2 * p - 1.5 * v1 * v3 * p - 0.5 * v2 * v2 * p),
        ],
    }
}

/// The orbit sampled at equispaced angles `theta_j = (j + 1/2) 2 pi / n`
/// of the parametrisation `x = c + h cos(theta)`, `p = -h sin(theta) rho(x)`
/// with `rho^2 = (eps - V) / ((x - x1)(x2 - x))`.
///
/// Every quantity is smooth and `2 pi`-periodic in `theta`, and
/// `dtau/dtheta = 1 / rho`, so periodic trapezoid sums converge spectrally
/// and no node sits on a turning point.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitNodes {
    pub tp: TurningPoints,
    pub theta: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub dtau_dtheta: Vec<f64>,
}

impl OrbitNodes {
    pub fn new(pot: &Potential, tp: TurningPoints, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidInput(format!(
                "need at least 4 orbit nodes, got {n}"
            )));
        }
        let weight = InvSqrtWeight::new(pot, tp);
        let h = 0.5 * tp.width();
        let mut out = Self {
            tp,
            theta: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
            p: Vec::with_capacity(n),
            dtau_dtheta: Vec::with_capacity(n),
        };
        for j in 0..n {
            let theta = (j as f64 + 0.5) * 2.0 * PI / n as f64;
            let (s, c) = (0.5 * theta).sin_cos();
            let (x, ratio, _) = weight.reduced(2.0 * h * c * c, 2.0 * h * s * s)?;
            let rho = ratio.sqrt();
            out.theta.push(theta);
            out.x.push(x);
            out.p.push(-h * theta.sin() * rho);
            out.dtau_dtheta.push(1.0 / rho);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Angle spacing `2 pi / n`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    /// `oint f dtau` for `f` sampled at the nodes.
    pub fn circuit_integral(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.dtau_dtheta)
            .map(|(v, w)| v * w)
            .sum::<f64>()
            * self.step()
    }

    /// `tau` at each node, measured from the right turning point.
    pub fn tau(&self) -> Vec<f64> {
        let theta0 = self.theta[0] - 0.5 * self.step();
        periodic_antiderivative_real(&self.dtau_dtheta, self.theta[0], theta0)
    }

    /// `L` at each node, zero at the right turning point.
    pub fn action(&self) -> Vec<f64> {
        let rate: Vec<f64> = self
            .p
            .iter()
            .zip(&self.dtau_dtheta)
            .map(|(p, w)| p * p * w)
            .collect();
        let theta0 = self.theta[0] - 0.5 * self.step();
        periodic_antiderivative_real(&rate, self.theta[0], theta0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn areas() {
        for eps in [0.3, 1.0, 4.0] {
            let a = action_area(&Potential::harmonic(), eps).unwrap();
            assert!((a - PI * eps).abs() < 1e-12 * eps);
        }
        for eps in [-0.8, -0.25] {
            let a = action_area(&Potential::poschl_teller(), eps).unwrap();
            assert!((a - 2.0 * PI * (1.0 - (-eps).sqrt())).abs() < 1e-11);
        }
        let a = action_area(&Potential::quartic(), 1.0).unwrap();
        assert!((a - 3.496077).abs() < 1e-6);
    }

    #[test]
    fn harmonic_circle() {
        let c = psc_sample(&Potential::harmonic(), 1.0, 128).unwrap();
        assert!((c.period - 2.0 * PI).abs() < 1e-9);
        for s in &c.samples {
            assert!((s.x - s.tau.cos()).abs() < 1e-8);
            assert!((s.p + s.tau.sin()).abs() < 1e-8);
        }
        assert!((c.area - PI).abs() < 1e-9);
        assert!((c.sampled_area() - PI).abs() < 1e-9);
    }

    #[test]
    fn derivs_at_simple_points() {
        let d = trajectory_derivs(&Potential::harmonic(), 0.0, 1.0);
        assert_eq!(&d.x[1..5], &[1.0, 0.0, -1.0, 0.0]);
        let pt = Potential::poschl_teller();
        let tp = pt.turning_points(-0.4, None).unwrap();
        let d = trajectory_derivs(&pt, tp.x2, 0.0);
        assert_eq!(d.p(0), 0.0);
        assert_eq!(d.x(2), -0.5 * pt.derivs(tp.x2)[1]);
        assert_eq!(trajectory_derivs(&pt, 0.0, 0.7).x(2), 0.0);
    }

    #[test]
    fn orbit_nodes_cover_the_circle() {
        let p = Potential::harmonic();
        let tp = p.turning_points(2.0, None).unwrap();
        let nodes = OrbitNodes::new(&p, tp, 32).unwrap();
        for j in 0..nodes.len() {
            // for the harmonic well theta is the time itself
            let t = nodes.theta[j];
            assert!((nodes.x[j] - 2f64.sqrt() * t.cos()).abs() < 1e-14);
            assert!((nodes.p[j] + 2f64.sqrt() * t.sin()).abs() < 1e-14);
            assert!((nodes.dtau_dtheta[j] - 1.0).abs() < 1e-12);
        }
        let tau = nodes.tau();
        assert!((tau[3] - nodes.theta[3]).abs() < 1e-13);
        let l = nodes.action();
        // L = int_0^t 2 sin^2 = t - sin(t) cos(t)
        let t = nodes.theta[5];
        assert!((l[5] - (t - t.sin() * t.cos())).abs() < 1e-13);
    }
}
