//! Eigenvalue estimates from the quantization of the orbit area.
//!
//! Order 0 solves `k area(eps) = (2n+1) pi`; order 1 solves
//! `k area(eps) = (2n+1) pi - delta_F(eps) / k`, iterating on `delta_F`.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::classical::action_area_between;
use crate::numerics::find_root;
use crate::potentials::Potential;
use crate::safe_terms::{check_gamma, delta_f_between};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate {
    pub n: usize,
    pub k: f64,
    pub eps0: f64,
    /// Equal to `eps0` for an order-0 request.
    pub eps1: f64,
    /// Zero for an order-0 request.
    pub delta_f_used: f64,
    pub gamma_used: f64,
}

/// Solver for one potential at one `k`; caches the energy range.
#[derive(Debug, Clone)]
pub struct Quantizer<'a> {
    potential: &'a Potential,
    k: f64,
    vmin: f64,
    top: Option<f64>,
}

const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX: usize = 60;

impl<'a> Quantizer<'a> {
    pub fn new(potential: &'a Potential, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidInput(format!(
                "k must be finite and positive, got {k}"
            )));
        }
        let (_, vmin) = potential.well_minimum(None)?;
        let escape = potential.escape_energy();
        Ok(Self {
            potential,
            k,
            vmin,
            top: escape.is_finite().then_some(escape),
        })
    }

    /// `k area(eps)`, with zero at and below the well bottom.
    pub fn phase(&self, eps: f64) -> Result<f64> {
        if eps <= self.vmin {
            return Ok(0.0);
        }
        let tp = self.potential.turning_points(eps, None)?;
        Ok(self.k * action_area_between(self.potential, &tp)?)
    }

    /// Highest energy at which the area can be evaluated, and the phase there.
    fn ceiling(&self, cap: Option<f64>) -> Result<(f64, f64)> {
        match (self.top, cap) {
            (top, Some(c)) if top.is_none_or(|t| c < t) => Ok((c, self.phase(c)?)),
            (Some(top), _) => {
                // Approach the escape energy from below until turning points exist.
                let scale = top - self.vmin;
                let mut gap = 1e-12 * scale;
                loop {
                    match self.phase(top - gap) {
                        Ok(v) => return Ok((top - gap, v)),
                        Err(_) if gap < 1e-3 * scale => gap *= 10.0,
                        Err(err) => return Err(err),
                    }
                }
            }
            (None, _) => Err(Error::InvalidInput(
                "confining potential: an energy ceiling is required".into(),
            )),
        }
    }

    /// Energy at which the phase equals `target`.
    fn solve_phase(&self, n: usize, target: f64) -> Result<f64> {
        let (lo, hi) = self.bracket(n, target)?;
        let failure = RefCell::new(None);
        let f = |eps: f64| match self.phase(eps) {
            Ok(v) => v - target,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let scale = (hi - self.vmin).abs().max(hi.abs()).max(1e-300);
        let root = find_root(f, (lo, hi), 2.0 * f64::EPSILON * scale);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        root
    }

    fn bracket(&self, n: usize, target: f64) -> Result<(f64, f64)> {
        if self.top.is_some() {
            let (hi, at_top) = self.ceiling(None)?;
            if at_top <= target {
                return Err(Error::NoBoundState(n));
            }
            return Ok((self.vmin, hi));
        }
        // Confining: grow the ceiling until it encloses the target.
        let mut step = 1.0f64;
        loop {
            let hi = self.vmin + step;
            match self.phase(hi) {
                Ok(v) if v > target => return Ok((self.vmin, hi)),
                Ok(_) => step *= 2.0,
                Err(_) => return Err(Error::NoBoundState(n)),
            }
            if step > 1e300 {
                return Err(Error::NoBoundState(n));
            }
        }
    }

    /// Order-0 estimate of level `n`.
    pub fn eps0(&self, n: usize) -> Result<f64> {
        self.solve_phase(n, odd(n) * PI)
    }

    /// Order-1 estimate of level `n`, starting from `start`, with the
    /// `delta_F` of the converged energy.
    pub fn eps1_from(&self, n: usize, start: f64, gamma: f64) -> Result<(f64, f64)> {
        let mut eps = start;
        for _ in 0..FIXED_POINT_MAX {
            let tp = self.potential.turning_points(eps, None)?;
            let df = delta_f_between(self.potential, &tp, gamma)?;
            let next = self.solve_phase(n, odd(n) * PI - df / self.k)?;
            let change = (next - eps).abs();
            eps = next;
            if change < FIXED_POINT_TOL * eps.abs().max(1.0) {
                return Ok((eps, df));
            }
        }
        Err(Error::NoConvergence(format!(
            "order-1 fixed point for n = {n}"
        )))
    }
}

/// Eigenvalue estimate of level `n` at the requested order.
pub fn quantize(
    p: &Potential,
    k: f64,
    n: usize,
    order: Order,
    gamma: f64,
) -> Result<EigenEstimate> {
    check_gamma(gamma)?;
    let q = Quantizer::new(p, k)?;
    let eps0 = q.eps0(n)?;
    let (eps1, delta_f_used) = match order {
        Order::Zero => (eps0, 0.0),
        Order::One => q.eps1_from(n, eps0, gamma)?,
    };
    Ok(EigenEstimate {
        n,
        k,
        eps0,
        eps1,
        delta_f_used,
        gamma_used: gamma,
    })
}

/// Number of levels whose order-0 energy lies below the escape energy, or
/// below `ceiling` when one is given. Confining potentials need a ceiling.
pub fn count_bound_states(p: &Potential, k: f64, ceiling: Option<f64>) -> Result<usize> {
    let q = Quantizer::new(p, k)?;
    let (_, phase) = q.ceiling(ceiling)?;
    // (2n+1) pi < phase
    let m = phase / PI;
    if m <= 1.0 {
        return Ok(0);
    }
    let mut count = ((m - 1.0) / 2.0).ceil() as usize;
    while count > 0 && odd(count - 1) >= m {
        count -= 1;
    }
    Ok(count)
}

fn odd(n: usize) -> f64 {
    (2 * n + 1) as f64
}
