//! Quadrature, root bracketing and ODE stepping shared by every other module.

mod adaptive;
mod gauss;
mod invsqrt;
mod ode;
mod periodic;
mod roots;

pub use adaptive::{integrate_regular, Estimate};
pub use gauss::GaussLegendre;
pub use invsqrt::{integrate_invsqrt_weighted, InvSqrtWeight, WeightedNode};
pub use ode::Dopri5;
pub use periodic::{periodic_antiderivative, periodic_antiderivative_real};
pub use roots::find_root;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Adaptive Gauss–Kronrod subdivision for smooth integrands.
    RegularAdaptive,
    /// Sine substitution between turning points, composite Gauss–Legendre in the angle.
    EndpointInvSqrt,
    /// Equispaced nodes on a closed loop.
    PeriodicTrapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth (regular) or number of node doublings.
    pub max_levels: u32,
    pub scheme: Scheme,
}

impl QuadratureSpec {
    pub fn new(scheme: Scheme) -> Self {
        let max_levels = match scheme {
            Scheme::RegularAdaptive => 40,
            Scheme::EndpointInvSqrt => 12,
            Scheme::PeriodicTrapezoid => 14,
        };
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_levels,
            scheme,
        }
    }

    pub fn regular() -> Self {
        Self::new(Scheme::RegularAdaptive)
    }

    pub fn endpoint_invsqrt() -> Self {
        Self::new(Scheme::EndpointInvSqrt)
    }

    pub fn periodic() -> Self {
        Self::new(Scheme::PeriodicTrapezoid)
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidInput(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_levels < 4 {
            return Err(Error::InvalidInput("max_levels must be at least 4".into()));
        }
        Ok(())
    }

    pub(crate) fn accepts(&self, delta: f64, value: f64) -> bool {
        delta <= self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::regular()
    }
}
