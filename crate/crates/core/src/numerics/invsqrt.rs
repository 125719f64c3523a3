use std::f64::consts::FRAC_PI_2;

use super::{GaussLegendre, QuadratureSpec};
use crate::potentials::{Potential, TurningPoints};
use crate::{Error, Result};

/// The weight `1/sqrt(eps - V(x))` on `[x1, x2]`, regularised by
/// `x = (x1 + x2)/2 + (x2 - x1)/2 sin(theta)`.
///
/// After the substitution `dx / sqrt(eps - V) = sqrt(r(x)) dtheta` with
/// `r = (x - x1)(x2 - x) / (eps - V)`, which is analytic and positive
/// between simple turning points.
#[derive(Debug, Clone)]
pub struct InvSqrtWeight<'a> {
    potential: &'a Potential,
    tp: TurningPoints,
}

/// One quadrature node: position and its share of `dx / sqrt(eps - V)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNode {
    pub x: f64,
    pub weight: f64,
    /// `eps - V(x)`, accurate to full relative precision near the turning points.
    pub kinetic: f64,
}

impl<'a> InvSqrtWeight<'a> {
    pub fn new(potential: &'a Potential, tp: TurningPoints) -> Self {
        Self { potential, tp }
    }

    pub fn turning_points(&self) -> TurningPoints {
        self.tp
    }

    pub fn potential(&self) -> &Potential {
        self.potential
    }

    /// Position for the given distances from the two turning points, the
    /// ratio `(eps - V(x)) / ((x - x1)(x2 - x))` and `eps - V(x)`.
    ///
    /// `eps - V` is taken as `V(xi) - V(x)` from the nearer turning point, so
    /// it keeps full relative precision right up to the ends.
    pub fn reduced(&self, from_left: f64, from_right: f64) -> Result<(f64, f64, f64)> {
        let TurningPoints { x1, x2, .. } = self.tp;
        let (x, kinetic) = if from_left <= from_right {
            let x = x1 + from_left;
            (x, self.potential.difference(x1, x))
        } else {
            let x = x2 - from_right;
            (x, self.potential.difference(x2, x))
        };
        let ratio = kinetic / ((x - x1) * (x2 - x));
        if !(ratio > 0.0) || !ratio.is_finite() {
            return Err(Error::InvalidWeight(x));
        }
        Ok((x, ratio, kinetic))
    }

    /// Node at angle `theta` in `[-pi/2, pi/2]` with weight `1/sqrt(r)`.
    pub fn sample(&self, theta: f64) -> Result<WeightedNode> {
        let phi = 0.5 * (theta + FRAC_PI_2);
        let h = 0.5 * self.tp.width();
        let (s, c) = phi.sin_cos();
        let (left, right) = (2.0 * h * s * s, 2.0 * h * c * c);
        let (x, ratio, kinetic) = self.reduced(left, right)?;
        Ok(WeightedNode {
            x,
            weight: ratio.sqrt().recip(),
            kinetic,
        })
    }

    /// Composite Gauss–Legendre nodes with `panels` panels on `[-pi/2, pi/2]`.
    pub fn nodes(&self, panels: usize) -> Result<Vec<WeightedNode>> {
        let TurningPoints { x1, x2, eps } = self.tp;
        for xi in [x1, x2] {
            if (self.potential.value(xi) - eps).abs() > 1e-8 * eps.abs().max(1.0) {
                return Err(Error::InvalidWeight(xi));
            }
        }
        let rule = GaussLegendre::panel_rule();
        let width = std::f64::consts::PI / panels as f64;
        let mut out = Vec::with_capacity(panels * rule.len());
        for j in 0..panels {
            let a = -FRAC_PI_2 + j as f64 * width;
            for (theta, w) in rule.mapped(a, a + width) {
                let node = self.sample(theta)?;
                out.push(WeightedNode {
                    weight: w * node.weight,
                    ..node
                });
            }
        }
        Ok(out)
    }

    /// Integrates several functions against the weight on one shared node
    /// set, doubling the panel count until every component settles.
    pub fn integrate<const N: usize, G>(&self, g: G, spec: &QuadratureSpec) -> Result<[f64; N]>
    where
        G: Fn(f64) -> [f64; N],
    {
        self.integrate_with_levels(g, spec).map(|(v, _)| v)
    }

    /// As [`integrate`](Self::integrate) with `g` seeing the whole node,
    /// for integrands that need `eps - V` without cancellation.
    pub fn integrate_nodes<const N: usize, G>(
        &self,
        g: G,
        spec: &QuadratureSpec,
    ) -> Result<[f64; N]>
    where
        G: Fn(&WeightedNode) -> [f64; N],
    {
        self.settle(&g, spec).map(|(v, _)| v)
    }

    /// As [`integrate`](Self::integrate), also returning the level reached.
    ///
    /// Convergence is judged against the integral of `|g|`, so components
    /// that cancel to nearly zero settle at roundoff rather than never.
    pub fn integrate_with_levels<const N: usize, G>(
        &self,
        g: G,
        spec: &QuadratureSpec,
    ) -> Result<([f64; N], u32)>
    where
        G: Fn(f64) -> [f64; N],
    {
        self.settle(&|node: &WeightedNode| g(node.x), spec)
    }

    fn settle<const N: usize, G>(&self, g: &G, spec: &QuadratureSpec) -> Result<([f64; N], u32)>
    where
        G: Fn(&WeightedNode) -> [f64; N],
    {
        spec.validate()?;
        let (mut previous, _) = self.sums_at(g, 0)?;
        for level in 1..=spec.max_levels {
            let (current, magnitude) = self.sums_at(g, level)?;
            let settled = previous
                .iter()
                .zip(&current)
                .zip(&magnitude)
                .all(|((a, b), m)| spec.accepts((a - b).abs(), m.max(b.abs())));
            if settled {
                return Ok((current, level));
            }
            previous = current;
        }
        Err(Error::NoConvergence(format!(
            "turning-point quadrature did not settle after {} doublings",
            spec.max_levels
        )))
    }

    /// Plain sum on `2^level` panels.
    pub fn sum_at<const N: usize, G>(&self, g: &G, level: u32) -> Result<[f64; N]>
    where
        G: Fn(f64) -> [f64; N],
    {
        self.sums_at(&|node: &WeightedNode| g(node.x), level)
            .map(|(v, _)| v)
    }

    /// Sums of `g` and of `|g|` on `2^level` panels.
    fn sums_at<const N: usize, G>(&self, g: &G, level: u32) -> Result<([f64; N], [f64; N])>
    where
        G: Fn(&WeightedNode) -> [f64; N],
    {
        // Compensated sums: several averages are small differences of large terms.
        let mut acc = [0.0; N];
        let mut carry = [0.0; N];
        let mut mag = [0.0; N];
        for node in self.nodes(1usize << level)? {
            let values = g(&node);
            for i in 0..N {
                let term = node.weight * values[i];
                let t = acc[i] + term;
                carry[i] += if acc[i].abs() >= term.abs() {
                    (acc[i] - t) + term
                } else {
                    (term - t) + acc[i]
                };
                acc[i] = t;
                mag[i] += term.abs();
            }
        }
        for i in 0..N {
            acc[i] += carry[i];
        }
        if acc.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("integrand between turning points".into()));
        }
        Ok((acc, mag))
    }
}

/// `int_{x1}^{x2} g(x) / sqrt(eps - V(x)) dx`.
pub fn integrate_invsqrt_weighted<G: Fn(f64) -> f64>(
    g: G,
    potential: &Potential,
    eps: f64,
    tp: &TurningPoints,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if tp.eps != eps {
        return Err(Error::InvalidInput(format!(
            "turning points belong to eps = {}, not {eps}",
            tp.eps
        )));
    }
    let weight = InvSqrtWeight::new(potential, *tp);
    weight.integrate(|x| [g(x)], spec).map(|[v]| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::endpoint_invsqrt()
    }

    #[test]
    fn arcsine_and_orbit_averages() {
        let p = Potential::harmonic();
        for eps in [0.01, 1.0, 7.5] {
            let tp = p.turning_points(eps, None).unwrap();
            let v = integrate_invsqrt_weighted(|_| 1.0, &p, eps, &tp, &spec()).unwrap();
            assert!((v - PI).abs() < 1e-13, "{eps}: {v}");
        }
        let tp = p.turning_points(1.0, None).unwrap();
        let v = integrate_invsqrt_weighted(|x| x * x, &p, 1.0, &tp, &spec()).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn poschl_teller_half_period() {
        let p = Potential::poschl_teller();
        for eps in [-0.9, -0.5, -0.1] {
            let tp = p.turning_points(eps, None).unwrap();
            let v = integrate_invsqrt_weighted(|_| 1.0, &p, eps, &tp, &spec()).unwrap();
            // period of the chi = -1/sqrt(-eps) closed form is 2 pi
            assert!((v * (-eps).sqrt() - PI).abs() < 1e-11, "{eps}: {v}");
        }
    }

    #[test]
    fn odd_integrand_vanishes() {
        let p = Potential::quartic();
        let tp = p.turning_points(2.0, None).unwrap();
        let v = integrate_invsqrt_weighted(|x| x.powi(3) + x, &p, 2.0, &tp, &spec()).unwrap();
        assert!(v.abs() <= 1e-12);
    }

    #[test]
    fn wrong_turning_points_are_rejected() {
        let p = Potential::harmonic();
        let bogus = TurningPoints {
            x1: -2.0,
            x2: 2.0,
            eps: 1.0,
        };
        let r = integrate_invsqrt_weighted(|_| 1.0, &p, 1.0, &bogus, &spec());
        assert!(matches!(r, Err(Error::InvalidWeight(_))));
    }
}
