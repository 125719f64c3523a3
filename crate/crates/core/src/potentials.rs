//! Analytic single-well potentials and their classical turning points.
//!
//! Every family carries hand-coded derivatives up to fifth order. The
//! correction kernels are differences of nearly cancelling terms built from
//! `V''''` and `V'''''`, so finite differences are never used here.

use std::fmt;
use std::str::FromStr;

use crate::numerics::find_root;
use crate::{Error, Result};

/// Highest derivative order every potential provides.
pub const DERIVATIVE_ORDER_MAX: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `exp(-2x) - 2 exp(-x)`
    Morse,
    /// `-sech^2 x`
    PoschlTeller,
    /// `x^4`
    Quartic,
    /// `x^2`
    Harmonic,
    /// `sum_i c_i x^i`
    Polynomial(Vec<f64>),
}

/// A potential function `V(x)` on an open evaluation domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    family: Family,
    domain: (f64, f64),
}

/// The two simple roots of `eps - V(x)` that bound the classically allowed
/// interval around the well minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    pub x1: f64,
    pub x2: f64,
    pub eps: f64,
}

impl TurningPoints {
    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x1 + self.x2)
    }
}

impl Potential {
    /// Builds one of the named families. `params` must be empty for the
    /// fixed builtins and holds the coefficients `c0, c1, ...` for
    /// `polynomial`.
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        let family = match name.trim().to_ascii_lowercase().as_str() {
            "morse" => Family::Morse,
            "poschl-teller" | "pöschl-teller" | "poschl_teller" | "pt" => Family::PoschlTeller,
            "quartic" => Family::Quartic,
            "harmonic" => Family::Harmonic,
            "polynomial" | "poly" => {
                if params.is_empty() {
                    return Err(Error::EmptyPolynomial);
                }
                if params.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput(
                        "non-finite polynomial coefficient".into(),
                    ));
                }
                let mut coeffs = params.to_vec();
                while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
                    coeffs.pop();
                }
                Family::Polynomial(coeffs)
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        if !matches!(family, Family::Polynomial(_)) && !params.is_empty() {
            return Err(Error::InvalidInput(format!("`{name}` takes no parameters")));
        }
        let domain = match family {
            Family::Morse => (-4.0, 40.0),
            _ => (-50.0, 50.0),
        };
        Ok(Self { family, domain })
    }

    pub fn morse() -> Self {
        Self::builtin("morse", &[]).unwrap()
    }

    pub fn poschl_teller() -> Self {
        Self::builtin("poschl-teller", &[]).unwrap()
    }

    pub fn quartic() -> Self {
        Self::builtin("quartic", &[]).unwrap()
    }

    pub fn harmonic() -> Self {
        Self::builtin("harmonic", &[]).unwrap()
    }

    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        Self::builtin("polynomial", coeffs)
    }

    /// Replaces the evaluation domain.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("bad domain ({lo}, {hi})")));
        }
        self.domain = (lo, hi);
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Morse => "morse",
            Family::PoschlTeller => "poschl-teller",
            Family::Quartic => "quartic",
            Family::Harmonic => "harmonic",
            Family::Polynomial(_) => "polynomial",
        }
    }

    pub fn params(&self) -> &[f64] {
        match &self.family {
            Family::Polynomial(c) => c,
            _ => &[],
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn derivative_order_max(&self) -> usize {
        DERIVATIVE_ORDER_MAX
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.domain.0 && x < self.domain.1
    }

    /// `V(x)` without the domain check.
    pub fn value(&self, x: f64) -> f64 {
        match &self.family {
            Family::Morse => {
                let e = (-x).exp();
                e * e - 2.0 * e
            }
            Family::PoschlTeller => -sech2(x),
            Family::Quartic => {
                let x2 = x * x;
                x2 * x2
            }
            Family::Harmonic => x * x,
            Family::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci),
        }
    }

    /// `V(a) - V(b)` to full relative precision, also when `a` and `b` are close.
    pub fn difference(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        match &self.family {
            Family::Morse => {
                let (ea, eb) = ((-a).exp(), (-b).exp());
                eb * (-d).exp_m1() * (ea + eb - 2.0)
            }
            Family::PoschlTeller => {
                let (ta, tb) = (a.tanh(), b.tanh());
                d.sinh() / (a.cosh() * b.cosh()) * (ta + tb)
            }
            Family::Quartic => d * (a + b) * (a * a + b * b),
            Family::Harmonic => d * (a + b),
            Family::Polynomial(c) => {
                // a^i - b^i = d h_i with h_i = a h_(i-1) + b^(i-1)
                let (mut h, mut bp, mut sum) = (0.0, 1.0, 0.0);
                for &ci in &c[1..] {
                    h = a * h + bp;
                    bp *= b;
                    sum += ci * h;
                }
                d * sum
            }
        }
    }

    /// `[V, V', ..., V^(5)]` at `x`, without the domain check.
    pub fn derivs(&self, x: f64) -> [f64; 6] {
        match &self.family {
            Family::Morse => {
                let b = (-x).exp();
                let a = b * b;
                let mut out = [0.0; 6];
                let (mut sa, mut sb) = (1.0, 1.0);
                for v in out.iter_mut() {
                    *v = sa * a - 2.0 * sb * b;
                    sa *= -2.0;
                    sb *= -1.0;
                }
                out
            }
            Family::PoschlTeller => {
                // d/dx [s q(t)] = s [q'(t)(1 - t^2) - 2t q(t)], s = sech^2, t = tanh
                let t = x.tanh();
                let s = sech2(x);
                let t2 = t * t;
                [
                    -s,
                    2.0 * t * s,
                    s * (2.0 - 6.0 * t2),
                    s * t * (-16.0 + 24.0 * t2),
                    s * (-16.0 + t2 * (120.0 - 120.0 * t2)),
                    s * t * (272.0 + t2 * (-960.0 + 720.0 * t2)),
                ]
            }
            Family::Quartic => {
                let x2 = x * x;
                [x2 * x2, 4.0 * x2 * x, 12.0 * x2, 24.0 * x, 24.0, 0.0]
            }
            Family::Harmonic => [x * x, 2.0 * x, 2.0, 0.0, 0.0, 0.0],
            Family::Polynomial(c) => {
                let mut out = [0.0; 6];
                for (order, v) in out.iter_mut().enumerate() {
                    *v = c
                        .iter()
                        .enumerate()
                        .skip(order)
                        .rev()
                        .fold(0.0, |acc, (i, &ci)| acc * x + ci * falling(i, order));
                }
                out
            }
        }
    }

    /// `[V, V', ..., V^(max_order)]` at `x`.
    pub fn eval_derivs(&self, x: f64, max_order: usize) -> Result<Vec<f64>> {
        if max_order > DERIVATIVE_ORDER_MAX {
            return Err(Error::OrderTooHigh(max_order));
        }
        if !self.contains(x) {
            return Err(Error::OutsideDomain {
                x,
                lo: self.domain.0,
                hi: self.domain.1,
            });
        }
        Ok(self.derivs(x)[..=max_order].to_vec())
    }

    /// True when `V(-x) = V(x)`.
    pub fn is_even(&self) -> bool {
        match &self.family {
            Family::Morse => false,
            Family::PoschlTeller | Family::Quartic | Family::Harmonic => {
                self.domain.0 == -self.domain.1
            }
            Family::Polynomial(c) => {
                self.domain.0 == -self.domain.1 && c.iter().skip(1).step_by(2).all(|&ci| ci == 0.0)
            }
        }
    }

    /// Energy above which the particle escapes the well; infinite for
    /// confining potentials.
    pub fn escape_energy(&self) -> f64 {
        match &self.family {
            Family::Morse | Family::PoschlTeller => 0.0,
            Family::Quartic | Family::Harmonic => f64::INFINITY,
            Family::Polynomial(c) => {
                let deg = c.len() - 1;
                if deg >= 2 && deg % 2 == 0 && c[deg] > 0.0 {
                    f64::INFINITY
                } else {
                    self.value(self.domain.0).min(self.value(self.domain.1))
                }
            }
        }
    }

    /// Location and value of the well minimum, searched inside `hint` when given.
    pub fn well_minimum(&self, hint: Option<(f64, f64)>) -> Result<(f64, f64)> {
        let (lo, hi) = self.search_interval(hint)?;
        if !matches!(self.family, Family::Polynomial(_)) && lo < 0.0 && hi > 0.0 {
            return Ok((0.0, self.value(0.0)));
        }
        const SAMPLES: usize = 4096;
        let step = (hi - lo) / SAMPLES as f64;
        let (mut best_i, mut best_v) = (1, f64::INFINITY);
        for i in 1..SAMPLES {
            let v = self.value(lo + i as f64 * step);
            if v < best_v {
                best_i = i;
                best_v = v;
            }
        }
        if best_i == 1 || best_i == SAMPLES - 1 {
            return Err(Error::NoSignChange(
                "no interior minimum inside the search interval".into(),
            ));
        }
        let a = lo + (best_i - 1) as f64 * step;
        let b = lo + (best_i + 1) as f64 * step;
        let slope = |x: f64| self.derivs(x)[1];
        let xm = if slope(a) < 0.0 && slope(b) > 0.0 {
            find_root(slope, (a, b), 1e-15 * (1.0 + a.abs().max(b.abs())))?
        } else {
            lo + best_i as f64 * step
        };
        Ok((xm, self.value(xm)))
    }

    /// Innermost pair of roots of `eps - V(x)` around the well minimum.
    pub fn turning_points(&self, eps: f64, hint: Option<(f64, f64)>) -> Result<TurningPoints> {
        if !eps.is_finite() {
            return Err(Error::NonFinite("energy".into()));
        }
        let (lo, hi) = self.search_interval(hint)?;
        let (xm, vmin) = self.well_minimum(hint)?;
        if eps <= vmin {
            return Err(Error::NoSignChange(format!(
                "eps = {eps} is not above the well minimum {vmin}"
            )));
        }
        let f = |x: f64| eps - self.value(x);
        let max_step = (hi - lo) / 512.0;
        let scan = |dir: f64, edge: f64| -> Result<(f64, f64)> {
            let mut h = 1e-7 * (hi - lo);
            let mut inner = xm;
            loop {
                let mut outer = xm + dir * ((inner - xm).abs() + h);
                if dir * (outer - edge) >= 0.0 {
                    outer = edge;
                }
                if f(outer) < 0.0 {
                    return Ok(if dir < 0.0 {
                        (outer, inner)
                    } else {
                        (inner, outer)
                    });
                }
                if outer == edge {
                    return Err(Error::NoSignChange(format!(
                        "eps = {eps} is above the well top inside ({lo}, {hi})"
                    )));
                }
                inner = outer;
                h = (2.0 * h).min(max_step);
            }
        };
        let left = scan(-1.0, lo)?;
        let right = scan(1.0, hi)?;
        let x1 = find_root(
            f,
            left,
            4.0 * f64::EPSILON * (1.0 + xm.abs() + left.0.abs()),
        )?;
        let x2 = find_root(
            f,
            right,
            4.0 * f64::EPSILON * (1.0 + xm.abs() + right.1.abs()),
        )?;
        let scale = eps - vmin;
        for x in [x1, x2] {
            if self.derivs(x)[1].abs() * (x2 - x1) <= 1e-6 * scale {
                return Err(Error::DegenerateTurningPoint(x));
            }
        }
        Ok(TurningPoints { x1, x2, eps })
    }

    fn search_interval(&self, hint: Option<(f64, f64)>) -> Result<(f64, f64)> {
        let (lo, hi) = self.domain;
        match hint {
            None => Ok((lo, hi)),
            Some((a, b)) if a < b => Ok((a.max(lo), b.min(hi))),
            Some((a, b)) => Err(Error::InvalidInput(format!(
                "bad bracketing interval ({a}, {b})"
            ))),
        }
    }
}

/// `i (i - 1) ... (i - order + 1)`
fn falling(i: usize, order: usize) -> f64 {
    (0..order).map(|j| (i - j) as f64).product()
}

fn sech2(x: f64) -> f64 {
    let c = x.abs().min(350.0).cosh();
    1.0 / (c * c)
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Polynomial(c) => {
                let list: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly({})", list.join(","))
            }
            _ => write!(f, "{}()", self.name()),
        }
    }
}

impl FromStr for Potential {
    type Err = Error;

    /// Parses `name(p1,p2,...)`, e.g. `poschl-teller()` or `poly(0,0,0,0,1)`.
    /// A bare name without parentheses is accepted for the builtins.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, args) = match spec.find('(') {
            Some(open) => {
                let close = spec
                    .rfind(')')
                    .filter(|&c| c > open && c == spec.len() - 1)
                    .ok_or_else(|| Error::BadSpec(spec.to_string()))?;
                (&spec[..open], &spec[open + 1..close])
            }
            None => (spec, ""),
        };
        if name.trim().is_empty() {
            return Err(Error::BadSpec(spec.to_string()));
        }
        let params = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::BadSpec(spec.to_string()))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::builtin(name, &params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_point_values() {
        let pt = Potential::poschl_teller();
        let d = pt.eval_derivs(0.0, 2).unwrap();
        assert_eq!(d, vec![-1.0, 0.0, 2.0]);
        assert_eq!(Potential::morse().value(0.0), -1.0);
        let q = Potential::quartic().eval_derivs(2.0, 5).unwrap();
        assert_eq!((q[0], q[4], q[5]), (16.0, 24.0, 0.0));
        assert_eq!(
            Potential::harmonic().eval_derivs(3.0, 2).unwrap(),
            vec![9.0, 6.0, 2.0]
        );
    }

    #[test]
    fn poschl_teller_tail_vanishes() {
        let d = Potential::poschl_teller().eval_derivs(20.0, 5).unwrap();
        assert!(d[0] < 0.0);
        for v in d {
            assert!(v.abs() <= 1e-15, "{v}");
        }
    }

    #[test]
    fn polynomial_matches_quartic() {
        let poly = Potential::polynomial(&[0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let quartic = Potential::quartic();
        let a = poly.eval_derivs(1.3, 5).unwrap();
        let b = quartic.eval_derivs(1.3, 5).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-14 * v.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(matches!(
            Potential::builtin("lennard-jones", &[]),
            Err(Error::UnknownFamily(_))
        ));
        assert_eq!(Potential::polynomial(&[]), Err(Error::EmptyPolynomial));
        let pt = Potential::poschl_teller();
        assert!(matches!(
            pt.eval_derivs(60.0, 1),
            Err(Error::OutsideDomain { .. })
        ));
        assert_eq!(pt.eval_derivs(0.0, 6), Err(Error::OrderTooHigh(6)));
    }

    #[test]
    fn parses_specs() {
        let p: Potential = "poschl-teller()".parse().unwrap();
        assert_eq!(p, Potential::poschl_teller());
        let p: Potential = "poly(0, 0, 0, 0, 1)".parse().unwrap();
        assert_eq!(p.params(), &[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(p.to_string(), "poly(0,0,0,0,1)");
        assert!("poly(0,x)".parse::<Potential>().is_err());
        assert!("morse(".parse::<Potential>().is_err());
        assert!("morse(1)".parse::<Potential>().is_err());
    }

    #[test]
    fn turning_point_fixtures() {
        let tp = Potential::quartic().turning_points(1.0, None).unwrap();
        assert!((tp.x1 + 1.0).abs() < 1e-14 && (tp.x2 - 1.0).abs() < 1e-14);

        let tp = Potential::poschl_teller()
            .turning_points(-0.25, None)
            .unwrap();
        let expect = 2f64.acosh();
        assert!((tp.x2 - expect).abs() < 1e-13 && (tp.x1 + expect).abs() < 1e-13);
        assert!((tp.x2 - 1.316958).abs() < 1e-6);

        let tp = Potential::morse().turning_points(-0.5, None).unwrap();
        let r = 0.5f64.sqrt();
        assert!((tp.x1 + (1.0 + r).ln()).abs() < 1e-13);
        assert!((tp.x2 + (1.0 - r).ln()).abs() < 1e-13);
        assert!((tp.x1 + 0.534800).abs() < 1e-6 && (tp.x2 - 1.227947).abs() < 1e-6);
    }

    #[test]
    fn turning_point_errors() {
        let pt = Potential::poschl_teller();
        assert!(matches!(
            pt.turning_points(-1.5, None),
            Err(Error::NoSignChange(_))
        ));
        assert!(matches!(
            pt.turning_points(0.1, None),
            Err(Error::NoSignChange(_))
        ));
        // V' = 2x(x - 1)^2: a flat inflection at x = 1 where V = 1/6
        let flat = Potential::polynomial(&[0.0, 0.0, 1.0, -4.0 / 3.0, 0.5]).unwrap();
        let res = flat.turning_points(1.0 / 6.0, None);
        assert!(
            matches!(res, Err(Error::DegenerateTurningPoint(_))),
            "{res:?}"
        );
    }

    #[test]
    fn polynomial_minimum_off_origin() {
        // (x - 1)^2 + 0.5
        let p = Potential::polynomial(&[1.5, -2.0, 1.0]).unwrap();
        let (xm, vm) = p.well_minimum(None).unwrap();
        assert!((xm - 1.0).abs() < 1e-12 && (vm - 0.5).abs() < 1e-14);
        let tp = p.turning_points(1.5, None).unwrap();
        assert!((tp.x1).abs() < 1e-12 && (tp.x2 - 2.0).abs() < 1e-12);
    }
}
