//! Normalised first and second moments of bound states with their `k^-2`
//! wave corrections, from orbit averages of correction kernels.
//!
//! The kernels depend on a Gaussian width parameter `gamma` but their orbit
//! averages do not; that independence is checked rather than assumed.

use crate::numerics::{InvSqrtWeight, QuadratureSpec};
use crate::potentials::{Potential, TurningPoints};
use crate::safe_terms::check_gamma;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    K0,
    K1,
    K2,
}

/// Arguments of the correction kernels at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelInput {
    pub x: f64,
    pub q: f64,
    pub gamma: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub v4: f64,
}

impl KernelInput {
    /// Kernel arguments at `x` on the orbit of energy `eps`.
    pub fn at(p: &Potential, eps: f64, gamma: f64, x: f64) -> Self {
        Self::with_kinetic(p, gamma, x, eps - p.value(x))
    }

    /// As [`at`](Self::at) with `eps - V(x)` supplied, which near a turning
    /// point is more accurate than the difference.
    pub fn with_kinetic(p: &Potential, gamma: f64, x: f64, kinetic: f64) -> Self {
        let d = p.derivs(x);
        Self {
            x,
            q: d[1] * d[1] + 4.0 * gamma * gamma * kinetic,
            gamma,
            v1: d[1],
            v2: d[2],
            v3: d[3],
            v4: d[4],
        }
    }
}

/// All three kernels at once, `[K0, K1, K2]`.
pub fn kernels(input: &KernelInput) -> Result<[f64; 3]> {
    let KernelInput {
        x,
        q,
        gamma,
        v1,
        v2,
        v3,
        v4,
    } = *input;
    if !(q > 0.0) {
        return Err(Error::NonPositiveQ(q));
    }
    let g2 = gamma * gamma;
    let q2 = q * q;
    let k0 = -v4 / (12.0 * q)
        - v1 * v3 * (g2 - 2.0 * v2) / (6.0 * q2)
        - v2 * (2.0 * g2 - v2) * (6.0 * g2 + v2) / (12.0 * q2)
        + v1 * v1 * v2 * (4.0 * g2 * g2 - v2 * v2) / (3.0 * q2 * q);
    let k1 = x * k0 - v3 / (6.0 * q) - v1 * v2 * (2.0 * g2 - 3.0 * v2) / (12.0 * q2);
    let k2 = 2.0 * x * k1 - x * x * k0 - g2 / (3.0 * q) + v1 * v1 * (2.0 * g2 - v2) / (3.0 * q2);
    Ok([k0, k1, k2])
}

pub fn kernel_value(kernel: Kernel, input: &KernelInput) -> Result<f64> {
    let [k0, k1, k2] = kernels(input)?;
    Ok(match kernel {
        Kernel::K0 => k0,
        Kernel::K1 => k1,
        Kernel::K2 => k2,
    })
}

/// `V'(x)^2 + 4 gamma^2 (eps - V(x))`.
pub fn q_bar(p: &Potential, eps: f64, gamma: f64, x: f64) -> f64 {
    let d = p.derivs(x);
    d[1] * d[1] + 4.0 * gamma * gamma * (eps - d[0])
}

/// Quadrature used for orbit averages; tighter than the crate default since
/// several averages are differences of nearly equal terms.
pub fn average_spec() -> QuadratureSpec {
    QuadratureSpec::endpoint_invsqrt().with_tolerances(1e-15, 1e-13)
}

/// Time average of `f(x)` over the classical orbit at `eps`.
pub fn classical_average<F: Fn(f64) -> f64>(p: &Potential, eps: f64, f: F) -> Result<f64> {
    let tp = p.turning_points(eps, None)?;
    let weight = InvSqrtWeight::new(p, tp);
    let [num, den] = weight.integrate(|x| [f(x), 1.0], &average_spec())?;
    Ok(num / den)
}

/// Orbit averages entering the moment corrections, at one `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitAverages {
    pub eps: f64,
    pub gamma: f64,
    pub x: f64,
    pub x2: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
}

impl OrbitAverages {
    pub fn kernel(&self, kernel: Kernel) -> f64 {
        match kernel {
            Kernel::K0 => self.k0,
            Kernel::K1 => self.k1,
            Kernel::K2 => self.k2,
        }
    }
}

pub fn orbit_averages(p: &Potential, eps: f64, gamma: f64) -> Result<OrbitAverages> {
    check_gamma(gamma)?;
    let tp = p.turning_points(eps, None)?;
    orbit_averages_between(p, &tp, gamma)
}

pub fn orbit_averages_between(
    p: &Potential,
    tp: &TurningPoints,
    gamma: f64,
) -> Result<OrbitAverages> {
    check_gamma(gamma)?;
    let eps = tp.eps;
    let weight = InvSqrtWeight::new(p, *tp);
    let failure = std::cell::Cell::new(None);
    let sums = weight.integrate_nodes(
        |node| match kernels(&KernelInput::with_kinetic(p, gamma, node.x, node.kinetic)) {
            Ok([k0, k1, k2]) => {
                let x = node.x;
                [1.0, x, x * x, k0, k1, k2]
            }
            Err(e) => {
                failure.set(Some(e));
                [f64::NAN; 6]
            }
        },
        &average_spec(),
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let [den, x, x2, k0, k1, k2] = sums?;
    Ok(OrbitAverages {
        eps,
        gamma,
        x: x / den,
        x2: x2 / den,
        k0: k0 / den,
        k1: k1 / den,
        k2: k2 / den,
    })
}

/// A normalised moment `M_m / M_0` without and with the `k^-2` correction.
/// The correction is only known for `m <= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedMoment {
    pub order0: f64,
    pub order2: Option<f64>,
}

pub fn normalized_moment(
    p: &Potential,
    eps: f64,
    k: f64,
    gamma: f64,
    m: u32,
) -> Result<NormalizedMoment> {
    match m {
        0 => Ok(NormalizedMoment {
            order0: 1.0,
            order2: Some(1.0),
        }),
        1 | 2 => {
            let e = moment_estimate(p, eps, k, gamma)?;
            let (o0, o2) = if m == 1 { e.m1_over_m0 } else { e.m2_over_m0 };
            Ok(NormalizedMoment {
                order0: o0,
                order2: Some(o2),
            })
        }
        _ => {
            let mf = m as i32;
            let order0 = classical_average(p, eps, |x| x.powi(mf))?;
            Ok(NormalizedMoment {
                order0,
                order2: None,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub eps: f64,
    pub k: f64,
    pub gamma: f64,
    pub avg_x: f64,
    pub avg_x2: f64,
    pub avg_k0: f64,
    pub avg_k1: f64,
    pub avg_k2: f64,
    /// `M1/M0` at orders 0 and 2.
    pub m1_over_m0: (f64, f64),
    /// `M2/M0` at orders 0 and 2.
    pub m2_over_m0: (f64, f64),
}

impl MomentEstimate {
    pub fn from_averages(a: &OrbitAverages, k: f64) -> Self {
        let k2 = k * k;
        Self {
            eps: a.eps,
            k,
            gamma: a.gamma,
            avg_x: a.x,
            avg_x2: a.x2,
            avg_k0: a.k0,
            avg_k1: a.k1,
            avg_k2: a.k2,
            m1_over_m0: (a.x, a.x + (a.k1 - a.x * a.k0) / k2),
            m2_over_m0: (a.x2, a.x2 + (a.k2 - a.x2 * a.k0) / k2),
        }
    }

    /// Root-mean-square width about the centroid, at orders 0 and 2.
    pub fn rms_width(&self) -> (f64, f64) {
        let w = |m1: f64, m2: f64| (m2 - m1 * m1).max(0.0).sqrt();
        (
            w(self.m1_over_m0.0, self.m2_over_m0.0),
            w(self.m1_over_m0.1, self.m2_over_m0.1),
        )
    }
}

pub fn moment_estimate(p: &Potential, eps: f64, k: f64, gamma: f64) -> Result<MomentEstimate> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidInput(format!(
            "k must be finite and positive, got {k}"
        )));
    }
    Ok(MomentEstimate::from_averages(
        &orbit_averages(p, eps, gamma)?,
        k,
    ))
}

const GAMMA_RANGE: (f64, f64) = (1e-2, 1e2);
const GAMMA_SCAN: usize = 49;
const UNIFORMITY_SAMPLES: usize = 257;

/// `(max Q - min Q) / mean Q` over Chebyshev-spaced points of `[x1, x2]`.
pub fn q_nonuniformity(p: &Potential, tp: &TurningPoints, gamma: f64) -> f64 {
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for j in 0..UNIFORMITY_SAMPLES {
        let t = std::f64::consts::PI * j as f64 / (UNIFORMITY_SAMPLES - 1) as f64;
        let x = tp.center() - 0.5 * tp.width() * t.cos();
        let q = q_bar(p, tp.eps, gamma, x);
        lo = lo.min(q);
        hi = hi.max(q);
        sum += q;
    }
    (hi - lo) / (sum / UNIFORMITY_SAMPLES as f64)
}

/// The `gamma` that makes `Q` most nearly constant across the orbit.
pub fn choose_gamma(p: &Potential, eps: f64) -> Result<f64> {
    let tp = p.turning_points(eps, None)?;
    let f = |lg: f64| q_nonuniformity(p, &tp, lg.exp());
    let (a, b) = (GAMMA_RANGE.0.ln(), GAMMA_RANGE.1.ln());
    let step = (b - a) / (GAMMA_SCAN - 1) as f64;
    let best = (0..GAMMA_SCAN)
        .map(|i| (i, f(a + i as f64 * step)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut lo = a + best.saturating_sub(1) as f64 * step;
    let mut hi = a + (best + 1).min(GAMMA_SCAN - 1) as f64 * step;
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > 1e-11 {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Values of one kernel average over several `gamma`, with their spread.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSpread {
    pub values: Vec<f64>,
    /// `max - min`.
    pub abs_spread: f64,
    /// `abs_spread / max |value|`, zero when every value is zero.
    pub rel_spread: f64,
}

impl GammaSpread {
    /// Whether the spread is within `rel` of the largest magnitude, or below `abs_floor`.
    pub fn within(&self, rel: f64, abs_floor: f64) -> bool {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.abs_spread <= (rel * scale).max(abs_floor)
    }
}

pub fn gamma_spread(
    p: &Potential,
    eps: f64,
    gammas: &[f64],
    kernel: Kernel,
) -> Result<GammaSpread> {
    if gammas.is_empty() {
        return Err(Error::InvalidInput("no gamma values given".into()));
    }
    let tp = p.turning_points(eps, None)?;
    let values = gammas
        .iter()
        .map(|&g| orbit_averages_between(p, &tp, g).map(|a| a.kernel(kernel)))
        .collect::<Result<Vec<_>>>()?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs());
    let abs_spread = hi - lo;
    let rel_spread = if scale > 0.0 { abs_spread / scale } else { 0.0 };
    Ok(GammaSpread {
        values,
        abs_spread,
        rel_spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{quartic_m2, QUARTIC_BETA};

    fn harmonic_input(gamma: f64, eps: f64, x: f64) -> KernelInput {
        KernelInput::at(&Potential::harmonic(), eps, gamma, x)
    }

    #[test]
    fn harmonic_kernels() {
        let eps = 1.7;
        for x in [-1.0, 0.0, 0.3] {
            let [k0, k1, k2] = kernels(&harmonic_input(1.0, eps, x)).unwrap();
            assert!(k0.abs() < 1e-15);
            assert!((k1 - x / (12.0 * eps * eps)).abs() < 1e-15);
            assert!((k2 - (x * x / (6.0 * eps * eps) - 1.0 / (12.0 * eps))).abs() < 1e-15);
        }
        let k0 = kernel_value(Kernel::K0, &harmonic_input(2.0, 1.0, 0.0)).unwrap();
        assert_eq!(k0, -0.1015625);
        let bad = KernelInput {
            q: 0.0,
            ..harmonic_input(1.0, 1.0, 0.0)
        };
        assert_eq!(kernels(&bad), Err(Error::NonPositiveQ(0.0)));
    }

    #[test]
    fn q_bar_values() {
        assert!((q_bar(&Potential::harmonic(), 0.8, 1.0, 0.3) - 3.2).abs() < 1e-15);
        assert_eq!(q_bar(&Potential::quartic(), 1.0, 1.0, 0.0), 4.0);
        assert_eq!(q_bar(&Potential::quartic(), 1.0, 1.0, 1.0), 16.0);
    }

    #[test]
    fn averages() {
        let h = Potential::harmonic();
        assert!((classical_average(&h, 1.0, |x| x * x).unwrap() - 0.5).abs() < 1e-14);
        assert!(
            classical_average(&Potential::poschl_teller(), -0.3, |x| x)
                .unwrap()
                .abs()
                < 1e-14
        );
        for gamma in [0.5, 1.0, 2.0] {
            let a = orbit_averages(&h, 1.3, gamma).unwrap();
            assert!(a.k0.abs() < 1e-12 && a.k1.abs() < 1e-12 && a.k2.abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_second_moment() {
        let p = Potential::quartic();
        let (eps, k) = (1.5, 7.0);
        let e = moment_estimate(&p, eps, k, 1.0).unwrap();
        let (o0, o2) = quartic_m2(eps, k);
        assert!((e.m2_over_m0.0 - o0).abs() < 1e-12);
        assert!((e.m2_over_m0.1 - o2).abs() < 1e-12);
        assert!((e.avg_k2 - 1.0 / (48.0 * eps)).abs() < 1e-12);
        assert!(e.m1_over_m0.0.abs() < 1e-14 && e.m1_over_m0.1.abs() < 1e-14);
        let n = normalized_moment(&p, 1.0, k, 1.0, 2).unwrap();
        assert!((n.order0 - 8.0 * QUARTIC_BETA * QUARTIC_BETA).abs() < 1e-12);
        assert_eq!(normalized_moment(&p, 1.0, k, 1.0, 4).unwrap().order2, None);
    }

    #[test]
    fn gamma_choice() {
        let g = choose_gamma(&Potential::harmonic(), 0.7).unwrap();
        assert!((g - 1.0).abs() < 1e-6, "{g}");
        let pt = Potential::poschl_teller();
        let g = choose_gamma(&pt, -0.5).unwrap();
        let tp = pt.turning_points(-0.5, None).unwrap();
        let best = q_nonuniformity(&pt, &tp, g);
        assert!(g > 1e-2 && g < 1e2);
        assert!(best < q_nonuniformity(&pt, &tp, g * 1.05));
        assert!(best < q_nonuniformity(&pt, &tp, g / 1.05));
    }

    #[test]
    fn spreads() {
        let s = gamma_spread(&Potential::harmonic(), 1.0, &[0.5, 1.0, 2.0], Kernel::K0).unwrap();
        assert!(s.values.iter().all(|v| v.abs() <= 1e-10));
        assert!(s.within(1e-8, 1e-12));
        let p = Potential::poschl_teller();
        let g = choose_gamma(&p, -0.5).unwrap();
        let s = gamma_spread(&p, -0.5, &[g / 4.0, g, 4.0 * g], Kernel::K2).unwrap();
        assert!(s.rel_spread <= 1e-8, "{s:?}");
    }
}
