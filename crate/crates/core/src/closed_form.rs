//! Closed-form results for the Pöschl–Teller, Morse, harmonic and quartic
//! wells, used as fixtures and by the figure datasets.

use std::f64::consts::PI;

/// `Gamma(1/4)`.
pub const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

/// `pi / Gamma(1/4)^2`, the constant of the quartic-well formulas.
pub const QUARTIC_BETA: f64 = PI / (GAMMA_QUARTER * GAMMA_QUARTER);

/// `k` for the Pöschl–Teller strength `kappa`, `k^2 = kappa (kappa + 1)`.
pub fn pt_k_from_kappa(kappa: f64) -> f64 {
    (kappa * (kappa + 1.0)).sqrt()
}

/// Inverse of [`pt_k_from_kappa`] on `kappa > 0`.
pub fn pt_kappa_from_k(k: f64) -> f64 {
    0.5 * ((1.0 + 4.0 * k * k).sqrt() - 1.0)
}

/// Exact Pöschl–Teller eigenvalue `-(kappa - n)^2 / k^2`, or `None` when
/// level `n` is not bound.
pub fn pt_exact(k: f64, n: usize) -> Option<f64> {
    let kappa = pt_kappa_from_k(k);
    let d = kappa - n as f64;
    (d > 0.0).then(|| -d * d / (k * k))
}

/// Lowest-order semiclassical Pöschl–Teller eigenvalue.
pub fn pt_eps0(k: f64, n: usize) -> f64 {
    let s = 1.0 - odd(n) / (2.0 * k);
    -s * s
}

/// Pöschl–Teller eigenvalue including the `delta_F = pi/4` refinement.
pub fn pt_eps1(k: f64, n: usize) -> f64 {
    let s = 1.0 - odd(n) / (2.0 * k) + 1.0 / (8.0 * k * k);
    -s * s
}

/// The `k` for which level `n` of the Pöschl–Teller well sits exactly at `eps`.
pub fn pt_k_at_level(eps: f64, n: usize) -> f64 {
    let m = odd(n);
    ((m * m - (1.0 + eps)).sqrt() + m * (-eps).sqrt()) / (2.0 * (1.0 + eps))
}

/// Large-`n` form of [`pt_k_at_level`] that also follows from the refined
/// quantization condition.
pub fn pt_k_at_level_asymptotic(eps: f64, n: usize) -> f64 {
    let m = odd(n);
    m / (2.0 * (1.0 - (-eps).sqrt())) - 1.0 / (4.0 * m)
}

/// Phase-space area of the Pöschl–Teller orbit, `2 pi (1 - sqrt(-eps))`.
pub fn pt_area(eps: f64) -> f64 {
    2.0 * PI * (1.0 - (-eps).sqrt())
}

/// Pöschl–Teller orbit at time `tau` from the right turning point,
/// returning `(X, P, L)` with `X' = P` and `L' = P^2`.
pub fn pt_orbit(eps: f64, tau: f64) -> (f64, f64, f64) {
    let w = (-eps).sqrt();
    let s = w * tau;
    let x = (((1.0 + eps) / -eps).sqrt() * s.cos()).asinh();
    let p = -(-eps * (1.0 + eps)).sqrt() * s.sin() / (1.0 - (1.0 + eps) * s.sin().powi(2)).sqrt();
    let l = -(w * s - (w * s.tan()).atan() - PI * (s / PI + 0.5).floor());
    (x, p, l)
}

/// Exact Morse eigenvalue `-(1 - (2n+1)/(2k))^2`, or `None` above the threshold.
pub fn morse_exact(k: f64, n: usize) -> Option<f64> {
    let s = 1.0 - odd(n) / (2.0 * k);
    (s > 0.0).then(|| -s * s)
}

/// Exact harmonic eigenvalue `(2n+1)/k`.
pub fn harmonic_exact(k: f64, n: usize) -> f64 {
    odd(n) / k
}

/// Quartic orbit area, `sqrt(2 pi) / (3 beta) eps^(3/4)`.
pub fn quartic_area(eps: f64) -> f64 {
    (2.0 * PI).sqrt() / (3.0 * QUARTIC_BETA) * eps.powf(0.75)
}

/// Refined quartic eigenvalue.
pub fn quartic_eps1(k: f64, n: usize) -> f64 {
    let m = odd(n);
    let inner = 1.0 + (1.0 + 4.0 / (3.0 * PI * m * m)).sqrt();
    ((2.0 * PI).sqrt() * 3.0 * QUARTIC_BETA * m / (4.0 * k) * inner).powf(4.0 / 3.0)
}

/// Quartic `M2/M0` without and with the `k^-2` correction.
pub fn quartic_m2(eps: f64, k: f64) -> (f64, f64) {
    let b2 = QUARTIC_BETA * QUARTIC_BETA;
    let lead = 8.0 * b2 * eps.sqrt();
    (lead, lead + (1.0 - 576.0 * b2 * b2) / (48.0 * eps * k * k))
}

/// The `k` at which quartic level `n` lies at `eps`, to the same order as [`quartic_eps1`].
pub fn quartic_k_at_level(eps: f64, n: usize) -> f64 {
    let m = odd(n);
    m * QUARTIC_BETA / (2.0 * PI).sqrt() * eps.powf(-0.75) * (3.0 * PI + 1.0 / (m * m))
}

fn odd(n: usize) -> f64 {
    (2 * n + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poschl_teller_values() {
        let k = pt_k_from_kappa(8.9);
        assert!((k * k - 88.11).abs() < 1e-12);
        assert!((pt_kappa_from_k(k) - 8.9).abs() < 1e-13);
        assert!((pt_exact(k, 0).unwrap() + 0.898990).abs() < 1e-6);
        assert!((pt_eps0(k, 0) + 0.896304).abs() < 1e-6);
        assert!((pt_eps1(k, 0) + 0.898992).abs() < 1e-6);
        assert!(pt_exact(k, 8).is_some() && pt_exact(k, 9).is_none());
    }

    #[test]
    fn level_k_inverts_exact_eigenvalue() {
        for eps in [-0.8, -0.2] {
            for n in [0, 3, 8] {
                let k = pt_k_at_level(eps, n);
                assert!((pt_exact(k, n).unwrap() - eps).abs() < 1e-13);
                let m = (2 * n + 1) as f64;
                assert!((pt_k_at_level_asymptotic(eps, n) - k).abs() < 1.0 / (m * m * m));
            }
        }
    }

    #[test]
    fn orbit_closes_and_conserves_energy() {
        let eps: f64 = -0.25;
        let period = 2.0 * PI / (-eps).sqrt();
        for j in 0..40 {
            let tau = period * j as f64 / 40.0;
            let (x, p, _) = pt_orbit(eps, tau);
            let v = -1.0 / x.cosh().powi(2);
            assert!((p * p + v - eps).abs() < 1e-13);
        }
        let (x, p, l) = pt_orbit(eps, period * (1.0 - 1e-12));
        assert!((x - 2f64.acosh()).abs() < 1e-6 && p.abs() < 1e-6);
        assert!((l - pt_area(eps)).abs() < 1e-6);
    }

    #[test]
    fn quartic_constants() {
        assert!((8.0 * QUARTIC_BETA * QUARTIC_BETA - 0.4569465810).abs() < 1e-10);
        let b4 = QUARTIC_BETA.powi(4);
        assert!(((1.0 - 576.0 * b4) / 48.0 + 0.0183167000).abs() < 1e-10);
        assert!((quartic_area(1.0) - 3.496077).abs() < 1e-6);
    }
}
