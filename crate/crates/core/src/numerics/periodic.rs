use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Antiderivative of a smooth `2 pi`-periodic function sampled at
/// `theta_j = theta0 + 2 pi j / n`, normalised to vanish at `theta_ref`.
///
/// The result is `c0 (theta - theta_ref)` plus a periodic part obtained by
/// spectral integration, so it is exact for band-limited input.
pub fn periodic_antiderivative(
    samples: &[Complex64],
    theta0: f64,
    theta_ref: f64,
) -> Vec<Complex64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut spec = samples.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let scale = 1.0 / n as f64;
    let mean = spec[0] * scale;
    // Coefficients relative to theta - theta0 (DFT is taken on the shifted grid).
    let mut coeff = vec![Complex64::new(0.0, 0.0); n];
    let mut offset = Complex64::new(0.0, 0.0);
    let shift = theta_ref - theta0;
    for (m, c) in spec.iter().enumerate().skip(1) {
        let freq = signed_frequency(m, n);
        if freq == 0 {
            continue;
        }
        let f = freq as f64;
        let g = c * scale / Complex64::new(0.0, f);
        coeff[m] = g;
        offset += g * Complex64::from_polar(1.0, f * shift);
    }
    planner.plan_fft_inverse(n).process(&mut coeff);
    (0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64;
            mean * (theta - shift) + coeff[j] - offset
        })
        .collect()
}

/// Real-valued version of [`periodic_antiderivative`].
pub fn periodic_antiderivative_real(samples: &[f64], theta0: f64, theta_ref: f64) -> Vec<f64> {
    let complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    periodic_antiderivative(&complex, theta0, theta_ref)
        .into_iter()
        .map(|c| c.re)
        .collect()
}

/// Signed frequency of DFT bin `m`; the Nyquist bin maps to zero.
fn signed_frequency(m: usize, n: usize) -> i64 {
    if 2 * m == n {
        0
    } else if 2 * m < n {
        m as i64
    } else {
        m as i64 - n as i64
    }
}
