use crate::{Error, Result};

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Embedded Runge–Kutta 5(4) integrator with step-size control.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` and returns the state at every
    /// time in `outputs`, which must be nondecreasing and start at or after `t0`.
    /// Steps are shortened to land exactly on each output time.
    pub fn solve<const N: usize, F>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        outputs: &[f64],
    ) -> Result<Vec<[f64; N]>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
            return Err(Error::InvalidInput(
                "output times must be sorted and after t0".into(),
            ));
        }
        let mut out = Vec::with_capacity(outputs.len());
        let mut t = t0;
        let mut y = y0;
        let span = outputs.last().map_or(0.0, |&t1| t1 - t0);
        let mut h = (span * 1e-3).max(1e-8);
        let mut steps = 0usize;
        let mut k1 = f(t, &y);
        for &target in outputs {
            while t < target {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::NoConvergence("ODE step budget exhausted".into()));
                }
                let last = h >= target - t;
                let step = if last { target - t } else { h };
                let (y_new, k_new, err) = self.step(&f, t, &y, &k1, step);
                if !err.is_finite() {
                    h *= 0.25;
                    if h < 1e-14 * (1.0 + t.abs()) {
                        return Err(Error::NonFinite("ODE right-hand side".into()));
                    }
                    continue;
                }
                if err <= 1.0 {
                    t = if last { target } else { t + step };
                    y = y_new;
                    k1 = k_new;
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if err <= 1.0 && last {
                    // keep the free-running step size rather than the clipped one
                    h = h.max(step * factor);
                } else {
                    h = step * factor;
                }
                if h < 1e-14 * (1.0 + t.abs()) {
                    return Err(Error::NoConvergence("ODE step size underflow".into()));
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    fn step<const N: usize, F>(
        &self,
        f: &F,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N], f64)
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut k = [[0.0; N]; 7];
        k[0] = *k1;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y_new = *y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut high = 0.0;
            let mut low = 0.0;
            for s in 0..7 {
                high += B[s] * k[s][i];
                low += B_LOW[s] * k[s][i];
            }
            y_new[i] += h * high;
            let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h * (high - low)).abs() / scale);
        }
        (y_new, k[6], err)
    }
}
