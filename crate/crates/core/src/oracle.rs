//! Independent ground truth: Numerov shooting for `U'' = k^2 (V - eps) U`.
//!
//! The eigenvalue is located by Sturm node counting of the left-shot solution
//! followed by Brent refinement of its value at the far end of the truncated
//! domain. The eigenfunction is assembled from shots inward from both ends.
//! Two step sizes give a Richardson-extrapolated eigenvalue and moments.

use crate::numerics::find_root;
use crate::potentials::Potential;
use crate::quantize::Quantizer;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Grid points per shortest local wavelength (or decay length).
    pub points_per_wavelength: f64,
    /// WKB exponent `k int sqrt(V - eps) dx` required beyond each turning point.
    pub decay: f64,
    /// Target accuracy of the extrapolated eigenvalue.
    pub tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            points_per_wavelength: 400.0,
            decay: 40.0,
            tol: 1e-10,
        }
    }
}

/// A bound state on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericState {
    /// Eigenvalue of the discrete problem on this grid.
    pub eps: f64,
    pub grid: Vec<f64>,
    /// Real eigenfunction with unit discrete `L2` norm.
    pub u: Vec<f64>,
    pub nodes: usize,
    pub domain: (f64, f64),
    pub step: f64,
}

impl NumericState {
    /// Largest `|U|` at either end relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ends = self.u[0].abs().max(self.u[self.u.len() - 1].abs());
        ends / peak
    }
}

/// Result of solving at two step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// Richardson-extrapolated eigenvalue.
    pub eps: f64,
    /// `|eps(h/2) - eps(h)| / 15`, the size of the extrapolation step.
    pub eps_error: f64,
    pub coarse: NumericState,
    pub fine: NumericState,
}

impl OracleSolution {
    /// Richardson-extrapolated `M_m / M_0`.
    pub fn moment(&self, m: u32) -> f64 {
        richardson(
            numeric_moment(&self.coarse, m),
            numeric_moment(&self.fine, m),
        )
    }

    /// Extrapolated root-mean-square width about the centroid.
    pub fn rms_width(&self) -> f64 {
        let w = |s: &NumericState| {
            let m1 = numeric_moment(s, 1);
            (numeric_moment(s, 2) - m1 * m1).sqrt()
        };
        richardson(w(&self.coarse), w(&self.fine))
    }
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 15.0
}

/// Level `n` with default options.
pub fn solve_eigen(p: &Potential, k: f64, n: usize, tol: f64) -> Result<OracleSolution> {
    solve_eigen_with(
        p,
        k,
        n,
        &OracleOptions {
            tol,
            ..OracleOptions::default()
        },
    )
}

pub fn solve_eigen_with(
    p: &Potential,
    k: f64,
    n: usize,
    opts: &OracleOptions,
) -> Result<OracleSolution> {
    let setup = Setup::new(p, k, n, opts)?;
    let coarse = setup.solve(1)?;
    let fine = setup.solve(2)?;
    let eps = richardson(coarse.eps, fine.eps);
    let eps_error = (fine.eps - coarse.eps).abs() / 15.0;
    if !(eps_error <= opts.tol.max(1e-14)) {
        return Err(Error::NoConvergence(format!(
            "Numerov eigenvalue for n = {n} uncertain by {eps_error:e}; refine the grid"
        )));
    }
    Ok(OracleSolution {
        eps,
        eps_error,
        coarse,
        fine,
    })
}

/// Discrete eigenvalues of level `n` on grids refined by successive halving,
/// `refinements` entries starting from the default step. Used to measure
/// the observed order of the scheme.
pub fn eigenvalue_sequence(
    p: &Potential,
    k: f64,
    n: usize,
    opts: &OracleOptions,
    refinements: u32,
) -> Result<Vec<(f64, f64)>> {
    let setup = Setup::new(p, k, n, opts)?;
    (0..refinements)
        .map(|j| {
            let s = setup.solve(1 << j)?;
            Ok((s.step, s.eps))
        })
        .collect()
}

/// `M_m / M_0` of a state by composite Simpson on its grid.
pub fn numeric_moment(s: &NumericState, m: u32) -> f64 {
    let mi = m as i32;
    let num = simpson(
        s.step,
        s.grid.iter().zip(&s.u).map(|(x, u)| x.powi(mi) * u * u),
    );
    let den = simpson(s.step, s.u.iter().map(|u| u * u));
    num / den
}

fn simpson<I: Iterator<Item = f64>>(h: f64, values: I) -> f64 {
    let v: Vec<f64> = values.collect();
    let n = v.len();
    debug_assert!(n % 2 == 1);
    let mut s = v[0] + v[n - 1];
    for (i, x) in v.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * x } else { 2.0 * x };
    }
    s * h / 3.0
}

/// Domain, base grid and eigenvalue bracket for one level.
struct Setup<'a> {
    p: &'a Potential,
    k: f64,
    n: usize,
    domain: (f64, f64),
    /// Intervals of the coarsest grid (even).
    intervals: usize,
    bracket: (f64, f64),
    /// Energy range used if the semiclassical bracket misses.
    range: (f64, f64),
}

impl<'a> Setup<'a> {
    fn new(p: &'a Potential, k: f64, n: usize, opts: &OracleOptions) -> Result<Self> {
        let q = Quantizer::new(p, k)?;
        let (_, vmin) = p.well_minimum(None)?;
        let e_n = q.eps0(n)?;
        let e_up = q.eps0(n + 1).ok();
        let e_down = if n > 0 { Some(q.eps0(n - 1)?) } else { None };
        let top = match (p.escape_energy(), e_up) {
            (t, _) if t.is_finite() => t,
            (_, Some(e)) => e + (e - e_n),
            (_, None) => return Err(Error::NoBoundState(n)),
        };
        let lo = e_down.map_or(vmin, |e| 0.5 * (e + e_n));
        let hi = e_up.map_or(0.5 * (e_n + top), |e| 0.5 * (e_n + e));

        // Truncate where the WKB exponent at the upper bracket energy reaches `decay`.
        let tp = p.turning_points(hi, None)?;
        let (dlo, dhi) = p.domain();
        let reach = |start: f64, dir: f64, edge: f64| {
            let mut x = start;
            let mut exponent = 0.0;
            let ds = 1e-3 * tp.width();
            while exponent < opts.decay && dir * (edge - x) > ds {
                let mid = x + 0.5 * dir * ds;
                exponent += k * (p.value(mid) - hi).max(0.0).sqrt() * ds;
                x += dir * ds;
            }
            x
        };
        let a = reach(tp.x1, -1.0, dlo);
        let b = reach(tp.x2, 1.0, dhi);

        // Step from the fastest local oscillation or decay on the domain.
        let samples = 4096;
        let kmax = (0..=samples)
            .map(|i| {
                let x = a + (b - a) * i as f64 / samples as f64;
                k * (p.value(x) - hi).abs().max((hi - vmin).abs()).sqrt()
            })
            .fold(0.0f64, f64::max);
        let h = 2.0 * std::f64::consts::PI / (opts.points_per_wavelength * kmax);
        let mut intervals = ((b - a) / h).ceil() as usize;
        intervals += intervals % 2;
        Ok(Self {
            p,
            k,
            n,
            domain: (a, b),
            intervals,
            bracket: (lo, hi),
            range: (vmin, top),
        })
    }

    fn solve(&self, refine: usize) -> Result<NumericState> {
        let m = self.intervals * refine;
        let (a, b) = self.domain;
        let h = (b - a) / m as f64;
        let grid: Vec<f64> = (0..=m).map(|i| a + h * i as f64).collect();
        let v: Vec<f64> = grid.iter().map(|&x| self.p.value(x)).collect();
        let shooter = Shooter {
            v: &v,
            h,
            k2: self.k * self.k,
        };

        let (e_a, e_b) = self.node_bracket(&shooter)?;
        let end_value = |e: f64| shooter.left(e, m).0;
        let scale = e_a.abs().max(e_b.abs()).max(1e-300);
        let eps = find_root(end_value, (e_a, e_b), 4.0 * f64::EPSILON * scale)?;

        let u = shooter.eigenfunction(eps)?;
        let peak = u.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let nodes = sign_changes(u.iter().copied().filter(|x| x.abs() > 1e-9 * peak));
        if nodes != self.n {
            return Err(Error::NodeCount(nodes));
        }
        let norm = simpson(h, u.iter().map(|x| x * x)).sqrt();
        let sign = if u
            .iter()
            .find(|x| x.abs() > 1e-6 * peak)
            .is_some_and(|&x| x < 0.0)
        {
            -1.0
        } else {
            1.0
        };
        let u = u.into_iter().map(|x| sign * x / norm).collect();
        Ok(NumericState {
            eps,
            grid,
            u,
            nodes,
            domain: self.domain,
            step: h,
        })
    }

    /// Energies with exactly `n` and `n + 1` sign changes of the left shot.
    fn node_bracket(&self, shooter: &Shooter) -> Result<(f64, f64)> {
        let count = |e: f64| shooter.left(e, shooter.v.len() - 1).1;
        let n = self.n;
        let (mut lo, mut hi) = self.bracket;
        if count(lo) > n || count(hi) <= n {
            (lo, hi) = self.range;
            if count(hi) <= n {
                return Err(Error::NodeCount(count(hi)));
            }
        }
        for _ in 0..200 {
            let (cl, ch) = (count(lo), count(hi));
            if cl == n && ch == n + 1 {
                return Ok((lo, hi));
            }
            let mid = 0.5 * (lo + hi);
            if count(mid) <= n {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NodeCount(count(lo)))
    }
}

struct Shooter<'a> {
    v: &'a [f64],
    h: f64,
    k2: f64,
}

impl Shooter<'_> {
    fn weights(&self, eps: f64, i: usize) -> (f64, f64) {
        let f = self.k2 * (self.v[i] - eps) * self.h * self.h / 12.0;
        (1.0 - f, 2.0 * (1.0 + 5.0 * f))
    }

    /// Left shot from `y(a) = 0` up to index `last`: value there and the
    /// number of sign changes. Values are rescaled by powers of two, which
    /// keeps signs and the location of the end-value root.
    fn left(&self, eps: f64, last: usize) -> (f64, usize) {
        let mut y0 = 0.0;
        let mut y1 = 1e-30;
        let mut w0 = self.weights(eps, 0).0;
        let mut w1 = self.weights(eps, 1);
        let mut changes = 0;
        for i in 1..last {
            let w2 = self.weights(eps, i + 1).0;
            let y2 = (w1.1 * y1 - w0 * y0) / w2;
            if y2 != 0.0 && y1 != 0.0 && (y2 > 0.0) != (y1 > 0.0) {
                changes += 1;
            }
            y0 = y1;
            y1 = y2;
            if y1.abs() > 1e200 {
                y0 *= 2f64.powi(-600);
                y1 *= 2f64.powi(-600);
            }
            w0 = w1.0;
            w1 = (w2, self.weights(eps, i + 1).1);
        }
        (y1, changes)
    }

    /// Full profile glued at the largest left-shot amplitude inside the well.
    fn eigenfunction(&self, eps: f64) -> Result<Vec<f64>> {
        let m = self.v.len() - 1;
        let mut left = vec![0.0; m + 1];
        let mut right = vec![0.0; m + 1];
        self.fill(eps, &mut left, false);
        self.fill(eps, &mut right, true);
        // Match inside the classically allowed region, where neither shot
        // carries a growing error.
        let allowed: Vec<usize> = (0..=m).filter(|&i| self.v[i] < eps).collect();
        let (&first, &last) = match (allowed.first(), allowed.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::NoBoundState(0)),
        };
        let mid = (first + last) / 2;
        let join = (first..=last)
            .filter(|&i| i <= mid + (last - first) / 4 && i + (last - first) / 4 >= mid)
            .max_by(|&i, &j| left[i].abs().total_cmp(&left[j].abs()))
            .unwrap_or(mid);
        if left[join] == 0.0 || right[join] == 0.0 {
            return Err(Error::NonFinite("matching point of the shots".into()));
        }
        let ratio = left[join] / right[join];
        Ok((0..=m)
            .map(|i| if i <= join { left[i] } else { right[i] * ratio })
            .collect())
    }

    fn fill(&self, eps: f64, out: &mut [f64], from_right: bool) {
        let m = out.len() - 1;
        let idx = |j: usize| if from_right { m - j } else { j };
        out[idx(0)] = 0.0;
        out[idx(1)] = 1e-30;
        for j in 1..m {
            let (w0, _) = self.weights(eps, idx(j - 1));
            let (_, c1) = self.weights(eps, idx(j));
            let (w2, _) = self.weights(eps, idx(j + 1));
            out[idx(j + 1)] = (c1 * out[idx(j)] - w0 * out[idx(j - 1)]) / w2;
            if out[idx(j + 1)].abs() > 1e200 {
                for t in 0..=j + 1 {
                    out[idx(t)] *= 2f64.powi(-600);
                }
            }
        }
    }
}

fn sign_changes<I: Iterator<Item = f64>>(values: I) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for v in values {
        let s = v > 0.0;
        if last.is_some_and(|l| l != s) {
            changes += 1;
        }
        last = Some(s);
    }
    changes
}
