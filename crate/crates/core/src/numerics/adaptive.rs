use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::gauss::{WG, WGK, XGK};
use super::QuadratureSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let (value, error) = (kron * half, ((kron - gauss) * half).abs());
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("integrand on [{a}, {b}]")));
    }
    Ok((value, error))
}

/// Adaptive 15-point Gauss–Kronrod quadrature of a smooth `f` over `[a, b]`.
pub fn integrate_regular<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")));
    }
    let (value, error) = kronrod(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        a,
        b,
        value,
        error,
        depth: 0,
    });
    let (mut total, mut total_err) = (value, error);
    while !spec.accepts(total_err, total) {
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= spec.max_levels {
            return Err(Error::NoConvergence(format!(
                "adaptive quadrature on [{a}, {b}] reached depth {} (error {total_err:e})",
                spec.max_levels
            )));
        }
        let m = 0.5 * (worst.a + worst.b);
        let (lv, le) = kronrod(&mut f, worst.a, m)?;
        let (rv, re) = kronrod(&mut f, m, worst.b)?;
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        let depth = worst.depth + 1;
        heap.push(Piece {
            a: worst.a,
            b: m,
            value: lv,
            error: le,
            depth,
        });
        heap.push(Piece {
            a: m,
            b: worst.b,
            value: rv,
            error: re,
            depth,
        });
    }
    // re-sum to shed the drift of the running total
    let value = heap.iter().map(|p| p.value).sum();
    Ok(Estimate {
        value,
        error: total_err.max(0.0),
    })
}
