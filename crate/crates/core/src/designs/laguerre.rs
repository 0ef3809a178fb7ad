//! Gauss–Laguerre nodes and weights.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::combinat::factorial;
use crate::error::{Error, Result};
use crate::scalar::{qb, ratio_from_f64, ratio_to_f64, Rational};

pub const MAX_NODES: usize = 64;

/// Largest `m` for which the Vandermonde moment solve is trusted as a cross-check.
pub const VANDERMONDE_MAX: usize = 11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaguerreData {
    pub m: usize,
    /// Zeros of `L_m`, strictly increasing.
    pub roots: Vec<f64>,
    /// Gauss–Laguerre weights `1/(β L_m'(β)²)`.
    pub weights: Vec<f64>,
    /// Largest relative difference to the weights solving `Σ w_s β_s^j = j!`, `j < m`,
    /// when `m` is small enough for that solve to be meaningful.
    pub vandermonde_deviation: Option<f64>,
}

/// `(L_m(x), L_{m-1}(x))` by the three-term recurrence.
pub fn laguerre_pair(m: usize, x: f64) -> (f64, f64) {
    if m == 0 {
        return (1.0, 0.0);
    }
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    for j in 1..m {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 - x) * cur - j * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

pub fn laguerre(m: usize, x: f64) -> f64 {
    laguerre_pair(m, x).0
}

/// `L_m'(x) = m (L_m(x) - L_{m-1}(x)) / x`.
pub fn laguerre_derivative(m: usize, x: f64) -> f64 {
    let (l, lm1) = laguerre_pair(m, x);
    m as f64 * (l - lm1) / x
}

pub fn laguerre_nodes(m: usize) -> Result<LaguerreData> {
    if m == 0 || m > MAX_NODES {
        return Err(Error::InvalidParameter(format!("Laguerre order m must be in 1..={MAX_NODES}, got {m}")));
    }
    // Jacobi matrix of the monic recurrence: diagonal 2i+1, off-diagonal i
    let jac = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i.abs_diff(j) == 1 {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let mut roots: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
    roots.sort_by(f64::total_cmp);
    for r in roots.iter_mut() {
        let mut converged = false;
        for _ in 0..100 {
            let step = laguerre(m, *r) / laguerre_derivative(m, *r);
            *r -= step;
            if step.abs() <= 4.0 * f64::EPSILON * r.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || !r.is_finite() || *r <= 0.0 {
            return Err(Error::NonConvergence(m));
        }
    }
    if roots.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonConvergence(m));
    }
    let weights: Vec<f64> = roots
        .iter()
        .map(|&x| {
            let dl = laguerre_derivative(m, x);
            1.0 / (x * dl * dl)
        })
        .collect();
    let vandermonde_deviation = (m <= VANDERMONDE_MAX).then(|| {
        let v = vandermonde_weights(&roots);
        v.iter().zip(&weights).map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max)
    });
    Ok(LaguerreData { m, roots, weights, vandermonde_deviation })
}

/// Solve `Σ_s w_s β_s^j = j!` for `j = 0..m-1` by the Björck–Pereyra recursion,
/// carried out in exact rational arithmetic on the floating-point roots.
pub fn vandermonde_weights(roots: &[f64]) -> Vec<f64> {
    let m = roots.len();
    let x: Vec<Rational> = roots.iter().map(|&r| ratio_from_f64(r).unwrap_or_default()).collect();
    let mut b: Vec<Rational> = (0..m).map(|j| qb(factorial(j))).collect();
    for k in 0..m.saturating_sub(1) {
        for i in (k + 1..m).rev() {
            let t = &x[k] * &b[i - 1];
            b[i] -= t;
        }
    }
    for k in (0..m.saturating_sub(1)).rev() {
        for i in k + 1..m {
            let t = &x[i] - &x[i - k - 1];
            b[i] /= t;
        }
        for i in k..m - 1 {
            let t = b[i + 1].clone();
            b[i] -= t;
        }
    }
    b.iter().map(ratio_to_f64).collect()
}

impl LaguerreData {
    /// Largest relative error of `Σ w_s β_s^j = j!` over `j = 0..=max_power`.
    pub fn moment_error(&self, max_power: usize) -> f64 {
        let mut fact = 1.0;
        let mut worst: f64 = 0.0;
        for j in 0..=max_power {
            if j > 0 {
                fact *= j as f64;
            }
            let s: f64 = self.roots.iter().zip(&self.weights).map(|(b, w)| w * b.powi(j as i32)).sum();
            worst = worst.max(((s - fact) / fact).abs());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order() {
        let l = laguerre_nodes(1).unwrap();
        assert!((l.roots[0] - 1.0).abs() < 1e-15);
        assert!((l.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn second_order_closed_form() {
        // L_2 = 1 - 2x + x²/2 has roots 2 ∓ √2 with weights (2 ± √2)/4
        let l = laguerre_nodes(2).unwrap();
        let r = 2f64.sqrt();
        assert!((l.roots[0] - (2.0 - r)).abs() < 1e-14);
        assert!((l.roots[1] - (2.0 + r)).abs() < 1e-14);
        assert!((l.weights[0] - (2.0 + r) / 4.0).abs() < 1e-14);
        assert!((l.weights[1] - (2.0 - r) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn roots_are_zeros_and_moments_hold() {
        for m in 1..=20 {
            let l = laguerre_nodes(m).unwrap();
            for &x in &l.roots {
                assert!(laguerre(m, x).abs() < 1e-12 * laguerre_derivative(m, x).abs().max(1.0), "m={m} x={x}");
            }
            assert!(l.weights.iter().all(|&w| w > 0.0));
            assert!(l.moment_error(m.min(10) - 1) < 1e-10, "m={m}");
        }
        assert!(laguerre_nodes(0).is_err());
        assert!(laguerre_nodes(65).is_err());
    }

    #[test]
    fn vandermonde_cross_check() {
        for m in 1..=VANDERMONDE_MAX {
            let l = laguerre_nodes(m).unwrap();
            assert!(l.vandermonde_deviation.unwrap() < 1e-9, "m={m}: {:?}", l.vandermonde_deviation);
        }
        assert!(laguerre_nodes(40).unwrap().vandermonde_deviation.is_none());
    }
}
