use num::traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::bound_n_real;
use crate::error::{Error, Result};
use crate::scalar::{qi, Rational};
use crate::symspace::{RealSymPoly, SymIndex};

/// `x⁴y² + y⁴z² + z⁴x² - 3x²y²z² + ε(x²+y²+z²)³`.
pub fn motzkin_poly(eps: &Rational) -> RealSymPoly<Rational> {
    let mono = |e: [u32; 3], c: Rational| (SymIndex::new(e.to_vec()), c);
    let base = RealSymPoly::from_terms(
        3,
        3,
        [mono([4, 2, 0], qi(1)), mono([0, 4, 2], qi(1)), mono([2, 0, 4], qi(1)), mono([2, 2, 2], qi(-3))],
    )
    .expect("degree-6 monomials");
    base.add(&RealSymPoly::norm_power(3, 3).scale(eps))
}

/// Smallest `ε ≥ 0` for which every coefficient of `(x²+y²+z²)^{n-3} p_ε` is nonnegative.
pub fn motzkin_eps_threshold(n: usize) -> Result<Rational> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("ε_n needs n >= 3, got {n}")));
    }
    let a = motzkin_poly(&Rational::zero()).trace_adjoint(n)?;
    let b = RealSymPoly::<Rational>::norm_power(3, n);
    let mut eps = Rational::zero();
    for (ca, cb) in a.coeffs().iter().zip(b.coeffs()) {
        if ca.is_negative() {
            let need = -ca / cb;
            if need > eps {
                eps = need;
            }
        }
    }
    Ok(eps)
}

/// One row of the bound comparison for the shifted Motzkin family (`d = 3`, `k = 3`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotzkinRow {
    pub eps: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub bound_general: usize,
    pub bound_improved: usize,
    pub bound_reznick: usize,
    pub numeric: Option<usize>,
    /// `min { n : ε_n ≤ ε }` over `3 ≤ n ≤ n_max`.
    pub coefficient_n: Option<usize>,
}

/// Bound curves and coefficient thresholds on a grid of `ε`.
pub fn motzkin_figure(eps_grid: &[f64], n_max: usize) -> Result<Vec<MotzkinRow>> {
    let thresholds: Vec<(usize, Rational)> =
        (3..=n_max.max(3)).into_par_iter().map(|n| motzkin_eps_threshold(n).map(|t| (n, t))).collect::<Result<_>>()?;
    eps_grid
        .par_iter()
        .map(|&eps| {
            let (m, big_m) = (eps, eps + 4.0 / 27.0);
            let b = bound_n_real(3, 3, m, big_m, n_max.max(super::bounds::DEFAULT_N_MAX))?;
            let e = crate::scalar::ratio_from_f64(eps).ok_or_else(|| Error::InvalidParameter(format!("ε = {eps}")))?;
            Ok(MotzkinRow {
                eps,
                m,
                big_m,
                bound_general: b.general,
                bound_improved: b.improved.expect("k = 3"),
                bound_reznick: b.reznick.expect("real case"),
                numeric: b.numeric,
                coefficient_n: thresholds.iter().find(|(_, t)| *t <= e).map(|(n, _)| *n),
            })
        })
        .collect()
}

/// Evenly spaced grid `lo, …, hi` with `steps` points.
pub fn eps_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn vanishes_at_symmetric_point() {
        let p = motzkin_poly(&Rational::zero()).to_f64();
        let s = 1.0 / 3f64.sqrt();
        assert!(p.eval(&[s, s, s]).abs() < 1e-15);
        let pe = motzkin_poly(&q(1, 10)).to_f64();
        assert!((pe.eval(&[s, s, s]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn thresholds_decrease_and_stay_positive() {
        let t: Vec<Rational> = (3..=15).map(|n| motzkin_eps_threshold(n).unwrap()).collect();
        assert!(t.windows(2).all(|w| w[1] <= w[0]));
        assert!(t.iter().all(|e| e.is_positive()));
        // at n = 3 the only negative coefficient is -3 on x²y²z², against 6 from (x²+y²+z²)³
        assert_eq!(t[0], q(1, 2));
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(eps_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
