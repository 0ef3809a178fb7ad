use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::biform::BiForm;
use super::extrema::{estimate_extrema, estimate_extrema_real, ExtremaOptions};
use super::realpoly::RealSymPoly;
use crate::combinat::falling;
use crate::error::{Error, Result};
use crate::sampling::{complex_sphere, real_sphere, seeded};
use crate::scalar::{ratio_to_f64, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    pub t: usize,
    pub trials: usize,
    /// Estimated `sup |p|` over the unit sphere(s).
    pub sup_abs: f64,
    pub bound: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

const SLACK: f64 = 1e-9;

fn sup_abs(min: f64, max: f64) -> f64 {
    min.abs().max(max.abs())
}

/// Sample `|Δ^t p_W|` on the unit sphere and compare with `(d/2)^t (2k)_{2t} sup|p_W|`.
pub fn bernstein_check<T: Scalar>(form: &BiForm<T>, t: usize, trials: usize, seed: u64) -> Result<BernsteinReport> {
    if t > form.k() {
        return Err(Error::InvalidParameter(format!("t = {t} exceeds k = {}", form.k())));
    }
    let ext = estimate_extrema(form, &ExtremaOptions { samples: 2_000, seed, ..Default::default() });
    let mut lap = form.to_c64();
    for _ in 0..t {
        lap = lap.laplacian();
    }
    let mut rng = seeded(seed ^ 0x5bd1_e995);
    let points: Vec<_> =
        (0..trials).map(|_| (complex_sphere(&mut rng, form.d()), complex_sphere(&mut rng, form.ancilla()))).collect();
    let worst = points.par_iter().map(|(x, y)| lap.eval(x, y).norm()).reduce(|| 0.0, f64::max);
    let d = form.d() as f64;
    let sup = sup_abs(ext.min, ext.max);
    let bound = (d / 2.0).powi(t as i32) * ratio_to_f64(&falling(2 * form.k(), 2 * t).into()) * sup;
    Ok(report(t, trials, sup, bound, worst))
}

/// Sample `|Δ_R^t p|` on the real unit sphere and compare with `d^t (2k)_{2t} sup|p|`.
pub fn bernstein_check_real<T: Scalar>(
    p: &RealSymPoly<T>,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<BernsteinReport> {
    if t > p.k() {
        return Err(Error::InvalidParameter(format!("t = {t} exceeds k = {}", p.k())));
    }
    let ext = estimate_extrema_real(p, &ExtremaOptions { samples: 2_000, seed, ..Default::default() });
    let mut lap = p.to_f64();
    for _ in 0..t {
        lap = lap.laplacian();
    }
    let mut rng = seeded(seed ^ 0x5bd1_e995);
    let points: Vec<_> = (0..trials).map(|_| real_sphere(&mut rng, p.d())).collect();
    let worst = points.par_iter().map(|x| lap.eval(x).abs()).reduce(|| 0.0, f64::max);
    let sup = sup_abs(ext.min, ext.max);
    let bound = (p.d() as f64).powi(t as i32) * ratio_to_f64(&falling(2 * p.k(), 2 * t).into()) * sup;
    Ok(report(t, trials, sup, bound, worst))
}

fn report(t: usize, trials: usize, sup_abs: f64, bound: f64, worst: f64) -> BernsteinReport {
    let max_ratio = if bound > 0.0 {
        worst / bound
    } else if worst == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    BernsteinReport { t, trials, sup_abs, bound, max_ratio, pass: max_ratio <= 1.0 + SLACK }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::seeded;
    use crate::scalar::Rational;
    use crate::symspace::HermOp;

    #[test]
    fn zero_steps_is_trivial() {
        let f = BiForm::<Rational>::norm_power(2, 2, 1);
        let r = bernstein_check(&f, 0, 100, 1).unwrap();
        assert!(r.pass);
        assert!((r.max_ratio - 1.0).abs() < 1e-12);
        assert!(bernstein_check(&f, 3, 10, 1).is_err());
    }

    #[test]
    fn random_operator_passes() {
        let mut rng = seeded(5);
        let w = HermOp::random(&mut rng, 2, 2, 1).to_biform();
        for t in 1..=2 {
            assert!(bernstein_check(&w, t, 2_000, 9).unwrap().pass);
        }
    }
}
