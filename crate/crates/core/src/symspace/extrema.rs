//! Heuristic extrema of forms over the unit sphere.
//!
//! Sphere sampling followed by Riemannian gradient steps with backtracking from
//! the best samples. The results are estimates, not certified bounds.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::biform::BiForm;
use super::realpoly::RealSymPoly;
use crate::sampling::{complex_sphere, norm_c, norm_r, real_sphere, seeded};
use crate::scalar::{Scalar, C64};

/// Sufficient-increase fraction of the backtracking line search.
const ARMIJO: f64 = 0.3;

#[derive(Clone, Copy, Debug)]
pub struct ExtremaOptions {
    pub samples: usize,
    pub refine: bool,
    /// Number of best samples refined on each side.
    pub starts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for ExtremaOptions {
    fn default() -> Self {
        Self { samples: 10_000, refine: true, starts: 8, max_iter: 500, seed: crate::sampling::DEFAULT_SEED }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x_re: Vec<f64>,
    pub x_im: Vec<f64>,
    pub y_re: Vec<f64>,
    pub y_im: Vec<f64>,
}

impl Witness {
    fn complex(x: &[C64], y: &[C64]) -> Self {
        Self {
            x_re: x.iter().map(|z| z.re).collect(),
            x_im: x.iter().map(|z| z.im).collect(),
            y_re: y.iter().map(|z| z.re).collect(),
            y_im: y.iter().map(|z| z.im).collect(),
        }
    }

    fn real(x: &[f64]) -> Self {
        Self { x_re: x.to_vec(), x_im: vec![0.0; x.len()], y_re: vec![1.0], y_im: vec![0.0] }
    }

    pub fn x(&self) -> Vec<C64> {
        self.x_re.iter().zip(&self.x_im).map(|(&a, &b)| C64::new(a, b)).collect()
    }

    pub fn y(&self) -> Vec<C64> {
        self.y_re.iter().zip(&self.y_im).map(|(&a, &b)| C64::new(a, b)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremaEstimate {
    #[serde(rename = "m_est")]
    pub min: f64,
    #[serde(rename = "M_est")]
    pub max: f64,
    pub samples: usize,
    pub refined: bool,
    pub argmin: Witness,
    pub argmax: Witness,
}

/// Value of the form at `x` optimised over unit `y` in the given direction,
/// with the optimal `y` and the gradient `2 ∂p/∂conj(x)` at that `y`.
fn envelope(form: &BiForm<C64>, x: &[C64], maximize: bool) -> (f64, Vec<C64>, Vec<C64>) {
    let dd = form.ancilla();
    let y = if dd == 1 {
        vec![C64::new(1.0, 0.0)]
    } else {
        let block = form.x_block(x);
        let m = DMatrix::from_fn(dd, dd, |i, j| block[i][j]);
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = m.symmetric_eigen();
        let mut best = 0;
        for i in 1..dd {
            let better = if maximize {
                eig.eigenvalues[i] > eig.eigenvalues[best]
            } else {
                eig.eigenvalues[i] < eig.eigenvalues[best]
            };
            if better {
                best = i;
            }
        }
        eig.eigenvectors.column(best).iter().copied().collect()
    };
    let (v, g) = form.eval_with_grad(x, &y);
    (v, g, y)
}

fn refine_complex(form: &BiForm<C64>, start: Vec<C64>, maximize: bool, max_iter: usize) -> (f64, Vec<C64>, Vec<C64>) {
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut x = start;
    let (mut val, mut grad, mut y) = envelope(form, &x, maximize);
    let mut step = 1.0;
    for _ in 0..max_iter {
        let proj = crate::sampling::inner_c(&x, &grad);
        let tangent: Vec<C64> = grad.iter().zip(&x).map(|(g, xi)| (g - xi * proj.re) * sign).collect();
        let gnorm2: f64 = tangent.iter().map(|z| z.norm_sqr()).sum();
        if gnorm2 < 1e-28 {
            break;
        }
        let mut accepted = false;
        while step > 1e-16 {
            let cand: Vec<C64> = x.iter().zip(&tangent).map(|(a, t)| a + t * step).collect();
            let n = norm_c(&cand);
            let cand: Vec<C64> = cand.into_iter().map(|z| z / n).collect();
            let (cv, cg, cy) = envelope(form, &cand, maximize);
            if sign * (cv - val) >= ARMIJO * step * gnorm2 {
                x = cand;
                val = cv;
                grad = cg;
                y = cy;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (val, x, y)
}

/// Estimate `m = min p_W` and `M = max p_W` over unit `x` (and unit `y` when `D > 1`).
pub fn estimate_extrema<T: Scalar>(form: &BiForm<T>, opts: &ExtremaOptions) -> ExtremaEstimate {
    let form = form.to_c64();
    let mut rng = seeded(opts.seed);
    let points: Vec<Vec<C64>> = (0..opts.samples.max(1)).map(|_| complex_sphere(&mut rng, form.d())).collect();
    let lows: Vec<(f64, Vec<C64>)> = points
        .par_iter()
        .map(|x| {
            let (v, _, y) = envelope(&form, x, false);
            (v, y)
        })
        .collect();
    let highs: Vec<(f64, Vec<C64>)> = if form.ancilla() == 1 {
        lows.clone()
    } else {
        points
            .par_iter()
            .map(|x| {
                let (v, _, y) = envelope(&form, x, true);
                (v, y)
            })
            .collect()
    };
    let pick = |vals: &[(f64, Vec<C64>)], maximize: bool| -> (f64, Vec<C64>, Vec<C64>) {
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| {
            let c = vals[a].0.total_cmp(&vals[b].0);
            if maximize {
                c.reverse()
            } else {
                c
            }
        });
        let best = order[0];
        let mut result = (vals[best].0, points[best].clone(), vals[best].1.clone());
        if opts.refine {
            let refined: Vec<(f64, Vec<C64>, Vec<C64>)> = order
                .iter()
                .take(opts.starts.max(1))
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&&i| refine_complex(&form, points[i].clone(), maximize, opts.max_iter))
                .collect();
            for r in refined {
                if (maximize && r.0 > result.0) || (!maximize && r.0 < result.0) {
                    result = r;
                }
            }
        }
        result
    };
    let (_, xmin, ymin) = pick(&lows, false);
    let (_, xmax, ymax) = pick(&highs, true);
    let min = form.eval(&xmin, &ymin).re;
    let max = form.eval(&xmax, &ymax).re;
    ExtremaEstimate {
        min,
        max,
        samples: opts.samples,
        refined: opts.refine,
        argmin: Witness::complex(&xmin, &ymin),
        argmax: Witness::complex(&xmax, &ymax),
    }
}

fn refine_real(p: &RealSymPoly<f64>, start: Vec<f64>, maximize: bool, max_iter: usize) -> (f64, Vec<f64>) {
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut x = start;
    let (mut val, mut grad) = p.eval_with_grad(&x);
    let mut step = 1.0;
    for _ in 0..max_iter {
        let proj: f64 = grad.iter().zip(&x).map(|(g, xi)| g * xi).sum();
        let tangent: Vec<f64> = grad.iter().zip(&x).map(|(g, xi)| (g - xi * proj) * sign).collect();
        let gnorm2: f64 = tangent.iter().map(|t| t * t).sum();
        if gnorm2 < 1e-28 {
            break;
        }
        let mut accepted = false;
        while step > 1e-16 {
            let cand: Vec<f64> = x.iter().zip(&tangent).map(|(a, t)| a + t * step).collect();
            let n = norm_r(&cand);
            let cand: Vec<f64> = cand.into_iter().map(|z| z / n).collect();
            let (cv, cg) = p.eval_with_grad(&cand);
            if sign * (cv - val) >= ARMIJO * step * gnorm2 {
                x = cand;
                val = cv;
                grad = cg;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (val, x)
}

/// Estimate the extrema of a real form over the real unit sphere.
pub fn estimate_extrema_real<T: Scalar>(p: &RealSymPoly<T>, opts: &ExtremaOptions) -> ExtremaEstimate {
    let p = p.to_f64();
    let mut rng = seeded(opts.seed);
    let points: Vec<Vec<f64>> = (0..opts.samples.max(1)).map(|_| real_sphere(&mut rng, p.d())).collect();
    let vals: Vec<f64> = points.par_iter().map(|x| p.eval(x)).collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let pick = |maximize: bool| -> Vec<f64> {
        let ranked: Vec<usize> =
            if maximize { order.iter().rev().copied().collect() } else { order.clone() };
        let mut best = (vals[ranked[0]], points[ranked[0]].clone());
        if opts.refine {
            let refined: Vec<(f64, Vec<f64>)> = ranked
                .iter()
                .take(opts.starts.max(1))
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&&i| refine_real(&p, points[i].clone(), maximize, opts.max_iter))
                .collect();
            for r in refined {
                if (maximize && r.0 > best.0) || (!maximize && r.0 < best.0) {
                    best = r;
                }
            }
        }
        best.1
    };
    let xmin = pick(false);
    let xmax = pick(true);
    ExtremaEstimate {
        min: p.eval(&xmin),
        max: p.eval(&xmax),
        samples: opts.samples,
        refined: opts.refine,
        argmin: Witness::real(&xmin),
        argmax: Witness::real(&xmax),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi, Rational};
    use crate::symspace::SymIndex;

    #[test]
    fn identity_is_flat() {
        let f = BiForm::<Rational>::norm_power(3, 2, 1);
        let e = estimate_extrema(&f, &ExtremaOptions { samples: 200, ..Default::default() });
        assert!((e.min - 1.0).abs() < 1e-12 && (e.max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_rayleigh_quotient() {
        let a = SymIndex::new(vec![1, 0]);
        let b = SymIndex::new(vec![0, 1]);
        let f = BiForm::from_terms(2, 1, 1, [(a.clone(), a, 0, 0, qi(1)), (b.clone(), b, 0, 0, qi(3))]).unwrap();
        let e = estimate_extrema(&f, &ExtremaOptions { samples: 500, ..Default::default() });
        assert!((e.min - 1.0).abs() < 1e-9, "{}", e.min);
        assert!((e.max - 3.0).abs() < 1e-9, "{}", e.max);
        assert!(e.min <= e.max);
        let again = f.to_c64().eval(&e.argmin.x(), &e.argmin.y()).re;
        assert!((again - e.min).abs() < 1e-12);
    }

    #[test]
    fn ancilla_extrema_are_block_eigenvalues() {
        // p(x, y) = |x1|^2 |y1|^2 + 2 |x2|^2 |y2|^2 has m = 0 and M = 2
        let a = SymIndex::new(vec![1, 0]);
        let b = SymIndex::new(vec![0, 1]);
        let f = BiForm::from_terms(2, 1, 2, [(a.clone(), a, 0, 0, qi(1)), (b.clone(), b, 1, 1, qi(2))]).unwrap();
        let e = estimate_extrema(&f, &ExtremaOptions { samples: 300, ..Default::default() });
        assert!(e.min.abs() < 1e-9);
        assert!((e.max - 2.0).abs() < 1e-9);
    }

    #[test]
    fn real_norm_power_is_flat() {
        let p = RealSymPoly::<Rational>::norm_power(3, 3);
        let e = estimate_extrema_real(&p, &ExtremaOptions { samples: 100, ..Default::default() });
        assert!((e.min - 1.0).abs() < 1e-12 && (e.max - 1.0).abs() < 1e-12);
    }
}
