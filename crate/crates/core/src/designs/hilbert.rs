use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::construct::SphericalDesign;
use crate::chiribella::real_sphere_moment;
use crate::combinat::{real_dim_const, sym_dim};
use crate::error::{Error, Result};
use crate::sampling::{complex_gaussian, complex_sphere, inner_c, norm_c, norm_r, real_gaussian, real_sphere, seeded};
use crate::scalar::{qb, ratio_to_f64, C64};
use crate::symspace::{SymBasis, SymIndex};

const MC_CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertRoute {
    Design,
    MonteCarlo,
    Exact,
}

/// Residuals of `‖x‖^{2n} = c_n ∫ |⟨x,v⟩|^{2n} dv` at random test points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertReport {
    pub d: usize,
    pub n: usize,
    pub route: HilbertRoute,
    pub points: usize,
    pub max_residual: f64,
    /// Largest deviation in units of the estimated standard error (Monte Carlo only).
    pub max_sigma: Option<f64>,
    pub samples: usize,
    pub pass: bool,
}

pub fn verify_hilbert_complex(d: usize, n: usize, design: &SphericalDesign, points: usize, seed: u64) -> Result<HilbertReport> {
    if design.d != d {
        return Err(Error::DimensionMismatch { expected: d, got: design.d });
    }
    if design.degree < n {
        return Err(Error::DesignDegree { have: design.degree, need: n });
    }
    let dn = sym_dim(d, n)? as f64;
    let mut rng = seeded(seed);
    let mut xs = vec![unit_c(d, 0)];
    xs.extend((0..points).map(|_| complex_gaussian(&mut rng, d)));
    let max_residual = xs
        .par_iter()
        .map(|x| {
            let lhs = norm_c(x).powi(2 * n as i32);
            let rhs = dn * design.atoms.iter().map(|a| a.weight * inner_c(x, &a.vector).norm_sqr().powi(n as i32)).sum::<f64>();
            ((lhs - rhs) / lhs).abs()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(HilbertReport {
        d,
        n,
        route: HilbertRoute::Design,
        points: xs.len(),
        max_residual,
        max_sigma: None,
        samples: design.atoms.len(),
        pass: max_residual <= 1e-9,
    })
}

fn unit_c(d: usize, i: usize) -> Vec<C64> {
    (0..d).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()
}

/// `∫ ⟨x,v⟩^{2n} dv = Σ_{|α|=2n} (2n)!/α! x^α ∫ v^α dv`, evaluated with exact sphere moments.
pub fn real_sphere_power_integral(x: &[f64], n: usize) -> f64 {
    let basis = SymBasis::shared(x.len(), 2 * n);
    let monos = basis.monomials_real(x);
    basis
        .iter()
        .zip(monos)
        .filter(|(a, _)| a.exponents().iter().all(|e| e % 2 == 0))
        .map(|(a, m): (&SymIndex, f64)| ratio_to_f64(&(real_sphere_moment(a) * qb(a.multinomial()))) * m)
        .sum()
}

pub fn verify_hilbert_real(d: usize, n: usize, samples: usize, points: usize, seed: u64) -> Result<HilbertReport> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let c = ratio_to_f64(&real_dim_const(d, n));
    let mut rng = seeded(seed);
    let xs: Vec<Vec<f64>> = (0..points.max(1)).map(|_| real_gaussian(&mut rng, d)).collect();
    if samples == 0 {
        let max_residual = xs
            .iter()
            .map(|x| {
                let lhs = norm_r(x).powi(2 * n as i32);
                ((lhs - c * real_sphere_power_integral(x, n)) / lhs).abs()
            })
            .fold(0.0, f64::max);
        return Ok(HilbertReport {
            d,
            n,
            route: HilbertRoute::Exact,
            points: xs.len(),
            max_residual,
            max_sigma: None,
            samples: 0,
            pass: max_residual <= 1e-10,
        });
    }
    let lhs: Vec<f64> = xs.iter().map(|x| norm_r(x).powi(2 * n as i32)).collect();
    let (max_residual, max_sigma) = monte_carlo(&lhs, samples, seed, |rng, out| {
        let v = real_sphere(rng, d);
        for (slot, x) in out.iter_mut().zip(&xs) {
            *slot = c * x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>().powi(2 * n as i32);
        }
    });
    Ok(HilbertReport {
        d,
        n,
        route: HilbertRoute::MonteCarlo,
        points: xs.len(),
        max_residual,
        max_sigma: Some(max_sigma),
        samples,
        pass: max_sigma <= 4.0,
    })
}

/// `‖x‖^{2n} = d[n] ∫ |⟨x,v⟩|^{2n} dv` with `v` Haar-random on the complex unit sphere.
pub fn verify_hilbert_complex_mc(d: usize, n: usize, samples: usize, points: usize, seed: u64) -> Result<HilbertReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter("Monte Carlo check needs at least 2 samples".into()));
    }
    let dn = sym_dim(d, n)? as f64;
    let mut rng = seeded(seed);
    let xs: Vec<Vec<C64>> = (0..points.max(1)).map(|_| complex_gaussian(&mut rng, d)).collect();
    let lhs: Vec<f64> = xs.iter().map(|x| norm_c(x).powi(2 * n as i32)).collect();
    let (max_residual, max_sigma) = monte_carlo(&lhs, samples, seed, |rng, out| {
        let v = complex_sphere(rng, d);
        for (slot, x) in out.iter_mut().zip(&xs) {
            *slot = dn * inner_c(x, &v).norm_sqr().powi(n as i32);
        }
    });
    Ok(HilbertReport {
        d,
        n,
        route: HilbertRoute::MonteCarlo,
        points: xs.len(),
        max_residual,
        max_sigma: Some(max_sigma),
        samples,
        pass: max_sigma <= 4.0,
    })
}

/// Sample means of `sample` against `lhs`, returning the worst relative residual and z-score.
fn monte_carlo<F>(lhs: &[f64], samples: usize, seed: u64, sample: F) -> (f64, f64)
where
    F: Fn(&mut crate::sampling::SeededRng, &mut [f64]) + Sync,
{
    let p = lhs.len();
    let chunks = samples.div_ceil(MC_CHUNK);
    let sums: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = seeded(seed.wrapping_add(1 + ci as u64));
            let len = MC_CHUNK.min(samples - ci * MC_CHUNK);
            let mut s = vec![0.0; p];
            let mut s2 = vec![0.0; p];
            let mut vals = vec![0.0; p];
            for _ in 0..len {
                sample(&mut rng, &mut vals);
                for j in 0..p {
                    s[j] += vals[j];
                    s2[j] += vals[j] * vals[j];
                }
            }
            (s, s2)
        })
        .collect();
    let nf = samples as f64;
    let mut max_residual: f64 = 0.0;
    let mut max_sigma: f64 = 0.0;
    for (j, &l) in lhs.iter().enumerate() {
        let (s, s2) = sums.iter().fold((0.0, 0.0), |acc, (a, b)| (acc.0 + a[j], acc.1 + b[j]));
        let mean = s / nf;
        let var = (s2 / nf - mean * mean).max(0.0);
        let se = (var / nf).sqrt();
        max_residual = max_residual.max(((l - mean) / l).abs());
        let z = if se > 0.0 { (l - mean).abs() / se } else if (l - mean).abs() <= 1e-12 * l { 0.0 } else { f64::INFINITY };
        max_sigma = max_sigma.max(z);
    }
    (max_residual, max_sigma)
}
