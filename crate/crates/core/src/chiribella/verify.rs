use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coeffs::coeff_c;
use super::maps::{mp_design, MpRoute, Picture, SymLinearMap};
use crate::combinat::real_dim_const;
use crate::designs::SphericalDesign;
use crate::error::{Error, Result};
use crate::sampling::{complex_sphere, inner_c, real_sphere, seeded};
use crate::scalar::{qb, ratio_to_f64, Rational, C64};
use crate::symspace::{HermOp, RealSymPoly, SymBasis, SymIndex};

const MC_CHUNK: usize = 4096;

/// Comparison of the design-quadrature `MP_{n→k}` with `Σ_s c(n,k,s) tr* ∘ tr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiribellaReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub design_atoms: usize,
    /// Frobenius distance of the two maps in the orthonormal basis.
    pub matrix_deviation: f64,
    pub pairs: usize,
    /// Worst `|⟨b^{⊗k}|MP(|a⟩⟨a|^{⊗n})|b^{⊗k}⟩ - Σ_s c(n,k,s) |⟨a,b⟩|^{2s}|` with `MP` from the design quadrature.
    pub scalar_deviation: f64,
    /// Same quantity for `a ⊥ b`, where only `c(n,k,0)` survives.
    pub orthogonal_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn verify_chiribella(n: usize, k: usize, design: &SphericalDesign, pairs: usize, tolerance: f64, seed: u64) -> Result<ChiribellaReport> {
    let d = design.d;
    let quad = mp_design(n, k, 1, design)?;
    let exact = SymLinearMap::mp(n, k, d, Picture::Complex { ancilla: 1 }, MpRoute::Chiribella)?;
    let exact_f = exact.cast::<C64>();
    let matrix_deviation = quad.to_orthonormal().frobenius_distance(&exact_f.to_orthonormal());

    let c: Vec<f64> = (0..=n.min(k)).map(|s| coeff_c(n, k, s).map(|v| ratio_to_f64(&v))).collect::<Result<_>>()?;
    let one = [C64::new(1.0, 0.0)];
    let scalar = |a: &[C64], b: &[C64]| -> Result<f64> {
        let input = HermOp::rank_one(a, n, &one).to_biform();
        let out = quad.apply_form(&input)?;
        let lhs = out.eval(b, &one).re;
        let ip = inner_c(a, b).norm_sqr();
        let rhs: f64 = c.iter().enumerate().map(|(s, cs)| cs * ip.powi(s as i32)).sum();
        Ok((lhs - rhs).abs())
    };
    let mut rng = seeded(seed);
    let samples: Vec<(Vec<C64>, Vec<C64>)> = (0..pairs).map(|_| (complex_sphere(&mut rng, d), complex_sphere(&mut rng, d))).collect();
    let scalar_deviation = samples
        .par_iter()
        .map(|(a, b)| scalar(a, b))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let orthogonal_deviation = if d >= 2 {
        let e = |i: usize| (0..d).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect::<Vec<_>>();
        scalar(&e(0), &e(1))?
    } else {
        0.0
    };
    let pass = matrix_deviation <= tolerance && scalar_deviation <= tolerance && orthogonal_deviation <= tolerance;
    Ok(ChiribellaReport {
        n,
        k,
        d,
        design_atoms: design.atoms.len(),
        matrix_deviation,
        pairs,
        scalar_deviation,
        orthogonal_deviation,
        tolerance,
        pass,
    })
}

/// Checks of `MP^R_{n→k} = Σ_s c_R(n,k,s) tr* ∘ tr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealIdentityReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Exact agreement of the sphere-moment expansion with the coefficient expansion.
    pub exact_equal: bool,
    pub exact_max_abs: f64,
    pub samples: usize,
    /// Largest `|MC - exact| / stderr` over output coefficients, for input `⟨a,x⟩^{2n}`.
    pub mc_max_sigma: Option<f64>,
    pub pass: bool,
}

pub fn verify_real_identity(n: usize, k: usize, d: usize, samples: usize, seed: u64) -> Result<RealIdentityReport> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let haar = SymLinearMap::mp(n, k, d, Picture::Real, MpRoute::HaarMoments)?;
    let chir = SymLinearMap::mp(n, k, d, Picture::Real, MpRoute::Chiribella)?;
    let exact_equal = haar == chir;
    let exact_max_abs = haar.matrix.sub(&chir.matrix).max_abs();

    let mc_max_sigma = if samples > 1 { Some(real_mc_sigma(&chir, n, k, d, samples, seed)?) } else { None };
    let pass = exact_equal && mc_max_sigma.is_none_or(|z| z <= 4.0);
    Ok(RealIdentityReport { n, k, d, exact_equal, exact_max_abs, samples, mc_max_sigma, pass })
}

fn real_mc_sigma(map: &SymLinearMap<Rational>, n: usize, k: usize, d: usize, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = seeded(seed);
    let a = real_sphere(&mut rng, d);
    let bin = SymBasis::shared(d, 2 * n);
    let bout = SymBasis::shared(d, 2 * k);
    let input: Vec<f64> = bin.iter().zip(bin.monomials_real(&a)).map(|(al, m)| ratio_to_f64(&qb(al.multinomial())) * m).collect();
    let expected = map.cast::<f64>().matrix.apply(&input);
    let pf = RealSymPoly::from_coeffs(d, n, input)?;
    let pref: Vec<f64> = bout.iter().map(|g: &SymIndex| ratio_to_f64(&(real_dim_const(d, n + k) * qb(g.multinomial())))).collect();
    let len = bout.len();
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = seeded(seed.wrapping_add(1 + ci as u64));
            let mut s = vec![0.0; len];
            let mut s2 = vec![0.0; len];
            for _ in 0..MC_CHUNK.min(samples - ci * MC_CHUNK) {
                let phi = real_sphere(&mut rng, d);
                let pv = pf.eval(&phi);
                for (g, m) in bout.monomials_real(&phi).into_iter().enumerate() {
                    let v = pref[g] * pv * m;
                    s[g] += v;
                    s2[g] += v * v;
                }
            }
            (s, s2)
        })
        .collect();
    let nf = samples as f64;
    let mut zmax: f64 = 0.0;
    for g in 0..len {
        let (s, s2) = parts.iter().fold((0.0, 0.0), |acc, (a, b)| (acc.0 + a[g], acc.1 + b[g]));
        let mean = s / nf;
        let se = ((s2 / nf - mean * mean).max(0.0) / nf).sqrt();
        let dev = (mean - expected[g]).abs();
        let z = if se > 0.0 {
            dev / se
        } else if dev <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        zmax = zmax.max(z);
    }
    Ok(zmax)
}
