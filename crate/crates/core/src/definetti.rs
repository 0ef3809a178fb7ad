//! Exponential de Finetti truncations: exact tail coefficients, the `δ^{r+1}/(1-3δ)` bound,
//! and the truncated marginal channel as an explicit matrix.

use nalgebra::DMatrix;
use num::traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::Field;
use crate::chiribella::{coeff_qhat, coeff_qhat_real, MpRoute, Picture, SymLinearMap, TraceRoute};
use crate::combinat::sym_dim_q;
use crate::error::{Error, Result};
use crate::io::fraction;
use crate::sampling::{complex_gaussian, seeded};
use crate::scalar::{ratio_to_f64, Rational, C64};
use crate::symspace::HermOp;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeFinettiReport {
    #[serde(default = "complex_field")]
    pub field: Field,
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub r: usize,
    /// `δ = k(k+d-1)/(n+k+d-1)`, or `δ_R` for the real field.
    #[serde(with = "fraction")]
    pub delta: Rational,
    /// `δ_R = k(2k+d-2)/(2n+2k+d-2)`.
    #[serde(with = "fraction")]
    pub delta_real: Rational,
    /// `Σ_{s=r+1}^{k} |q̂(n,k,k-s)|` (with `q̂_R` for the real field).
    #[serde(with = "fraction")]
    pub eps_exact: Rational,
    /// `δ^{r+1}/(1-3δ)`, defined when `δ < 1/3`.
    #[serde(with = "fraction::option")]
    pub eps_bound: Option<Rational>,
    /// `q̂(n,k,k-s)` or `q̂_R(n,k,k-s)` for `s = 0..=k`.
    #[serde(with = "fraction::vec")]
    pub qhat_table: Vec<Rational>,
    pub feasible: bool,
}

pub fn definetti_delta(d: usize, k: usize, n: usize) -> Rational {
    Rational::new((k * (k + d - 1)).into(), (n + k + d - 1).into())
}

pub fn definetti_real_delta(d: usize, k: usize, n: usize) -> Rational {
    Rational::new((k * (2 * k + d - 2)).into(), (2 * n + 2 * k + d - 2).into())
}

fn check(d: usize, k: usize, n: usize, r: usize) -> Result<()> {
    if d == 0 || k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("need d >= 1 and 1 <= k < n, got d = {d}, k = {k}, n = {n}")));
    }
    if r > k {
        return Err(Error::InvalidParameter(format!("truncation order r = {r} exceeds k = {k}")));
    }
    Ok(())
}

fn complex_field() -> Field {
    Field::Complex
}

pub fn definetti_report(d: usize, k: usize, n: usize, r: usize) -> Result<DeFinettiReport> {
    report_for(Field::Complex, d, k, n, r)
}

/// The real analogue, with `q̂_R` and `δ_R` in place of `q̂` and `δ`.
pub fn definetti_report_real(d: usize, k: usize, n: usize, r: usize) -> Result<DeFinettiReport> {
    report_for(Field::Real, d, k, n, r)
}

pub fn report_for(field: Field, d: usize, k: usize, n: usize, r: usize) -> Result<DeFinettiReport> {
    check(d, k, n, r)?;
    let (delta, qhat_table) = match field {
        Field::Complex => {
            (definetti_delta(d, k, n), (0..=k).map(|s| coeff_qhat(n, k, s, d)).collect::<Result<Vec<_>>>()?)
        }
        Field::Real => {
            (definetti_real_delta(d, k, n), (0..=k).map(|s| coeff_qhat_real(n, k, s, d)).collect::<Result<Vec<_>>>()?)
        }
    };
    let eps_exact: Rational = qhat_table[r + 1..].iter().map(|q| q.abs()).sum();
    let three = Rational::from_integer(3.into());
    let feasible = &delta * &three < Rational::one();
    let eps_bound = feasible.then(|| {
        let pow = (0..=r).fold(Rational::one(), |acc, _| acc * &delta);
        pow / (Rational::one() - &three * &delta)
    });
    Ok(DeFinettiReport {
        field,
        d,
        k,
        n,
        r,
        delta,
        delta_real: definetti_real_delta(d, k, n),
        eps_exact,
        eps_bound,
        qhat_table,
        feasible,
    })
}

impl DeFinettiReport {
    /// `eps_exact ≤ eps_bound`, vacuously true outside the feasible region.
    pub fn bound_holds(&self) -> bool {
        self.eps_bound.as_ref().is_none_or(|b| &self.eps_exact <= b)
    }
}

/// Parameter grid for a sweep; every `r = 0..=k` is used when `r` is absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeFinettiGrid {
    pub d: Vec<usize>,
    pub k: Vec<usize>,
    pub n: Vec<usize>,
    #[serde(default)]
    pub r: Option<Vec<usize>>,
    #[serde(default)]
    pub real: bool,
}

pub fn definetti_sweep(grid: &DeFinettiGrid) -> Result<Vec<DeFinettiReport>> {
    let mut cases = Vec::new();
    for &d in &grid.d {
        for &k in &grid.k {
            for &n in &grid.n {
                if k == 0 || k >= n {
                    continue;
                }
                let rs: Vec<usize> = match &grid.r {
                    Some(rs) => rs.iter().copied().filter(|&r| r <= k).collect(),
                    None => (0..=k).collect(),
                };
                cases.extend(rs.into_iter().map(|r| (d, k, n, r)));
            }
        }
    }
    let field = if grid.real { Field::Real } else { Field::Complex };
    cases.par_iter().map(|&(d, k, n, r)| report_for(field, d, k, n, r)).collect()
}

/// `Σ_{s=0}^{r} q̂(n,k,k-s) Clone_{k-s→k} ∘ M̃P_{n→k-s}`, with `M̃P_{n→j} = (d[n]/d[n+j]) MP_{n→j}`.
pub fn truncated_marginal_map(d: usize, k: usize, n: usize, r: usize) -> Result<SymLinearMap<Rational>> {
    check(d, k, n, r)?;
    let mut acc: Option<SymLinearMap<Rational>> = None;
    for s in 0..=r {
        let j = k - s;
        let q = coeff_qhat(n, k, s, d)?;
        let mp = SymLinearMap::mp(n, j, d, Picture::Complex { ancilla: 1 }, MpRoute::Chiribella)?
            .scale(&(sym_dim_q(d, n) / sym_dim_q(d, n + j)));
        let term = SymLinearMap::clone_map(j, k, d, 1)?.compose(&mp)?.scale(&q);
        acc = Some(match acc {
            Some(a) => a.add(&term),
            None => term,
        });
    }
    Ok(acc.expect("r >= 0 gives at least one term"))
}

/// Largest trace distance between `tr_{n→k}(ρ)` and the truncated map applied to random states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub r: usize,
    pub states: usize,
    pub max_trace_distance: f64,
    pub eps_exact: f64,
    pub pass: bool,
}

fn trace_norm(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().map(|v| v.abs()).sum()
}

/// Random density matrix on `∨^n C^d` from a square Ginibre matrix.
pub fn random_state<R: rand::Rng>(rng: &mut R, d: usize, n: usize) -> HermOp {
    let dim = crate::combinat::sym_dim(d, n).expect("desk-scale dimension");
    let g = DMatrix::from_vec(dim, dim, complex_gaussian(rng, dim * dim));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    HermOp::new(d, n, 1, rho / tr).expect("G G^† is Hermitian")
}

pub fn trace_norm_spot_check(d: usize, k: usize, n: usize, r: usize, states: usize, seed: u64) -> Result<SpotCheck> {
    let report = definetti_report(d, k, n, r)?;
    let exact = SymLinearMap::trace(d, n, n - k, Picture::Complex { ancilla: 1 }, TraceRoute::Laplacian)?.cast::<C64>();
    let approx = truncated_marginal_map(d, k, n, r)?.cast::<C64>();
    let mut rng = seeded(seed);
    let rhos: Vec<HermOp> = (0..states).map(|_| random_state(&mut rng, d, n)).collect();
    let dists = rhos
        .par_iter()
        .map(|rho| {
            let form = rho.to_biform();
            let a = HermOp::from_biform(&exact.apply_form(&form)?)?;
            let b = HermOp::from_biform(&approx.apply_form(&form)?)?;
            Ok(trace_norm(&(a.entries() - b.entries())))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_trace_distance = dists.into_iter().fold(0.0, f64::max);
    let eps = ratio_to_f64(&report.eps_exact);
    Ok(SpotCheck { d, k, n, r, states, max_trace_distance, eps_exact: eps, pass: max_trace_distance <= eps + 1e-10 })
}
