use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{bound_n_complex, BoundReport, DEFAULT_N_MAX};
use super::Regime;
use crate::chiribella::{coeff_q, Picture, SymLinearMap};
use crate::combinat::sym_dim_q;
use crate::designs::{cached_design, cached_design_strict, default_cache_dir, SphericalDesign};
use crate::error::{Error, Result};
use crate::io::decimal;
use crate::sampling::{complex_gaussian, complex_sphere, inner_c, norm_c, seeded, DEFAULT_SEED};
use crate::scalar::{Scalar, C64};
use crate::symspace::{estimate_extrema, BiForm, ExtremaOptions, HermOp};

/// Eigenvalues in `[-EIG_CLIP, 0)` are treated as zero when extracting PSD blocks.
pub const EIG_CLIP: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct CertOptions {
    /// Forced degree; chosen from the bounds when absent.
    pub n: Option<usize>,
    /// User-supplied extrema; estimated when absent.
    pub m: Option<f64>,
    pub big_m: Option<f64>,
    pub extrema: ExtremaOptions,
    pub n_max: usize,
    /// Random test points for the reconstruction identity.
    pub check_points: usize,
    /// Sphere samples added to the design atoms for the positivity check.
    pub extra_samples: usize,
    /// Fail instead of building a design that is not already in the cache.
    pub require_cached_design: bool,
    pub seed: u64,
}

impl Default for CertOptions {
    fn default() -> Self {
        Self {
            n: None,
            m: None,
            big_m: None,
            extrema: ExtremaOptions::default(),
            n_max: DEFAULT_N_MAX,
            check_points: 100,
            extra_samples: 2000,
            require_cached_design: false,
            seed: DEFAULT_SEED,
        }
    }
}

/// One term `λ |⟨φ,x⟩|^{2n} |⟨w,y⟩|²` of the sum-of-squares decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosTerm {
    #[serde(with = "decimal::vec")]
    pub phi_re: Vec<f64>,
    #[serde(with = "decimal::vec")]
    pub phi_im: Vec<f64>,
    #[serde(with = "decimal::vec")]
    pub w_re: Vec<f64>,
    #[serde(with = "decimal::vec")]
    pub w_im: Vec<f64>,
    #[serde(with = "decimal::scalar")]
    pub weight: f64,
}

/// Dense complex matrix as separate real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixParts {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixParts {
    pub fn from_dmatrix(m: &DMatrix<C64>) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect();
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

/// A complex certificate `‖x‖^{2(n-k)} p_W(x,y) = Σ_φ w_φ p_{W̃}(φ,y) |⟨φ,x⟩|^{2n}` with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertBundle {
    pub d: usize,
    pub k: usize,
    pub ancilla: usize,
    pub n: usize,
    pub regime: Regime,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub bounds: BoundReport,
    pub design_degree: usize,
    pub design_atoms: usize,
    /// `W̃ = d[n+k] (Ψ ⊗ id)(W)` in the orthonormal basis.
    pub w_tilde: MatrixParts,
    /// Largest entry difference between the Ψ-matrix and Laplacian constructions of `W̃`.
    pub route_deviation: f64,
    pub sos_terms: Vec<SosTerm>,
    /// Smallest eigenvalue of any block `W̃_φ` over the design.
    pub min_design_eval: f64,
    /// Smallest value of `p_{W̃}` seen over design atoms and extra samples.
    pub min_eval: f64,
    /// Worst relative residual of the reconstruction identity.
    pub residual: f64,
    pub check_points: usize,
    pub positive: bool,
    /// Residual within tolerance, and positivity holds unless the regime is empirical.
    pub pass: bool,
}

/// `W̃ = d[n+k] (Ψ^{(n)}_{k→k} ⊗ id)(W)` via the materialized Ψ matrix.
pub fn transform<T: Scalar>(w: &BiForm<T>, n: usize) -> Result<BiForm<T>> {
    let psi = SymLinearMap::psi(n, w.k(), w.d(), Picture::Complex { ancilla: w.ancilla() })?.cast::<T>();
    let out = psi.apply_form(w)?;
    Ok(out.scale(&T::from_ratio(&sym_dim_q(w.d(), n + w.k()))))
}

/// `W̃` via `d[n+k] Σ_t q(n,k,t) ‖φ‖^{2(k-t)} ((k)_{k-t})^{-2} Δ^{k-t} p_W`.
pub fn transform_laplacian<T: Scalar>(w: &BiForm<T>, n: usize) -> Result<BiForm<T>> {
    let (d, k) = (w.d(), w.k());
    let mut acc = BiForm::zeros(d, k, w.ancilla());
    for t in 0..=k {
        let q = T::from_ratio(&coeff_q(n, k, t, d)?);
        acc = acc.add(&w.partial_trace(k - t)?.trace_adjoint(k)?.scale(&q));
    }
    Ok(acc.scale(&T::from_ratio(&sym_dim_q(d, n + k))))
}

fn hermitian_block(b: &[Vec<C64>]) -> DMatrix<C64> {
    let n = b.len();
    let m = DMatrix::from_fn(n, n, |i, j| b[i][j]);
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// `min_y p(x, y)` over unit `y`, i.e. the smallest eigenvalue of the `x`-block.
fn block_min(form: &BiForm<C64>, x: &[C64]) -> f64 {
    let b = hermitian_block(&form.x_block(x));
    b.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn build_certificate<T: Scalar>(w: &BiForm<T>, opts: &CertOptions, design: Option<&SphericalDesign>) -> Result<CertBundle> {
    if !w.is_hermitian() {
        return Err(Error::NotHermitian(format!("defect {:.3e}", w.hermiticity_defect())));
    }
    let (d, k, dd) = (w.d(), w.k(), w.ancilla());
    if k == 0 {
        return Err(Error::InvalidParameter("certificate needs k >= 1".into()));
    }
    let (m, big_m) = match (opts.m, opts.big_m) {
        (Some(m), Some(big_m)) => (m, big_m),
        (m, big_m) => {
            let est = estimate_extrema(w, &opts.extrema);
            (m.unwrap_or(est.min), big_m.unwrap_or(est.max))
        }
    };
    if !(m > 0.0) {
        return Err(Error::NotPositive(m));
    }
    let bounds = bound_n_complex(d, k, m, big_m, opts.n_max)?;
    let n = opts.n.unwrap_or_else(|| bounds.recommended());
    if n < k {
        return Err(Error::InvalidParameter(format!("n = {n} must be at least k = {k}")));
    }
    let proven_at = bounds.numeric.unwrap_or(bounds.general);
    let regime = if n >= proven_at { Regime::Proven } else { Regime::Empirical };

    let owned;
    let design = match design {
        Some(dz) => dz,
        None => {
            let dir = default_cache_dir();
            owned = if opts.require_cached_design {
                cached_design_strict(dir.as_deref(), d, n + k)?
            } else {
                cached_design(dir.as_deref(), d, n + k)?
            };
            &owned
        }
    };
    if design.d != d {
        return Err(Error::DimensionMismatch { expected: d, got: design.d });
    }
    if design.degree < n + k {
        return Err(Error::DesignDegree { have: design.degree, need: n + k });
    }

    let wt_exact = transform(w, n)?;
    let wt_lap = transform_laplacian(w, n)?;
    let wt = wt_exact.to_c64();
    let route_deviation = wt.matrix().frobenius_distance(wt_lap.to_c64().matrix());

    let blocks: Vec<DMatrix<C64>> = design.atoms.par_iter().map(|a| hermitian_block(&wt.x_block(&a.vector))).collect();
    let eig: Vec<_> = blocks.par_iter().map(|b| b.clone().symmetric_eigen()).collect();
    let min_design_eval = eig.iter().flat_map(|e| e.eigenvalues.iter().copied()).fold(f64::INFINITY, f64::min);
    let mut sos_terms = Vec::new();
    for (atom, e) in design.atoms.iter().zip(&eig) {
        for (i, &lambda) in e.eigenvalues.iter().enumerate() {
            let lambda = if (-EIG_CLIP..0.0).contains(&lambda) { 0.0 } else { lambda };
            if lambda == 0.0 {
                continue;
            }
            let v = e.eigenvectors.column(i);
            sos_terms.push(SosTerm {
                phi_re: atom.vector.iter().map(|z| z.re).collect(),
                phi_im: atom.vector.iter().map(|z| z.im).collect(),
                w_re: v.iter().map(|z| z.re).collect(),
                w_im: v.iter().map(|z| z.im).collect(),
                weight: atom.weight * lambda,
            });
        }
    }

    let mut rng = seeded(opts.seed);
    let extra: Vec<Vec<C64>> = (0..opts.extra_samples).map(|_| complex_sphere(&mut rng, d)).collect();
    let min_extra = extra.par_iter().map(|x| block_min(&wt, x)).reduce(|| f64::INFINITY, f64::min);
    let min_eval = min_design_eval.min(min_extra);
    let positive = min_eval >= -POSITIVITY_TOL;

    let wf = w.to_c64();
    let points: Vec<(Vec<C64>, Vec<C64>)> =
        (0..opts.check_points).map(|_| (complex_gaussian(&mut rng, d), complex_gaussian(&mut rng, dd))).collect();
    let residual = points
        .par_iter()
        .map(|(x, y)| {
            let lhs = norm_c(x).powi(2 * (n - k) as i32) * wf.eval(x, y).re;
            let rhs: f64 = design
                .atoms
                .iter()
                .zip(&blocks)
                .map(|(a, b)| {
                    let py = (y.iter().enumerate())
                        .map(|(i, yi)| y.iter().enumerate().map(|(j, yj)| yi.conj() * b[(i, j)] * yj).sum::<C64>())
                        .sum::<C64>()
                        .re;
                    a.weight * py * inner_c(&a.vector, x).norm_sqr().powi(n as i32)
                })
                .sum();
            ((lhs - rhs) / lhs.abs().max(f64::MIN_POSITIVE)).abs()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);

    let identity_ok = residual <= RESIDUAL_TOL;
    let pass = identity_ok && (positive || regime == Regime::Empirical);
    Ok(CertBundle {
        d,
        k,
        ancilla: dd,
        n,
        regime,
        m,
        big_m,
        bounds,
        design_degree: design.degree,
        design_atoms: design.atoms.len(),
        w_tilde: MatrixParts::from_dmatrix(HermOp::from_biform(&wt)?.entries()),
        route_deviation,
        sos_terms,
        min_design_eval,
        min_eval,
        residual,
        check_points: opts.check_points,
        positive,
        pass,
    })
}
