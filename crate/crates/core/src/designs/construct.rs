use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::laguerre::laguerre_nodes;
use crate::combinat::{factorial, sym_dim};
use crate::error::{Error, Result};
use crate::sampling::{complex_gaussian, complex_sphere, inner_c, norm_c, seeded};
use crate::scalar::{ratio_to_f64, C64};
use crate::symspace::SymBasis;

/// Atoms `α_st = sqrt(β_s) e^{2πit/m}` with weights `w_s/m`, so that
/// `Σ w conj(α)^j α^l = j! δ_jl` for `j, l < m`.
pub fn moment_atoms(m: usize) -> Result<Vec<(C64, f64)>> {
    let lag = laguerre_nodes(m)?;
    let mut out = Vec::with_capacity(m * m);
    for (b, w) in lag.roots.iter().zip(&lag.weights) {
        for t in 0..m {
            let phase = 2.0 * PI * t as f64 / m as f64;
            out.push((C64::from_polar(b.sqrt(), phase), w / m as f64));
        }
    }
    Ok(out)
}

/// `M_jl = Σ w conj(α)^j α^l` for `j, l < size`.
pub fn moment_matrix(atoms: &[(C64, f64)], size: usize) -> DMatrix<C64> {
    DMatrix::from_fn(size, size, |j, l| {
        atoms.iter().map(|(a, w)| a.conj().powu(j as u32) * a.powu(l as u32) * *w).sum()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "AtomJson", into = "AtomJson")]
pub struct DesignAtom {
    pub vector: Vec<C64>,
    pub weight: f64,
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    v_re: Vec<f64>,
    v_im: Vec<f64>,
    w: f64,
}

impl From<AtomJson> for DesignAtom {
    fn from(a: AtomJson) -> Self {
        Self { vector: a.v_re.iter().zip(&a.v_im).map(|(&r, &i)| C64::new(r, i)).collect(), weight: a.w }
    }
}

impl From<DesignAtom> for AtomJson {
    fn from(a: DesignAtom) -> Self {
        Self { v_re: a.vector.iter().map(|z| z.re).collect(), v_im: a.vector.iter().map(|z| z.im).collect(), w: a.weight }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    #[default]
    Laguerre,
    External,
}

/// Weighted unit vectors with `d[n] Σ w |u⟩⟨u|^{⊗n} = P_sym`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalDesign {
    pub d: usize,
    pub degree: usize,
    pub atoms: Vec<DesignAtom>,
    #[serde(default)]
    pub construction: Construction,
}

/// Unnormalized design `P_sym = Σ p |γ⟩⟨γ|^{⊗n}` with non-unit `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawDesign {
    pub d: usize,
    pub degree: usize,
    pub atoms: Vec<DesignAtom>,
}

/// Product atoms `γ = (α_{i_1}, …, α_{i_d})`, `p = Π w_{i_l} / n!`, from `m = n + 1` nodes.
pub fn build_raw_design(d: usize, degree: usize) -> Result<RawDesign> {
    if d == 0 || degree == 0 {
        return Err(Error::InvalidParameter(format!("design needs d >= 1 and degree >= 1, got d = {d}, degree = {degree}")));
    }
    let one = moment_atoms(degree + 1)?;
    let count = one.len().checked_pow(d as u32).ok_or_else(|| Error::Overflow("design atom count".into()))?;
    let nf = ratio_to_f64(&factorial(degree).into());
    let atoms = (0..count)
        .map(|mut idx| {
            let mut vector = Vec::with_capacity(d);
            let mut p = 1.0 / nf;
            for _ in 0..d {
                let (a, w) = one[idx % one.len()];
                idx /= one.len();
                vector.push(a);
                p *= w;
            }
            DesignAtom { vector, weight: p }
        })
        .collect();
    Ok(RawDesign { d, degree, atoms })
}

impl RawDesign {
    /// `u = γ/‖γ‖`, `w = p ‖γ‖^{2n} / d[n]`; zero vectors are dropped.
    pub fn normalize(&self) -> Result<SphericalDesign> {
        let dn = sym_dim(self.d, self.degree)? as f64;
        let atoms = self
            .atoms
            .iter()
            .filter_map(|a| {
                let r = norm_c(&a.vector);
                (r > 0.0).then(|| DesignAtom {
                    vector: a.vector.iter().map(|z| z / r).collect(),
                    weight: a.weight * r.powi(2 * self.degree as i32) / dn,
                })
            })
            .collect();
        Ok(SphericalDesign { d: self.d, degree: self.degree, atoms, construction: Construction::Laguerre })
    }
}

pub fn build_design(d: usize, degree: usize) -> Result<SphericalDesign> {
    build_raw_design(d, degree)?.normalize()
}

/// Outcome of checking the defining identity of a design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub d: usize,
    pub degree: usize,
    pub atoms: usize,
    /// `‖d[n] Σ w U^{⊗n} - P_sym‖_F` in the orthonormal symmetric basis.
    pub frobenius: f64,
    pub weight_sum: f64,
    pub min_weight: f64,
    /// Worst relative residual of `‖y‖^{2n} = d[n] Σ w |⟨u,y⟩|^{2n}` at random `y`.
    pub hilbert_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `Σ_i c_i v_i v_i^*` with `v_i = (sqrt(n!/α!) x_i^α)_α`.
fn moment_operator(d: usize, degree: usize, atoms: &[DesignAtom]) -> DMatrix<C64> {
    let basis = SymBasis::shared(d, degree);
    let s: Vec<f64> = basis.iter().map(|a| ratio_to_f64(&a.multinomial().into()).sqrt()).collect();
    let dim = basis.len();
    let partials: Vec<DMatrix<C64>> = atoms
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            for atom in chunk {
                let v = DVector::from_iterator(dim, basis.monomials(&atom.vector).into_iter().zip(&s).map(|(m, s)| m * *s));
                acc += (&v * v.adjoint()) * C64::new(atom.weight, 0.0);
            }
            acc
        })
        .collect();
    partials.into_iter().fold(DMatrix::zeros(dim, dim), |a, b| a + b)
}

impl RawDesign {
    /// `‖Σ p |γ⟩⟨γ|^{⊗n} - P_sym‖_F`.
    pub fn frobenius_deviation(&self) -> f64 {
        let m = moment_operator(self.d, self.degree, &self.atoms);
        (&m - DMatrix::<C64>::identity(m.nrows(), m.ncols())).norm()
    }
}

pub fn verify_design(design: &SphericalDesign, tolerance: f64, seed: u64) -> Result<DesignReport> {
    let (d, n) = (design.d, design.degree);
    let dn = sym_dim(d, n)? as f64;
    if design.atoms.iter().any(|a| a.vector.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: design.atoms.iter().map(|a| a.vector.len()).find(|&l| l != d).unwrap() });
    }
    let m = moment_operator(d, n, &design.atoms) * C64::new(dn, 0.0);
    let frobenius = (&m - DMatrix::<C64>::identity(m.nrows(), m.ncols())).norm();
    let weight_sum: f64 = design.atoms.iter().map(|a| a.weight).sum();
    let min_weight = design.atoms.iter().map(|a| a.weight).fold(f64::INFINITY, f64::min);
    let mut rng = seeded(seed);
    let ys: Vec<Vec<C64>> = (0..20).map(|_| complex_gaussian(&mut rng, d)).collect();
    let hilbert_residual = ys
        .iter()
        .map(|y| {
            let lhs = norm_c(y).powi(2 * n as i32);
            let rhs: f64 = design.atoms.iter().map(|a| a.weight * inner_c(&a.vector, y).norm_sqr().powi(n as i32)).sum::<f64>() * dn;
            ((lhs - rhs) / lhs).abs()
        })
        .fold(0.0, f64::max);
    let pass = frobenius <= tolerance && (weight_sum - 1.0).abs() <= tolerance.max(1e-10) && min_weight >= 0.0;
    Ok(DesignReport {
        d,
        degree: n,
        atoms: design.atoms.len(),
        frobenius,
        weight_sum,
        min_weight,
        hilbert_residual,
        tolerance,
        pass,
    })
}

/// `N` Haar-random unit vectors with equal weights; satisfies the design identity only on average.
pub fn monte_carlo_design(d: usize, degree: usize, samples: usize, seed: u64) -> SphericalDesign {
    let mut rng = seeded(seed);
    let w = 1.0 / samples as f64;
    let atoms = (0..samples).map(|_| DesignAtom { vector: complex_sphere(&mut rng, d), weight: w }).collect();
    SphericalDesign { d, degree, atoms, construction: Construction::External }
}

impl SphericalDesign {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }
}

/// Directory holding cached designs, from `RZNK_CACHE_DIR` when set.
pub fn default_cache_dir() -> Option<PathBuf> {
    std::env::var_os("RZNK_CACHE_DIR").map(PathBuf::from)
}

fn cache_path(dir: &Path, d: usize, degree: usize) -> PathBuf {
    dir.join(format!("design_d{d}_n{degree}.json"))
}

/// Load the Laguerre design for `(d, degree)` from `dir`, building and storing it on a miss.
pub fn cached_design(dir: Option<&Path>, d: usize, degree: usize) -> Result<SphericalDesign> {
    let Some(dir) = dir else {
        return build_design(d, degree);
    };
    let path = cache_path(dir, d, degree);
    if path.exists() {
        let design = SphericalDesign::read(&path)?;
        if design.d == d && design.degree == degree {
            return Ok(design);
        }
    }
    let design = build_design(d, degree)?;
    std::fs::create_dir_all(dir)?;
    design.write(&path)?;
    Ok(design)
}

/// Load the design for `(d, degree)` from `dir` without building it on a miss.
pub fn cached_design_strict(dir: Option<&Path>, d: usize, degree: usize) -> Result<SphericalDesign> {
    let Some(dir) = dir else {
        return Err(Error::DesignCacheMiss("RZNK_CACHE_DIR is not set".into()));
    };
    let path = cache_path(dir, d, degree);
    if !path.exists() {
        return Err(Error::DesignCacheMiss(path.display().to_string()));
    }
    let design = SphericalDesign::read(&path)?;
    if design.d != d || design.degree != degree {
        return Err(Error::DesignCacheMiss(format!("{} holds d = {}, degree = {}", path.display(), design.d, design.degree)));
    }
    Ok(design)
}
