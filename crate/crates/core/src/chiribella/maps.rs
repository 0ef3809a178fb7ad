//! Linear maps between symmetric spaces, materialized as matrices.
//!
//! Complex maps act on monomial-coefficient matrices of bi-Hermitian forms,
//! vectorized row-major: the entry `(α,i),(β,j)` of a form on `∨^k C^d ⊗ C^D`
//! sits at `(pos(α)·D + i)·N + pos(β)·D + j` with `N = d[k]·D`.
//! Real maps act on coefficient vectors of [`RealSymPoly`].

use std::collections::HashMap;

use num::traits::{One, Zero};
use num::BigInt;
use rayon::prelude::*;

use super::coeffs::{coeff_c, coeff_c_real, coeff_q, coeff_q_real, qd};
use crate::combinat::{factorial, falling, odd_double_factorial, real_dim_const};
use crate::designs::SphericalDesign;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{qb, ratio_to_f64, Rational, Scalar, C64};
use crate::symspace::{tensor, BiForm, RealSymPoly, SymBasis, SymIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    /// Operators on `∨^k C^d ⊗ C^D`.
    Complex { ancilla: usize },
    /// Vectors of `∨^{2k} R^d`.
    Real,
}

/// How partial traces are evaluated while assembling a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceRoute {
    Laplacian,
    Contraction,
}

/// Exact constructions of the measure-and-prepare map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MpRoute {
    /// `Σ_s c(n,k,s) tr*_{s→k} ∘ tr_{n→s}`.
    Chiribella,
    /// Closed-form Haar moments of the defining integral.
    HaarMoments,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymLinearMap<T> {
    pub d: usize,
    pub k_in: usize,
    pub k_out: usize,
    pub picture: Picture,
    pub matrix: Matrix<T>,
}

/// Length of the coefficient vector of degree `k` in the given picture.
pub fn space_dim(d: usize, k: usize, picture: Picture) -> usize {
    match picture {
        Picture::Complex { ancilla } => {
            let n = SymBasis::shared(d, k).len() * ancilla;
            n * n
        }
        Picture::Real => SymBasis::shared(d, 2 * k).len(),
    }
}

type CTerms = HashMap<(SymIndex, usize, SymIndex, usize), Rational>;
type RTerms = HashMap<SymIndex, Rational>;

fn c_laplacian(terms: &CTerms, d: usize) -> CTerms {
    let mut out = CTerms::new();
    for ((a, i, b, j), v) in terms {
        for l in 0..d {
            let (ea, eb) = (a.exponents()[l], b.exponents()[l]);
            if ea > 0 && eb > 0 {
                let key = (a.minus_unit(l).unwrap(), *i, b.minus_unit(l).unwrap(), *j);
                *out.entry(key).or_insert_with(Rational::zero) += v * Rational::from_integer(BigInt::from(ea * eb));
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn c_mul_norm(terms: &CTerms, d: usize) -> CTerms {
    let mut out = CTerms::new();
    for ((a, i, b, j), v) in terms {
        for l in 0..d {
            *out.entry((a.plus_unit(l), *i, b.plus_unit(l), *j)).or_insert_with(Rational::zero) += v;
        }
    }
    out
}

fn r_laplacian(terms: &RTerms, d: usize) -> RTerms {
    let mut out = RTerms::new();
    for (a, v) in terms {
        for l in 0..d {
            let e = a.exponents()[l];
            if e >= 2 {
                let key = a.minus_unit(l).unwrap().minus_unit(l).unwrap();
                *out.entry(key).or_insert_with(Rational::zero) += v * Rational::from_integer(BigInt::from(e * (e - 1)));
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn r_mul_norm(terms: &RTerms, d: usize) -> RTerms {
    let mut out = RTerms::new();
    for (a, v) in terms {
        for l in 0..d {
            *out.entry(a.plus_unit(l).plus_unit(l)).or_insert_with(Rational::zero) += v;
        }
    }
    out
}

fn scale_terms<K: std::hash::Hash + Eq>(terms: &mut HashMap<K, Rational>, s: &Rational) {
    for v in terms.values_mut() {
        *v *= s;
    }
}

fn merge<K: std::hash::Hash + Eq>(into: &mut HashMap<K, Rational>, from: HashMap<K, Rational>) {
    for (k, v) in from {
        *into.entry(k).or_insert_with(Rational::zero) += v;
    }
}

/// Assemble a complex map column by column from its action on unit coefficient matrices.
fn assemble_complex<F>(d: usize, k_in: usize, k_out: usize, ancilla: usize, f: F) -> Matrix<Rational>
where
    F: Fn(CTerms) -> CTerms + Sync,
{
    let bin = SymBasis::shared(d, k_in);
    let bout = SymBasis::shared(d, k_out);
    let (nin, nout) = (bin.len() * ancilla, bout.len() * ancilla);
    let columns: Vec<Vec<(usize, Rational)>> = (0..nin * nin)
        .into_par_iter()
        .map(|col| {
            let (r, c) = (col / nin, col % nin);
            let key = (bin.index(r / ancilla).clone(), r % ancilla, bin.index(c / ancilla).clone(), c % ancilla);
            let out = f(CTerms::from([(key, Rational::one())]));
            out.into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|((a, i, b, j), v)| {
                    let row = bout.position(&a).unwrap() * ancilla + i;
                    let colo = bout.position(&b).unwrap() * ancilla + j;
                    (row * nout + colo, v)
                })
                .collect()
        })
        .collect();
    let mut m = Matrix::zeros(nout * nout, nin * nin);
    for (col, entries) in columns.into_iter().enumerate() {
        for (row, v) in entries {
            m.set(row, col, v);
        }
    }
    m
}

fn assemble_real<F>(d: usize, k_in: usize, k_out: usize, f: F) -> Matrix<Rational>
where
    F: Fn(RTerms) -> RTerms + Sync,
{
    let bin = SymBasis::shared(d, 2 * k_in);
    let bout = SymBasis::shared(d, 2 * k_out);
    let columns: Vec<Vec<(usize, Rational)>> = (0..bin.len())
        .into_par_iter()
        .map(|col| {
            let out = f(RTerms::from([(bin.index(col).clone(), Rational::one())]));
            out.into_iter().filter(|(_, v)| !v.is_zero()).map(|(a, v)| (bout.position(&a).unwrap(), v)).collect()
        })
        .collect();
    let mut m = Matrix::zeros(bout.len(), bin.len());
    for (col, entries) in columns.into_iter().enumerate() {
        for (row, v) in entries {
            m.set(row, col, v);
        }
    }
    m
}

/// `Σ_s coeff(s) tr*_{s→k_out} ∘ tr_{k_in→s}` in either picture.
fn trace_family(d: usize, k_in: usize, k_out: usize, picture: Picture, coeffs: &[(usize, Rational)]) -> Matrix<Rational> {
    match picture {
        Picture::Complex { ancilla } => assemble_complex(d, k_in, k_out, ancilla, |unit| {
            let mut out = CTerms::new();
            let mut cur = unit;
            let mut level = k_in;
            let mut sorted: Vec<&(usize, Rational)> = coeffs.iter().collect();
            sorted.sort_by(|a, b| b.0.cmp(&a.0));
            for (s, c) in sorted {
                while level > *s {
                    cur = c_laplacian(&cur, d);
                    level -= 1;
                }
                if c.is_zero() {
                    continue;
                }
                let f = falling(k_in, k_in - s);
                let mut term = cur.clone();
                scale_terms(&mut term, &(c / qb(f.clone() * f)));
                for _ in *s..k_out {
                    term = c_mul_norm(&term, d);
                }
                merge(&mut out, term);
            }
            out
        }),
        Picture::Real => assemble_real(d, k_in, k_out, |unit| {
            let mut out = RTerms::new();
            let mut cur = unit;
            let mut level = k_in;
            let mut sorted: Vec<&(usize, Rational)> = coeffs.iter().collect();
            sorted.sort_by(|a, b| b.0.cmp(&a.0));
            for (s, c) in sorted {
                while level > *s {
                    cur = r_laplacian(&cur, d);
                    level -= 1;
                }
                if c.is_zero() {
                    continue;
                }
                let f = falling(2 * k_in, 2 * (k_in - s));
                let mut term = cur.clone();
                scale_terms(&mut term, &(c / qb(f)));
                for _ in *s..k_out {
                    term = r_mul_norm(&term, d);
                }
                merge(&mut out, term);
            }
            out
        }),
    }
}

impl SymLinearMap<Rational> {
    fn new(d: usize, k_in: usize, k_out: usize, picture: Picture, matrix: Matrix<Rational>) -> Self {
        Self { d, k_in, k_out, picture, matrix }
    }

    /// `tr_{k→k-t}`.
    pub fn trace(d: usize, k: usize, t: usize, picture: Picture, route: TraceRoute) -> Result<Self> {
        if t > k {
            return Err(Error::InvalidParameter(format!("partial trace of {t} out of k = {k}")));
        }
        let m = match route {
            TraceRoute::Laplacian => trace_family(d, k, k - t, picture, &[(k - t, Rational::one())]),
            TraceRoute::Contraction => match picture {
                Picture::Complex { ancilla } => contraction_complex(d, k, k - t, ancilla, |f| tensor::partial_trace(f, t))?,
                Picture::Real => contraction_real(d, k, k - t, |p| tensor::real_partial_trace(p, t))?,
            },
        };
        Ok(Self::new(d, k, k - t, picture, m))
    }

    /// `tr*_{k→n}`.
    pub fn trace_adjoint(d: usize, k: usize, n: usize, picture: Picture, route: TraceRoute) -> Result<Self> {
        if n < k {
            return Err(Error::InvalidParameter(format!("trace adjoint from k = {k} to n = {n}")));
        }
        let m = match route {
            TraceRoute::Laplacian => trace_family(d, k, n, picture, &[(k, Rational::one())]),
            TraceRoute::Contraction => match picture {
                Picture::Complex { ancilla } => contraction_complex(d, k, n, ancilla, |f| tensor::trace_adjoint(f, n))?,
                Picture::Real => contraction_real(d, k, n, |p| tensor::real_trace_adjoint(p, n))?,
            },
        };
        Ok(Self::new(d, k, n, picture, m))
    }

    /// `Φ^{(n)}_{k→k} = Σ_s c(n,k,s) tr*_{s→k} ∘ tr_{k→s}` (or `c_R` in the real picture).
    pub fn phi(n: usize, k: usize, d: usize, picture: Picture) -> Result<Self> {
        if n < k {
            return Err(Error::InvalidParameter(format!("Φ needs n >= k, got n = {n}, k = {k}")));
        }
        let coeffs: Vec<(usize, Rational)> = (0..=k)
            .map(|s| {
                let c = match picture {
                    Picture::Complex { .. } => coeff_c(n, k, s),
                    Picture::Real => coeff_c_real(n, k, s),
                };
                c.map(|c| (s, c))
            })
            .collect::<Result<_>>()?;
        Ok(Self::new(d, k, k, picture, trace_family(d, k, k, picture, &coeffs)))
    }

    /// `Ψ^{(n)}_{k→k} = Σ_t q(n,k,t) tr*_{t→k} ∘ tr_{k→t}` (or `q_R` in the real picture).
    pub fn psi(n: usize, k: usize, d: usize, picture: Picture) -> Result<Self> {
        let coeffs: Vec<(usize, Rational)> = (0..=k)
            .map(|t| {
                let q = match picture {
                    Picture::Complex { .. } => coeff_q(n, k, t, d),
                    Picture::Real => coeff_q_real(n, k, t, d),
                };
                q.map(|q| (t, q))
            })
            .collect::<Result<_>>()?;
        Ok(Self::new(d, k, k, picture, trace_family(d, k, k, picture, &coeffs)))
    }

    /// Measure-and-prepare map `MP_{n→k}` (`MP^R_{n→k}` in the real picture).
    pub fn mp(n: usize, k: usize, d: usize, picture: Picture, route: MpRoute) -> Result<Self> {
        let m = match route {
            MpRoute::Chiribella => {
                let coeffs: Vec<(usize, Rational)> = (0..=n.min(k))
                    .map(|s| {
                        let c = match picture {
                            Picture::Complex { .. } => coeff_c(n, k, s),
                            Picture::Real => coeff_c_real(n, k, s),
                        };
                        c.map(|c| (s, c))
                    })
                    .collect::<Result<_>>()?;
                trace_family(d, n, k, picture, &coeffs)
            }
            MpRoute::HaarMoments => match picture {
                Picture::Complex { ancilla } => mp_haar_complex(n, k, d, ancilla),
                Picture::Real => mp_haar_real(n, k, d),
            },
        };
        Ok(Self::new(d, n, k, picture, m))
    }

    /// `Clone_{k→n} = (d[k]/d[n]) tr*_{k→n}` (complex picture).
    pub fn clone_map(k: usize, n: usize, d: usize, ancilla: usize) -> Result<Self> {
        let t = Self::trace_adjoint(d, k, n, Picture::Complex { ancilla }, TraceRoute::Laplacian)?;
        Ok(t.scale(&(qd(d, k) / qd(d, n))))
    }

    /// Convert every entry to another scalar type.
    pub fn cast<S: Scalar>(&self) -> SymLinearMap<S> {
        SymLinearMap { d: self.d, k_in: self.k_in, k_out: self.k_out, picture: self.picture, matrix: self.matrix.cast() }
    }
}

fn contraction_complex<F>(d: usize, k_in: usize, k_out: usize, ancilla: usize, f: F) -> Result<Matrix<Rational>>
where
    F: Fn(&BiForm<Rational>) -> Result<BiForm<Rational>> + Sync,
{
    let nin = SymBasis::shared(d, k_in).len() * ancilla;
    let nout = SymBasis::shared(d, k_out).len() * ancilla;
    let cols: Vec<Vec<Rational>> = (0..nin * nin)
        .into_par_iter()
        .map(|col| {
            let mut unit = Matrix::zeros(nin, nin);
            unit.set(col / nin, col % nin, Rational::one());
            let form = BiForm::from_matrix(d, k_in, ancilla, unit)?;
            Ok(f(&form)?.matrix().data().to_vec())
        })
        .collect::<Result<_>>()?;
    let mut m = Matrix::zeros(nout * nout, nin * nin);
    for (c, col) in cols.into_iter().enumerate() {
        for (r, v) in col.into_iter().enumerate() {
            m.set(r, c, v);
        }
    }
    Ok(m)
}

fn contraction_real<F>(d: usize, k_in: usize, k_out: usize, f: F) -> Result<Matrix<Rational>>
where
    F: Fn(&RealSymPoly<Rational>) -> Result<RealSymPoly<Rational>> + Sync,
{
    let nin = SymBasis::shared(d, 2 * k_in).len();
    let nout = SymBasis::shared(d, 2 * k_out).len();
    let cols: Vec<Vec<Rational>> = (0..nin)
        .into_par_iter()
        .map(|col| {
            let mut unit = vec![Rational::zero(); nin];
            unit[col] = Rational::one();
            Ok(f(&RealSymPoly::from_coeffs(d, k_in, unit)?)?.coeffs().to_vec())
        })
        .collect::<Result<_>>()?;
    let mut m = Matrix::zeros(nout, nin);
    for (c, col) in cols.into_iter().enumerate() {
        for (r, v) in col.into_iter().enumerate() {
            m.set(r, c, v);
        }
    }
    Ok(m)
}

/// `∫ conj(φ)^a φ^a dφ = a!(d-1)!/(|a|+d-1)!` over the complex unit sphere.
pub fn haar_moment(a: &SymIndex) -> Rational {
    let d = a.dim();
    Rational::new(a.factorial_product() * factorial(d - 1), factorial(a.degree() + d - 1))
}

/// `∫ φ^a dφ` over the real unit sphere: zero unless every exponent is even,
/// otherwise `Π (a_i - 1)!! / Π_{j<|a|/2} (d + 2j)`.
pub fn real_sphere_moment(a: &SymIndex) -> Rational {
    if a.exponents().iter().any(|e| e % 2 == 1) {
        return Rational::zero();
    }
    let d = a.dim();
    let num: BigInt = a.exponents().iter().map(|&e| odd_double_factorial(e as usize / 2)).product();
    let den: BigInt = (0..a.degree() / 2).map(|j| BigInt::from(d + 2 * j)).product();
    Rational::new(num, den)
}

fn mp_haar_complex(n: usize, k: usize, d: usize, ancilla: usize) -> Matrix<Rational> {
    let bin = SymBasis::shared(d, n);
    let bout = SymBasis::shared(d, k);
    let (nin, nout) = (bin.len() * ancilla, bout.len() * ancilla);
    let scale = qd(d, n + k);
    let multi: Vec<Rational> = bout.iter().map(|g| qb(g.multinomial())).collect();
    let rows: Vec<Vec<(usize, Rational)>> = (0..bout.len() * bout.len())
        .into_par_iter()
        .map(|gd| {
            let (g, dl) = (gd / bout.len(), gd % bout.len());
            let (gamma, delta) = (bout.index(g), bout.index(dl));
            let pref = &scale * &multi[g] * &multi[dl];
            let mut out = Vec::new();
            for (a, alpha) in bin.iter().enumerate() {
                let ad = alpha.sum(delta);
                // β = α + δ - γ must be a valid index
                let Some(beta) = ad.checked_sub(gamma) else { continue };
                let b = bin.position(&beta).unwrap();
                out.push(((a, b), &pref * haar_moment(&ad)));
            }
            out.into_iter().map(|((a, b), v)| (a * bin.len() + b, v)).collect()
        })
        .collect();
    let mut m = Matrix::zeros(nout * nout, nin * nin);
    for (gd, entries) in rows.into_iter().enumerate() {
        let (g, dl) = (gd / bout.len(), gd % bout.len());
        for (ab, v) in entries {
            let (a, b) = (ab / bin.len(), ab % bin.len());
            for i in 0..ancilla {
                for j in 0..ancilla {
                    let row = (g * ancilla + i) * nout + dl * ancilla + j;
                    let col = (a * ancilla + i) * nin + b * ancilla + j;
                    m.set(row, col, v.clone());
                }
            }
        }
    }
    m
}

fn mp_haar_real(n: usize, k: usize, d: usize) -> Matrix<Rational> {
    let bin = SymBasis::shared(d, 2 * n);
    let bout = SymBasis::shared(d, 2 * k);
    let scale = real_dim_const(d, n + k);
    let rows: Vec<Vec<Rational>> = bout
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|gamma| {
            let pref = &scale * qb(gamma.multinomial());
            bin.iter().map(|alpha| &pref * real_sphere_moment(&alpha.sum(gamma))).collect()
        })
        .collect();
    Matrix::from_vec(bout.len(), bin.len(), rows.into_iter().flatten().collect())
}

impl<T: Scalar> SymLinearMap<T> {
    pub fn in_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.k_out != self.k_in || other.picture != self.picture || other.d != self.d {
            return Err(Error::DimensionMismatch { expected: self.in_dim(), got: other.out_dim() });
        }
        Ok(Self {
            d: self.d,
            k_in: other.k_in,
            k_out: self.k_out,
            picture: self.picture,
            matrix: self.matrix.matmul(&other.matrix),
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { matrix: self.matrix.scale(s), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.add(&other.matrix), ..self.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// Hilbert–Schmidt weights of the coefficient coordinates at degree `k`.
    fn hs_weights(&self, k: usize) -> Vec<Rational> {
        match self.picture {
            Picture::Complex { ancilla } => {
                let b = SymBasis::shared(self.d, k);
                let kf = factorial(k);
                let w: Vec<Rational> =
                    b.iter().map(|a| Rational::new(a.factorial_product(), kf.clone())).collect();
                let n = b.len() * ancilla;
                (0..n * n).map(|e| &w[(e / n) / ancilla] * &w[(e % n) / ancilla]).collect()
            }
            Picture::Real => {
                let b = SymBasis::shared(self.d, 2 * k);
                let f = factorial(2 * k);
                b.iter().map(|a| Rational::new(a.factorial_product(), f.clone())).collect()
            }
        }
    }

    /// Adjoint with respect to the Hilbert–Schmidt (or tensor) inner product:
    /// `A^† = G_in^{-1} A^* G_out` in coefficient coordinates.
    pub fn hs_adjoint(&self) -> Self {
        let gin = self.hs_weights(self.k_in);
        let gout = self.hs_weights(self.k_out);
        let mut m = Matrix::zeros(self.in_dim(), self.out_dim());
        for r in 0..self.out_dim() {
            for c in 0..self.in_dim() {
                let v = self.matrix.get(r, c);
                if v.is_zero() {
                    continue;
                }
                let w = T::from_ratio(&(&gout[r] / &gin[c]));
                m.set(c, r, v.conj() * w);
            }
        }
        Self { d: self.d, k_in: self.k_out, k_out: self.k_in, picture: self.picture, matrix: m }
    }

    /// Apply to the coefficient matrix of a bi-Hermitian form.
    pub fn apply_form(&self, form: &BiForm<T>) -> Result<BiForm<T>> {
        let Picture::Complex { ancilla } = self.picture else {
            return Err(Error::InvalidParameter("real map applied to a complex form".into()));
        };
        if form.d() != self.d || form.k() != self.k_in || form.ancilla() != ancilla {
            return Err(Error::DimensionMismatch { expected: self.in_dim(), got: form.matrix().data().len() });
        }
        let out = self.matrix.apply(form.matrix().data());
        let n = SymBasis::shared(self.d, self.k_out).len() * ancilla;
        BiForm::from_matrix(self.d, self.k_out, ancilla, Matrix::from_vec(n, n, out))
    }

    pub fn apply_poly(&self, p: &RealSymPoly<T>) -> Result<RealSymPoly<T>> {
        if self.picture != Picture::Real || p.d() != self.d || p.k() != self.k_in {
            return Err(Error::DimensionMismatch { expected: self.in_dim(), got: p.coeffs().len() });
        }
        RealSymPoly::from_coeffs(self.d, self.k_out, self.matrix.apply(p.coeffs()))
    }

    /// Matrix in the orthonormal basis `e_α ⊗ f_i` (complex picture, float).
    pub fn to_orthonormal(&self) -> Matrix<C64> {
        let Picture::Complex { ancilla } = self.picture else {
            return self.matrix.to_c64();
        };
        let scales = |k: usize| -> Vec<f64> {
            let b = SymBasis::shared(self.d, k);
            let s: Vec<f64> = b.iter().map(|a| ratio_to_f64(&qb(a.multinomial())).sqrt()).collect();
            let n = b.len() * ancilla;
            (0..n * n).map(|e| s[(e / n) / ancilla] * s[(e % n) / ancilla]).collect()
        };
        let (sin, sout) = (scales(self.k_in), scales(self.k_out));
        let mut m = self.matrix.to_c64();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let v = *m.get(r, c) * (sin[c] / sout[r]);
                m.set(r, c, v);
            }
        }
        m
    }
}

/// `MP_{n→k} ⊗ id_D` by quadrature over a spherical design of degree at least `n + k`.
pub fn mp_design(n: usize, k: usize, ancilla: usize, design: &SphericalDesign) -> Result<SymLinearMap<C64>> {
    if design.degree < n + k {
        return Err(Error::DesignDegree { have: design.degree, need: n + k });
    }
    let d = design.d;
    let bin = SymBasis::shared(d, n);
    let bout = SymBasis::shared(d, k);
    let big = SymBasis::shared(d, n + k);
    let (nin, nout) = (bin.len() * ancilla, bout.len() * ancilla);
    // G[a][b] = Σ_w w conj(φ^a) φ^b for every |a| = |b| = n + k
    let len = big.len();
    let gram: Vec<C64> = design
        .atoms
        .par_chunks(512)
        .map(|chunk| {
            let mut acc = vec![C64::new(0.0, 0.0); len * len];
            for atom in chunk {
                let mono = big.monomials(&atom.vector);
                for (a, ma) in mono.iter().enumerate() {
                    let wa = ma.conj() * atom.weight;
                    for (b, mb) in mono.iter().enumerate() {
                        acc[a * len + b] += wa * mb;
                    }
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(vec![C64::new(0.0, 0.0); len * len], |mut acc, part| {
            for (a, b) in acc.iter_mut().zip(part) {
                *a += b;
            }
            acc
        });
    let scale = ratio_to_f64(&qd(d, n + k));
    let multi: Vec<f64> = bout.iter().map(|g| ratio_to_f64(&qb(g.multinomial()))).collect();
    let mut m = Matrix::<C64>::zeros(nout * nout, nin * nin);
    for (g, gamma) in bout.iter().enumerate() {
        for (dl, delta) in bout.iter().enumerate() {
            for (a, alpha) in bin.iter().enumerate() {
                let ad = alpha.sum(delta);
                let pa = big.position(&ad).unwrap();
                for (b, beta) in bin.iter().enumerate() {
                    let bg = beta.sum(gamma);
                    let pb = big.position(&bg).unwrap();
                    let v = gram[pa * len + pb] * (scale * multi[g] * multi[dl]);
                    for i in 0..ancilla {
                        for j in 0..ancilla {
                            let row = (g * ancilla + i) * nout + dl * ancilla + j;
                            let col = (a * ancilla + i) * nin + b * ancilla + j;
                            m.set(row, col, v);
                        }
                    }
                }
            }
        }
    }
    Ok(SymLinearMap { d, k_in: n, k_out: k, picture: Picture::Complex { ancilla }, matrix: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    const C1: Picture = Picture::Complex { ancilla: 1 };

    #[test]
    fn moments_normalized() {
        assert_eq!(haar_moment(&SymIndex::new(vec![0, 0, 0])), qi(1));
        assert_eq!(haar_moment(&SymIndex::new(vec![1, 0])), Rational::new(1.into(), 2.into()));
        // ∫ x² over S² is 1/3
        assert_eq!(real_sphere_moment(&SymIndex::new(vec![2, 0, 0])), Rational::new(1.into(), 3.into()));
        assert_eq!(real_sphere_moment(&SymIndex::new(vec![1, 1, 0])), qi(0));
        // ∫ cos⁴ over S¹ is 3/8
        assert_eq!(real_sphere_moment(&SymIndex::new(vec![4, 0])), Rational::new(3.into(), 8.into()));
    }

    #[test]
    fn trace_routes_agree() {
        for d in 1..=3 {
            for k in 0..=3 {
                for t in 0..=k {
                    for pic in [C1, Picture::Complex { ancilla: 2 }, Picture::Real] {
                        if pic == (Picture::Complex { ancilla: 2 }) && d * k > 6 {
                            continue;
                        }
                        let a = SymLinearMap::trace(d, k, t, pic, TraceRoute::Laplacian).unwrap();
                        let b = SymLinearMap::trace(d, k, t, pic, TraceRoute::Contraction).unwrap();
                        assert_eq!(a, b, "d={d} k={k} t={t} {pic:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn trace_adjoint_is_hs_adjoint_of_trace() {
        for d in 1..=3 {
            for k in 0..=3 {
                for n in k..=3 {
                    for pic in [C1, Picture::Real] {
                        let tr = SymLinearMap::trace(d, n, n - k, pic, TraceRoute::Laplacian).unwrap();
                        let adj = SymLinearMap::trace_adjoint(d, k, n, pic, TraceRoute::Laplacian).unwrap();
                        assert_eq!(tr.hs_adjoint(), adj, "d={d} k={k} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn phi_psi_inverse_small() {
        for pic in [C1, Picture::Real] {
            let phi = SymLinearMap::phi(4, 2, 2, pic).unwrap();
            let psi = SymLinearMap::psi(4, 2, 2, pic).unwrap();
            assert!(phi.compose(&psi).unwrap().is_identity());
            assert!(psi.compose(&phi).unwrap().is_identity());
        }
    }

    #[test]
    fn mp_routes_agree() {
        for (n, k, d) in [(1, 1, 2), (2, 1, 2), (1, 2, 3), (3, 2, 2)] {
            for pic in [C1, Picture::Real] {
                let a = SymLinearMap::mp(n, k, d, pic, MpRoute::Chiribella).unwrap();
                let b = SymLinearMap::mp(n, k, d, pic, MpRoute::HaarMoments).unwrap();
                assert_eq!(a, b, "n={n} k={k} d={d} {pic:?}");
            }
        }
    }
}
