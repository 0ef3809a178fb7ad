//! Bi-Hermitian forms `p(x, y) = ⟨x^{⊗k} ⊗ y| W |x^{⊗k} ⊗ y⟩` stored by monomial coefficients.
//!
//! Row `(α, i)` and column `(β, j)` hold the coefficient of
//! `conj(x)^α conj(y_i) x^β y_j`. With the orthonormal symmetric basis
//! `⟨e_α, x^{⊗k}⟩ = sqrt(k!/α!) x^α`, this coefficient equals
//! `sqrt(k!/α!) sqrt(k!/β!) W[(α,i),(β,j)]`.
//!
//! The square roots cancel out of every partial trace, trace adjoint and
//! Hilbert–Schmidt pairing written in these coordinates, so exact rational
//! arithmetic is possible here but not in the orthonormal coordinates.

use std::sync::Arc;

use num::traits::Zero;

use super::index::{power_table, SymBasis, SymIndex};
use crate::combinat::{factorial, falling};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar, C64};

#[derive(Clone, Debug)]
pub struct BiForm<T> {
    d: usize,
    k: usize,
    ancilla: usize,
    basis: Arc<SymBasis>,
    coeffs: Matrix<T>,
}

impl<T: Scalar> PartialEq for BiForm<T> {
    fn eq(&self, other: &Self) -> bool {
        (self.d, self.k, self.ancilla) == (other.d, other.k, other.ancilla) && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> BiForm<T> {
    pub fn zeros(d: usize, k: usize, ancilla: usize) -> Self {
        let basis = SymBasis::shared(d, k);
        let n = basis.len() * ancilla;
        Self { d, k, ancilla, basis, coeffs: Matrix::zeros(n, n) }
    }

    pub fn from_matrix(d: usize, k: usize, ancilla: usize, coeffs: Matrix<T>) -> Result<Self> {
        let basis = SymBasis::shared(d, k);
        let n = basis.len() * ancilla;
        if coeffs.rows() != n || coeffs.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: coeffs.rows() });
        }
        Ok(Self { d, k, ancilla, basis, coeffs })
    }

    /// `‖x‖^{2k}` with the identity on the ancilla: the form of `I`.
    pub fn norm_power(d: usize, k: usize, ancilla: usize) -> Self {
        let mut out = Self::zeros(d, 0, ancilla);
        for i in 0..ancilla {
            out.coeffs.set(i, i, T::one());
        }
        for _ in 0..k {
            out = out.mul_norm_sq();
        }
        out
    }

    /// Build from terms `value · x^alpha conj(x)^beta y_i conj(y_j)`.
    pub fn from_terms<I>(d: usize, k: usize, ancilla: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SymIndex, SymIndex, usize, usize, T)>,
    {
        let mut out = Self::zeros(d, k, ancilla);
        for (alpha, beta, i, j, v) in terms {
            let col = out.slot(&alpha, i)?;
            let row = out.slot(&beta, j)?;
            out.coeffs.add_at(row, col, v);
        }
        Ok(out)
    }

    /// Nonzero terms as `(alpha, beta, i, j, value)` for `value · x^alpha conj(x)^beta y_i conj(y_j)`.
    pub fn terms(&self) -> Vec<(SymIndex, SymIndex, usize, usize, T)> {
        let mut out = Vec::new();
        for r in 0..self.coeffs.rows() {
            for c in 0..self.coeffs.cols() {
                let v = self.coeffs.get(r, c);
                if !v.is_zero() {
                    let (beta, j) = self.label(r);
                    let (alpha, i) = self.label(c);
                    out.push((alpha.clone(), beta.clone(), i, j, v.clone()));
                }
            }
        }
        out
    }

    fn slot(&self, idx: &SymIndex, anc: usize) -> Result<usize> {
        if idx.dim() != self.d || idx.degree() != self.k {
            return Err(Error::InvalidParameter(format!(
                "exponent {:?} does not have d = {} and degree {}",
                idx.exponents(),
                self.d,
                self.k
            )));
        }
        if anc >= self.ancilla {
            return Err(Error::InvalidParameter(format!("ancilla index {anc} >= D = {}", self.ancilla)));
        }
        Ok(self.basis.position(idx).expect("basis covers all indices") * self.ancilla + anc)
    }

    fn label(&self, slot: usize) -> (&SymIndex, usize) {
        (self.basis.index(slot / self.ancilla), slot % self.ancilla)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ancilla(&self) -> usize {
        self.ancilla
    }

    pub fn basis(&self) -> &SymBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.coeffs
    }

    /// Coefficient of `conj(x)^alpha conj(y_i) x^beta y_j`.
    pub fn coeff(&self, alpha: &SymIndex, i: usize, beta: &SymIndex, j: usize) -> &T {
        let r = self.basis.position(alpha).expect("index in basis") * self.ancilla + i;
        let c = self.basis.position(beta).expect("index in basis") * self.ancilla + j;
        self.coeffs.get(r, c)
    }

    pub fn is_hermitian(&self) -> bool {
        let n = self.coeffs.rows();
        (0..n).all(|r| (r..n).all(|c| *self.coeffs.get(r, c) == self.coeffs.get(c, r).conj()))
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.coeffs.rows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let diff = self.coeffs.get(r, c).clone() - self.coeffs.get(c, r).conj();
                worst = worst.max(diff.magnitude());
            }
        }
        worst
    }

    /// Complex Laplacian `Σ_l ∂²/∂conj(x_l)∂x_l`, acting on `x` only.
    /// A form of degree 0 maps to the zero form of degree 0.
    pub fn laplacian(&self) -> Self {
        if self.k == 0 {
            return Self::zeros(self.d, 0, self.ancilla);
        }
        let mut out = Self::zeros(self.d, self.k - 1, self.ancilla);
        let n = self.coeffs.rows();
        for r in 0..n {
            let (alpha, i) = self.label(r);
            for c in 0..n {
                let v = self.coeffs.get(r, c);
                if v.is_zero() {
                    continue;
                }
                let (beta, j) = self.label(c);
                for l in 0..self.d {
                    let (a, b) = (alpha.exponents()[l], beta.exponents()[l]);
                    if a == 0 || b == 0 {
                        continue;
                    }
                    let tr = out.basis.position(&alpha.minus_unit(l).unwrap()).unwrap() * self.ancilla + i;
                    let tc = out.basis.position(&beta.minus_unit(l).unwrap()).unwrap() * self.ancilla + j;
                    out.coeffs.add_at(tr, tc, v.clone() * T::from_i64(i64::from(a * b)));
                }
            }
        }
        out
    }

    /// Multiply by `‖x‖² = Σ_l conj(x_l) x_l`.
    pub fn mul_norm_sq(&self) -> Self {
        let mut out = Self::zeros(self.d, self.k + 1, self.ancilla);
        let n = self.coeffs.rows();
        for r in 0..n {
            let (alpha, i) = self.label(r);
            for c in 0..n {
                let v = self.coeffs.get(r, c);
                if v.is_zero() {
                    continue;
                }
                let (beta, j) = self.label(c);
                for l in 0..self.d {
                    let tr = out.basis.position(&alpha.plus_unit(l)).unwrap() * self.ancilla + i;
                    let tc = out.basis.position(&beta.plus_unit(l)).unwrap() * self.ancilla + j;
                    out.coeffs.add_at(tr, tc, v.clone());
                }
            }
        }
        out
    }

    /// `tr_{k→k-t}`: `((k)_t)^{-2} Δ^t`.
    pub fn partial_trace(&self, t: usize) -> Result<Self> {
        if t > self.k {
            return Err(Error::InvalidParameter(format!("partial trace of {t} copies out of k = {}", self.k)));
        }
        let mut out = self.clone();
        for _ in 0..t {
            out = out.laplacian();
        }
        let f = falling(self.k, t);
        Ok(out.scale(&T::from_ratio(&Rational::new(1.into(), f.clone() * f))))
    }

    /// `tr*_{k→n}`: multiplication by `‖x‖^{2(n-k)}`.
    pub fn trace_adjoint(&self, n: usize) -> Result<Self> {
        if n < self.k {
            return Err(Error::InvalidParameter(format!("trace adjoint to n = {n} < k = {}", self.k)));
        }
        let mut out = self.clone();
        for _ in self.k..n {
            out = out.mul_norm_sq();
        }
        Ok(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { coeffs: self.coeffs.scale(s), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.d, self.k, self.ancilla), (other.d, other.k, other.ancilla));
        Self { coeffs: self.coeffs.add(&other.coeffs), ..self.clone() }
    }

    /// Weight `α!β!/(k!)²` that turns coefficient products into Hilbert–Schmidt pairings.
    fn hs_weight(&self, alpha: &SymIndex, beta: &SymIndex) -> Rational {
        let kf = factorial(self.k);
        Rational::new(alpha.factorial_product() * beta.factorial_product(), kf.clone() * kf)
    }

    /// Hilbert–Schmidt inner product `tr(A^* B)` of the underlying operators.
    pub fn hs_inner(&self, other: &Self) -> T {
        assert_eq!((self.d, self.k, self.ancilla), (other.d, other.k, other.ancilla));
        let n = self.coeffs.rows();
        let mut acc = T::zero();
        for r in 0..n {
            for c in 0..n {
                let a = self.coeffs.get(r, c);
                let b = other.coeffs.get(r, c);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let w = self.hs_weight(self.label(r).0, self.label(c).0);
                acc = acc + a.conj() * b.clone() * T::from_ratio(&w);
            }
        }
        acc
    }

    /// Operator trace `Σ W[(α,i),(α,i)] = Σ C[(α,i),(α,i)] α!/k!`.
    pub fn trace(&self) -> T {
        let kf = factorial(self.k);
        let mut acc = T::zero();
        for r in 0..self.coeffs.rows() {
            let alpha = self.label(r).0;
            let w = Rational::new(alpha.factorial_product(), kf.clone());
            acc = acc + self.coeffs.get(r, r).clone() * T::from_ratio(&w);
        }
        acc
    }

    /// The `(i, j)` ancilla block as a `d[k]²` coefficient vector (row-major in `(α, β)`).
    pub fn block(&self, i: usize, j: usize) -> Vec<T> {
        let m = self.basis.len();
        let mut out = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                out.push(self.coeffs.get(a * self.ancilla + i, b * self.ancilla + j).clone());
            }
        }
        out
    }

    pub fn set_block(&mut self, i: usize, j: usize, values: &[T]) {
        let m = self.basis.len();
        assert_eq!(values.len(), m * m);
        for a in 0..m {
            for b in 0..m {
                self.coeffs.set(a * self.ancilla + i, b * self.ancilla + j, values[a * m + b].clone());
            }
        }
    }

    pub fn to_c64(&self) -> BiForm<C64> {
        BiForm {
            d: self.d,
            k: self.k,
            ancilla: self.ancilla,
            basis: self.basis.clone(),
            coeffs: self.coeffs.to_c64(),
        }
    }

    /// `D × D` matrix `B[i][j] = Σ C[(α,i),(β,j)] conj(x)^α x^β`, so that `p(x, y) = y^† B y`.
    pub fn x_block(&self, x: &[C64]) -> Vec<Vec<C64>> {
        assert_eq!(x.len(), self.d, "x has wrong length");
        let mono = self.basis.monomials(x);
        let m = self.basis.len();
        let dd = self.ancilla;
        let mut out = vec![vec![C64::zero(); dd]; dd];
        for a in 0..m {
            let ca = mono[a].conj();
            for b in 0..m {
                let w = ca * mono[b];
                for (i, row) in out.iter_mut().enumerate() {
                    for (j, slot) in row.iter_mut().enumerate() {
                        let v = self.coeffs.get(a * dd + i, b * dd + j);
                        if !v.is_zero() {
                            *slot += v.to_c64() * w;
                        }
                    }
                }
            }
        }
        out
    }

    /// Evaluate `p(x, y)` from the monomial expansion.
    pub fn eval(&self, x: &[C64], y: &[C64]) -> C64 {
        assert_eq!(y.len(), self.ancilla, "y has wrong length");
        let block = self.x_block(x);
        let mut acc = C64::zero();
        for (i, row) in block.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                acc += y[i].conj() * v * y[j];
            }
        }
        acc
    }

    /// Value and steepest-ascent direction `2 ∂p/∂conj(x)` at `(x, y)`.
    pub fn eval_with_grad(&self, x: &[C64], y: &[C64]) -> (f64, Vec<C64>) {
        let m = self.basis.len();
        let dd = self.ancilla;
        let mono = self.basis.monomials(x);
        let cx: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        let powers = power_table(&cx, self.k);
        let mut value = C64::zero();
        let mut grad = vec![C64::zero(); self.d];
        for a in 0..m {
            let alpha = self.basis.index(a);
            let ca = mono[a].conj();
            for b in 0..m {
                let mut s = C64::zero();
                for i in 0..dd {
                    for j in 0..dd {
                        let v = self.coeffs.get(a * dd + i, b * dd + j);
                        if !v.is_zero() {
                            s += y[i].conj() * v.to_c64() * y[j];
                        }
                    }
                }
                if s == C64::zero() {
                    continue;
                }
                value += s * ca * mono[b];
                for (l, g) in grad.iter_mut().enumerate() {
                    let e = alpha.exponents()[l];
                    if e == 0 {
                        continue;
                    }
                    let reduced = alpha.minus_unit(l).unwrap();
                    let dmono = reduced.eval_with(&powers, C64::new(1.0, 0.0));
                    *g += s * dmono * mono[b] * f64::from(e);
                }
            }
        }
        (value.re, grad.into_iter().map(|g| g * 2.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, ComplexRational};
    use num::Complex;

    fn cq(re: i64, im: i64) -> ComplexRational {
        Complex::new(qi(re), qi(im))
    }

    #[test]
    fn laplacian_of_norm_is_d() {
        let f = BiForm::<Rational>::norm_power(2, 1, 1);
        let lap = f.laplacian();
        assert_eq!(lap.k(), 0);
        assert_eq!(lap.matrix().get(0, 0), &qi(2));
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let f = BiForm::<Rational>::norm_power(3, 0, 2);
        let lap = f.laplacian();
        assert!(lap.matrix().data().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn partial_trace_zero_steps_is_identity_map() {
        let f = BiForm::<Rational>::norm_power(2, 2, 1);
        assert_eq!(f.partial_trace(0).unwrap(), f);
        assert!(f.partial_trace(3).is_err());
        assert!(f.trace_adjoint(1).is_err());
    }

    #[test]
    fn identity_trace_is_sym_dim() {
        // ‖x‖^{2k} is the form of the identity on the symmetric subspace
        for (d, k, dim) in [(2, 2, 3), (3, 2, 6), (2, 3, 4)] {
            let f = BiForm::<Rational>::norm_power(d, k, 1);
            assert_eq!(f.trace(), qi(dim));
            let full = f.partial_trace(k).unwrap();
            assert_eq!(full.matrix().get(0, 0), &qi(dim));
        }
    }

    #[test]
    fn hermiticity_detects_asymmetry() {
        let a = SymIndex::new(vec![1, 0]);
        let b = SymIndex::new(vec![0, 1]);
        let herm = BiForm::from_terms(
            2,
            1,
            1,
            vec![(a.clone(), b.clone(), 0, 0, cq(1, 2)), (b.clone(), a.clone(), 0, 0, cq(1, -2))],
        )
        .unwrap();
        assert!(herm.is_hermitian());
        let bad = BiForm::from_terms(2, 1, 1, vec![(a, b, 0, 0, cq(1, 2))]).unwrap();
        assert!(!bad.is_hermitian());
    }

    #[test]
    fn hs_inner_of_identity() {
        let f = BiForm::<Rational>::norm_power(2, 2, 1);
        // tr(I * I) = d[2] = 3
        assert_eq!(f.hs_inner(&f), qi(3));
        assert_eq!(f.scale(&q(1, 3)).trace(), qi(1));
    }
}
