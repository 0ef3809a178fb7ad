//! Real homogeneous forms of even degree, stored by monomial coefficients.
//!
//! A symmetric tensor `v ∈ ∨^{2k} R^d` corresponds to `p_v(x) = ⟨x^{⊗2k}, v⟩`.
//! The coefficient of `x^α` is `(2k)!/α!` times the common entry `v_w` of all
//! words `w` of type `α`; see [`super::tensor`] for the tensor side.

use std::sync::Arc;


use super::index::{power_table, SymBasis, SymIndex};
use crate::combinat::{factorial, falling};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug)]
pub struct RealSymPoly<T> {
    d: usize,
    k: usize,
    basis: Arc<SymBasis>,
    coeffs: Vec<T>,
}

impl<T: Scalar> PartialEq for RealSymPoly<T> {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.k == other.k && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> RealSymPoly<T> {
    /// The zero form of degree `2k` in `d` variables.
    pub fn zeros(d: usize, k: usize) -> Self {
        let basis = SymBasis::shared(d, 2 * k);
        let coeffs = vec![T::zero(); basis.len()];
        Self { d, k, basis, coeffs }
    }

    pub fn from_coeffs(d: usize, k: usize, coeffs: Vec<T>) -> Result<Self> {
        let basis = SymBasis::shared(d, 2 * k);
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
        }
        Ok(Self { d, k, basis, coeffs })
    }

    /// Sum of `value · x^alpha`; every `alpha` must have degree `2k`.
    pub fn from_terms<I>(d: usize, k: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SymIndex, T)>,
    {
        let mut out = Self::zeros(d, k);
        for (alpha, v) in terms {
            let pos = out.basis.position(&alpha).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "exponent {:?} is not a degree-{} monomial in {d} variables",
                    alpha.exponents(),
                    2 * k
                ))
            })?;
            out.coeffs[pos] = out.coeffs[pos].clone() + v;
        }
        Ok(out)
    }

    /// `‖x‖^{2k}`.
    pub fn norm_power(d: usize, k: usize) -> Self {
        let mut out = Self::zeros(d, 0);
        out.coeffs[0] = T::one();
        for _ in 0..k {
            out = out.mul_norm_sq();
        }
        out
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Half the degree.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        2 * self.k
    }

    pub fn basis(&self) -> &SymBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &SymIndex) -> Option<&T> {
        self.basis.position(alpha).map(|p| &self.coeffs[p])
    }

    pub fn terms(&self) -> Vec<(SymIndex, T)> {
        self.basis
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| (a.clone(), c.clone()))
            .collect()
    }

    /// `Δ_R = Σ_l ∂²/∂x_l²`. Degree-0 forms map to zero.
    pub fn laplacian(&self) -> Self {
        if self.k == 0 {
            return Self::zeros(self.d, 0);
        }
        let mut out = Self::zeros(self.d, self.k - 1);
        for (alpha, c) in self.basis.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            for l in 0..self.d {
                let e = alpha.exponents()[l];
                if e < 2 {
                    continue;
                }
                let target = alpha.minus_unit(l).and_then(|a| a.minus_unit(l)).unwrap();
                let pos = out.basis.position(&target).unwrap();
                out.coeffs[pos] = out.coeffs[pos].clone() + c.clone() * T::from_i64(i64::from(e * (e - 1)));
            }
        }
        out
    }

    /// Multiply by `‖x‖² = Σ x_l²`.
    pub fn mul_norm_sq(&self) -> Self {
        let mut out = Self::zeros(self.d, self.k + 1);
        for (alpha, c) in self.basis.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            for l in 0..self.d {
                let target = alpha.plus_unit(l).plus_unit(l);
                let pos = out.basis.position(&target).unwrap();
                out.coeffs[pos] = out.coeffs[pos].clone() + c.clone();
            }
        }
        out
    }

    /// `tr_{k→k-t} = Δ_R^t / (2k)_{2t}`.
    pub fn partial_trace(&self, t: usize) -> Result<Self> {
        if t > self.k {
            return Err(Error::InvalidParameter(format!("partial trace of {t} pairs out of k = {}", self.k)));
        }
        let mut out = self.clone();
        for _ in 0..t {
            out = out.laplacian();
        }
        let f = falling(2 * self.k, 2 * t);
        Ok(out.scale(&T::from_ratio(&Rational::new(1.into(), f))))
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
        Self { coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.d, self.k), (other.d, other.k), "adding forms of different shape");
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
            ..self.clone()
        }
    }

    /// Polynomial product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "multiplying forms in different numbers of variables");
        let mut out = Self::zeros(self.d, self.k + other.k);
        for (a, ca) in self.basis.iter().zip(&self.coeffs) {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.basis.iter().zip(&other.coeffs) {
                if cb.is_zero() {
                    continue;
                }
                let pos = out.basis.position(&a.sum(b)).unwrap();
                out.coeffs[pos] = out.coeffs[pos].clone() + ca.clone() * cb.clone();
            }
        }
        out
    }

    /// Tensor inner product `⟨v, v'⟩ = Σ a_α a'_α α!/(2k)!`.
    pub fn inner(&self, other: &Self) -> T {
        assert_eq!((self.d, self.k), (other.d, other.k));
        let nf = factorial(2 * self.k);
        let mut acc = T::zero();
        for (alpha, (a, b)) in self.basis.iter().zip(self.coeffs.iter().zip(&other.coeffs)) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let w = Rational::new(alpha.factorial_product(), nf.clone());
            acc = acc + a.clone() * b.clone() * T::from_ratio(&w);
        }
        acc
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> RealSymPoly<U> {
        RealSymPoly { d: self.d, k: self.k, basis: self.basis.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> RealSymPoly<f64> {
        self.map(|c| c.to_c64().re)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d, "x has wrong length");
        let mono = self.basis.monomials_real(x);
        mono.iter().zip(&self.coeffs).map(|(m, c)| m * c.to_c64().re).sum()
    }

    /// Value and Euclidean gradient at `x`.
    pub fn eval_with_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let powers = power_table(x, self.degree());
        let mut value = 0.0;
        let mut grad = vec![0.0; self.d];
        for (alpha, c) in self.basis.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let c = c.to_c64().re;
            value += c * alpha.eval_with(&powers, 1.0);
            for (l, g) in grad.iter_mut().enumerate() {
                let e = alpha.exponents()[l];
                if e > 0 {
                    *g += c * f64::from(e) * alpha.minus_unit(l).unwrap().eval_with(&powers, 1.0);
                }
            }
        }
        (value, grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    fn mono(e: &[u32]) -> SymIndex {
        SymIndex::new(e.to_vec())
    }

    #[test]
    fn laplacian_of_norm_square() {
        for d in 1..5 {
            let p = RealSymPoly::<Rational>::norm_power(d, 1);
            assert_eq!(p.laplacian().coeffs(), &[qi(2 * d as i64)]);
        }
    }

    #[test]
    fn laplacian_of_x4y2() {
        // Δ(x⁴y²) = 12x²y² + 2x⁴
        let p = RealSymPoly::from_terms(3, 3, [(mono(&[4, 2, 0]), qi(1))]).unwrap();
        let expected =
            RealSymPoly::from_terms(3, 2, [(mono(&[2, 2, 0]), qi(12)), (mono(&[4, 0, 0]), qi(2))]).unwrap();
        assert_eq!(p.laplacian(), expected);
    }

    #[test]
    fn rejects_wrong_degree() {
        assert!(RealSymPoly::from_terms(2, 1, [(mono(&[3, 0]), qi(1))]).is_err());
        let p = RealSymPoly::<Rational>::norm_power(2, 1);
        assert!(p.partial_trace(2).is_err());
        assert!(p.trace_adjoint(0).is_err());
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let p = RealSymPoly::from_terms(
            2,
            2,
            [(mono(&[4, 0]), 1.0), (mono(&[1, 3]), -2.0), (mono(&[2, 2]), 0.5)],
        )
        .unwrap();
        let x = [0.3, -0.7];
        let (v, g) = p.eval_with_grad(&x);
        assert!((v - p.eval(&x)).abs() < 1e-14);
        let h = 1e-6;
        for l in 0..2 {
            let mut xp = x;
            xp[l] += h;
            let mut xm = x;
            xm[l] -= h;
            let fd = (p.eval(&xp) - p.eval(&xm)) / (2.0 * h);
            assert!((fd - g[l]).abs() < 1e-8);
        }
    }
}
