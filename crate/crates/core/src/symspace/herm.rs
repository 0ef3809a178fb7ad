use std::sync::Arc;

use nalgebra::DMatrix;
use num::traits::Zero;
use rand::Rng;

use super::biform::BiForm;
use super::index::SymBasis;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampling::complex_gaussian;
use crate::scalar::{ratio_to_f64, Scalar, C64};

/// Hermitian operator on `∨^k C^d ⊗ C^D` in the orthonormal basis `e_α ⊗ f_i`,
/// stored in floating point. Rows and columns are ordered `(α, i) ↦ pos(α)·D + i`.
#[derive(Clone, Debug)]
pub struct HermOp {
    d: usize,
    k: usize,
    ancilla: usize,
    basis: Arc<SymBasis>,
    entries: DMatrix<C64>,
}

/// `sqrt(k!/α!)` for every basis index.
pub(crate) fn basis_scales(basis: &SymBasis) -> Vec<f64> {
    basis.iter().map(|a| ratio_to_f64(&a.multinomial().into()).sqrt()).collect()
}

impl HermOp {
    pub fn new(d: usize, k: usize, ancilla: usize, entries: DMatrix<C64>) -> Result<Self> {
        let basis = SymBasis::shared(d, k);
        let n = basis.len() * ancilla;
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: entries.nrows() });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > 1e-12 * scale {
            return Err(Error::NotHermitian(format!("max |W - W^*| = {defect:e}")));
        }
        Ok(Self { d, k, ancilla, basis, entries })
    }

    pub fn identity(d: usize, k: usize, ancilla: usize) -> Self {
        let basis = SymBasis::shared(d, k);
        let n = basis.len() * ancilla;
        Self { d, k, ancilla, basis, entries: DMatrix::identity(n, n) }
    }

    /// `(G + G^*)/2` for a complex Ginibre matrix `G`.
    pub fn random<R: Rng>(rng: &mut R, d: usize, k: usize, ancilla: usize) -> Self {
        let basis = SymBasis::shared(d, k);
        let n = basis.len() * ancilla;
        let g = DMatrix::from_vec(n, n, complex_gaussian(rng, n * n));
        let entries = (&g + g.adjoint()) * C64::new(0.5, 0.0);
        Self { d, k, ancilla, basis, entries }
    }

    /// `|v⟩⟨v|^{⊗k} ⊗ |y⟩⟨y|`.
    pub fn rank_one(v: &[C64], k: usize, y: &[C64]) -> Self {
        let basis = SymBasis::shared(v.len(), k);
        let sv = sym_power(&basis, v);
        let col: Vec<C64> = sv.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect();
        let col = nalgebra::DVector::from_vec(col);
        let entries = &col * col.adjoint();
        Self { d: v.len(), k, ancilla: y.len(), basis, entries }
    }

    /// Convert from monomial coefficients: `W = C / (sqrt(k!/α!) sqrt(k!/β!))`.
    pub fn from_biform<T: Scalar>(form: &BiForm<T>) -> Result<Self> {
        let basis = SymBasis::shared(form.d(), form.k());
        let s = basis_scales(&basis);
        let dd = form.ancilla();
        let n = basis.len() * dd;
        let c = form.matrix();
        let entries = DMatrix::from_fn(n, n, |r, col| c.get(r, col).to_c64() / (s[r / dd] * s[col / dd]));
        Self::new(form.d(), form.k(), dd, entries)
    }

    /// Monomial coefficients of `p_W`: `C = sqrt(k!/α!) sqrt(k!/β!) W`.
    pub fn to_biform(&self) -> BiForm<C64> {
        let s = basis_scales(&self.basis);
        let dd = self.ancilla;
        let n = self.entries.nrows();
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(self.entries[(r, c)] * (s[r / dd] * s[c / dd]));
            }
        }
        BiForm::from_matrix(self.d, self.k, dd, Matrix::from_vec(n, n, data)).expect("shape is consistent")
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

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `⟨x^{⊗k} ⊗ y| W |x^{⊗k} ⊗ y⟩` computed in the orthonormal basis.
    pub fn eval(&self, x: &[C64], y: &[C64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        if y.len() != self.ancilla {
            return Err(Error::DimensionMismatch { expected: self.ancilla, got: y.len() });
        }
        let sv = sym_power(&self.basis, x);
        let v: Vec<C64> = sv.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect();
        let v = nalgebra::DVector::from_vec(v);
        Ok((v.adjoint() * &self.entries * &v)[(0, 0)].re)
    }

    /// The `D × D` matrix `W_x = (⟨x^{⊗k}| ⊗ I) W (|x^{⊗k}⟩ ⊗ I)`.
    pub fn x_block(&self, x: &[C64]) -> DMatrix<C64> {
        let sv = sym_power(&self.basis, x);
        let dd = self.ancilla;
        let mut out = DMatrix::<C64>::zeros(dd, dd);
        for (a, va) in sv.iter().enumerate() {
            for (b, vb) in sv.iter().enumerate() {
                let w = va.conj() * vb;
                if w.is_zero() {
                    continue;
                }
                for i in 0..dd {
                    for j in 0..dd {
                        out[(i, j)] += self.entries[(a * dd + i, b * dd + j)] * w;
                    }
                }
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.entries - self.entries.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Operator trace.
    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn partial_trace(&self, t: usize) -> Result<Self> {
        Self::from_biform(&self.to_biform().partial_trace(t)?)
    }

    pub fn trace_adjoint(&self, n: usize) -> Result<Self> {
        Self::from_biform(&self.to_biform().trace_adjoint(n)?)
    }
}

/// Coordinates of `x^{⊗k}` in the orthonormal basis: `sqrt(k!/α!) x^α`.
pub(crate) fn sym_power(basis: &SymBasis, x: &[C64]) -> Vec<C64> {
    let s = basis_scales(basis);
    basis.monomials(x).into_iter().zip(s).map(|(m, s)| m * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_sphere, seeded};
    use crate::scalar::Rational;

    #[test]
    fn identity_on_c2_gives_norm() {
        let w = HermOp::identity(2, 1, 1);
        let f = w.to_biform();
        // p_W(x) = |x_1|^2 + |x_2|^2
        assert!((f.matrix().get(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(f.matrix().get(0, 1).norm() < 1e-15);
        let x = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        assert!((w.eval(&x, &[C64::new(1.0, 0.0)]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_monomial() {
        // |e_1><e_1|^{⊗k} gives |x_1|^{2k}
        let e1 = [C64::new(1.0, 0.0), C64::zero()];
        let w = HermOp::rank_one(&e1, 3, &[C64::new(1.0, 0.0)]);
        let x = [C64::new(0.3, 0.4), C64::new(-0.2, 0.1)];
        let v = w.eval(&x, &[C64::new(1.0, 0.0)]).unwrap();
        assert!((v - 0.5f64.powi(6)).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_and_monomial_evaluation_agree() {
        let mut rng = seeded(11);
        let w = HermOp::random(&mut rng, 3, 2, 2);
        let f = w.to_biform();
        for _ in 0..20 {
            let x = complex_sphere(&mut rng, 3);
            let y = complex_sphere(&mut rng, 2);
            let a = w.eval(&x, &y).unwrap();
            let b = f.eval(&x, &y);
            assert!((a - b.re).abs() < 1e-12 * (1.0 + a.abs()));
            assert!(b.im.abs() < 1e-12);
        }
        let back = HermOp::from_biform(&f).unwrap();
        assert!((back.entries() - w.entries()).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_shape() {
        let mut m = DMatrix::<C64>::identity(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(HermOp::new(2, 1, 1, m), Err(Error::NotHermitian(_))));
        assert!(HermOp::new(2, 2, 1, DMatrix::identity(2, 2)).is_err());
        assert!(HermOp::identity(2, 1, 1).eval(&[C64::zero()], &[C64::zero()]).is_err());
    }

    #[test]
    fn exact_identity_form_converts() {
        let f = BiForm::<Rational>::norm_power(2, 3, 1);
        let w = HermOp::from_biform(&f).unwrap();
        assert!((w.entries() - DMatrix::<C64>::identity(4, 4)).norm() < 1e-14);
    }
}
