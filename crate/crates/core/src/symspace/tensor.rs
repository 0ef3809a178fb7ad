//! Partial traces by explicit index contraction in the full tensor space.
//!
//! These routines never use derivatives; they embed a form into
//! `(F^d)^{⊗k}`, contract tensor factors directly and read the result back
//! through the symmetric subspace. They serve as an independent check of the
//! Laplacian formulas in [`BiForm`] and [`RealSymPoly`].

use crate::combinat::factorial;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

use super::biform::BiForm;
use super::index::{SymBasis, SymIndex};
use super::realpoly::RealSymPoly;

fn word_of(mut w: usize, d: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = w % d;
        w /= d;
    }
    out
}

/// Basis position of the type of every word of length `len`.
fn word_types(d: usize, len: usize) -> Vec<usize> {
    let basis = SymBasis::shared(d, len);
    (0..d.pow(len as u32))
        .map(|w| basis.position(&SymIndex::of_word(&word_of(w, d, len), d)).unwrap())
        .collect()
}

/// Operator on `(C^d)^{⊗len} ⊗ C^D`, index `(w, i) ↦ w·D + i` with words in base `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FullOp<T> {
    pub d: usize,
    pub len: usize,
    pub ancilla: usize,
    pub entries: Matrix<T>,
}

/// Embed `P W P` into the full tensor space: `F[w, w'] = C_{αβ} α!β!/(k!)²`.
pub fn embed<T: Scalar>(form: &BiForm<T>) -> FullOp<T> {
    let (d, k, dd) = (form.d(), form.k(), form.ancilla());
    let types = word_types(d, k);
    let basis = form.basis();
    let kf = factorial(k);
    let weight: Vec<T> = basis
        .iter()
        .map(|a| T::from_ratio(&Rational::new(a.factorial_product(), kf.clone())))
        .collect();
    let n = types.len() * dd;
    let mut entries = Matrix::zeros(n, n);
    for (w, &a) in types.iter().enumerate() {
        for (w2, &b) in types.iter().enumerate() {
            for i in 0..dd {
                for j in 0..dd {
                    let c = form.matrix().get(a * dd + i, b * dd + j);
                    if !c.is_zero() {
                        entries.set(w * dd + i, w2 * dd + j, c.clone() * weight[a].clone() * weight[b].clone());
                    }
                }
            }
        }
    }
    FullOp { d, len: k, ancilla: dd, entries }
}

/// Read back monomial coefficients: `C_{αβ} = Σ_{w ∈ α, w' ∈ β} F[w, w']`,
/// which are the coefficients of the symmetric compression `P F P`.
pub fn compress<T: Scalar>(op: &FullOp<T>) -> Result<BiForm<T>> {
    let types = word_types(op.d, op.len);
    let dd = op.ancilla;
    let m = SymBasis::shared(op.d, op.len).len() * dd;
    let mut c = Matrix::zeros(m, m);
    for (w, &a) in types.iter().enumerate() {
        for (w2, &b) in types.iter().enumerate() {
            for i in 0..dd {
                for j in 0..dd {
                    let v = op.entries.get(w * dd + i, w2 * dd + j);
                    if !v.is_zero() {
                        c.add_at(a * dd + i, b * dd + j, v.clone());
                    }
                }
            }
        }
    }
    BiForm::from_matrix(op.d, op.len, dd, c)
}

/// Trace out the last tensor factor.
pub fn contract_last<T: Scalar>(op: &FullOp<T>) -> FullOp<T> {
    let (d, dd) = (op.d, op.ancilla);
    let outer = d.pow(op.len as u32 - 1);
    let n = outer * dd;
    let mut entries = Matrix::zeros(n, n);
    for u in 0..outer {
        for u2 in 0..outer {
            for i in 0..dd {
                for j in 0..dd {
                    let mut acc = T::zero();
                    for l in 0..d {
                        acc = acc + op.entries.get((u * d + l) * dd + i, (u2 * d + l) * dd + j).clone();
                    }
                    entries.set(u * dd + i, u2 * dd + j, acc);
                }
            }
        }
    }
    FullOp { d, len: op.len - 1, ancilla: dd, entries }
}

/// `F ↦ F ⊗ I_d` with the new factor appended last.
pub fn append_identity<T: Scalar>(op: &FullOp<T>) -> FullOp<T> {
    let (d, dd) = (op.d, op.ancilla);
    let outer = d.pow(op.len as u32);
    let n = outer * d * dd;
    let mut entries = Matrix::zeros(n, n);
    for u in 0..outer {
        for u2 in 0..outer {
            for i in 0..dd {
                for j in 0..dd {
                    let v = op.entries.get(u * dd + i, u2 * dd + j);
                    if v.is_zero() {
                        continue;
                    }
                    for l in 0..d {
                        entries.set((u * d + l) * dd + i, (u2 * d + l) * dd + j, v.clone());
                    }
                }
            }
        }
    }
    FullOp { d, len: op.len + 1, ancilla: dd, entries }
}

/// `tr_{k→k-t}` computed by contracting `t` tensor factors.
pub fn partial_trace<T: Scalar>(form: &BiForm<T>, t: usize) -> Result<BiForm<T>> {
    if t > form.k() {
        return Err(crate::Error::InvalidParameter(format!("cannot trace {t} of {} factors", form.k())));
    }
    let mut op = embed(form);
    for _ in 0..t {
        op = contract_last(&op);
    }
    compress(&op)
}

/// `tr*_{k→n}` computed as the symmetric compression of `W ⊗ I^{⊗(n-k)}`.
pub fn trace_adjoint<T: Scalar>(form: &BiForm<T>, n: usize) -> Result<BiForm<T>> {
    if n < form.k() {
        return Err(crate::Error::InvalidParameter(format!("cannot embed k = {} into n = {n}", form.k())));
    }
    let mut op = embed(form);
    for _ in form.k()..n {
        op = append_identity(&op);
    }
    compress(&op)
}

/// Full symmetric tensor `v ∈ (R^d)^{⊗2k}` with `p_v = p`: `v_w = a_α α!/(2k)!`.
pub fn real_embed<T: Scalar>(p: &RealSymPoly<T>) -> Vec<T> {
    let len = p.degree();
    let nf = factorial(len);
    let scaled: Vec<T> = p
        .basis()
        .iter()
        .zip(p.coeffs())
        .map(|(a, c)| c.clone() * T::from_ratio(&Rational::new(a.factorial_product(), nf.clone())))
        .collect();
    word_types(p.d(), len).into_iter().map(|a| scaled[a].clone()).collect()
}

/// Polynomial of a (not necessarily symmetric) tensor: `a_α = Σ_{w ∈ α} v_w`.
pub fn real_compress<T: Scalar>(v: &[T], d: usize, len: usize) -> Result<RealSymPoly<T>> {
    assert!(len % 2 == 0, "real tensors have even order");
    let mut out = vec![T::zero(); SymBasis::shared(d, len).len()];
    for (w, a) in word_types(d, len).into_iter().enumerate() {
        out[a] = out[a].clone() + v[w].clone();
    }
    RealSymPoly::from_coeffs(d, len / 2, out)
}

/// Contract the last two factors with `Ω = Σ_l e_l ⊗ e_l`.
pub fn real_contract_pair<T: Scalar>(v: &[T], d: usize) -> Vec<T> {
    let outer = v.len() / (d * d);
    (0..outer)
        .map(|u| (0..d).fold(T::zero(), |acc, l| acc + v[(u * d + l) * d + l].clone()))
        .collect()
}

/// `v ↦ v ⊗ Ω`.
pub fn real_append_omega<T: Scalar>(v: &[T], d: usize) -> Vec<T> {
    let mut out = vec![T::zero(); v.len() * d * d];
    for (u, x) in v.iter().enumerate() {
        for l in 0..d {
            out[(u * d + l) * d + l] = x.clone();
        }
    }
    out
}

pub fn real_partial_trace<T: Scalar>(p: &RealSymPoly<T>, t: usize) -> Result<RealSymPoly<T>> {
    if t > p.k() {
        return Err(crate::Error::InvalidParameter(format!("cannot trace {t} of {} pairs", p.k())));
    }
    let mut v = real_embed(p);
    for _ in 0..t {
        v = real_contract_pair(&v, p.d());
    }
    real_compress(&v, p.d(), p.degree() - 2 * t)
}

pub fn real_trace_adjoint<T: Scalar>(p: &RealSymPoly<T>, n: usize) -> Result<RealSymPoly<T>> {
    if n < p.k() {
        return Err(crate::Error::InvalidParameter(format!("cannot embed k = {} into n = {n}", p.k())));
    }
    let mut v = real_embed(p);
    for _ in p.k()..n {
        v = real_append_omega(&v, p.d());
    }
    real_compress(&v, p.d(), 2 * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    #[test]
    fn embed_compress_round_trip() {
        let f = BiForm::<Rational>::norm_power(2, 2, 2);
        assert_eq!(compress(&embed(&f)).unwrap(), f);
        let p = RealSymPoly::<Rational>::norm_power(3, 2);
        assert_eq!(real_compress(&real_embed(&p), 3, 4).unwrap(), p);
    }

    #[test]
    fn identity_embeds_to_projector_trace() {
        // tr P_sym = d[k]
        let f = BiForm::<Rational>::norm_power(3, 2, 1);
        let op = embed(&f);
        let tr = (0..op.entries.rows()).fold(qi(0), |acc, i| acc + op.entries.get(i, i).clone());
        assert_eq!(tr, qi(6));
    }
}
