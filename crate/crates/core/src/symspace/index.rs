use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::combinat::{compositions, factorial, multinomial};
use crate::scalar::C64;

/// Exponent multi-index `α` labelling the monomial `x^α` and the symmetric basis vector `e_α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymIndex(Vec<u32>);

impl SymIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `α! = Π α_i!`
    pub fn factorial_product(&self) -> BigInt {
        self.0.iter().map(|&e| factorial(e as usize)).product()
    }

    /// `|α|! / α!`, the number of words of type `α`.
    pub fn multinomial(&self) -> BigInt {
        let parts: Vec<usize> = self.0.iter().map(|&e| e as usize).collect();
        multinomial(&parts)
    }

    pub fn plus_unit(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        Self(e)
    }

    pub fn minus_unit(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(Self(e))
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, `None` if any component would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// Type of a word `w ∈ {0..d}^len`.
    pub fn of_word(word: &[usize], d: usize) -> Self {
        let mut e = vec![0u32; d];
        for &l in word {
            e[l] += 1;
        }
        Self(e)
    }

    /// Evaluate `x^α` given a table `powers[i][e] = x_i^e`.
    pub fn eval_with<T: Copy + std::ops::Mul<Output = T>>(&self, powers: &[Vec<T>], one: T) -> T {
        self.0.iter().enumerate().fold(one, |acc, (i, &e)| acc * powers[i][e as usize])
    }
}

/// Ordered basis of all `SymIndex` with fixed `(d, degree)`,
/// enumerated in descending lexicographic order.
#[derive(Debug)]
pub struct SymBasis {
    d: usize,
    degree: usize,
    indices: Vec<SymIndex>,
    lookup: HashMap<SymIndex, usize>,
}

impl SymBasis {
    pub fn new(d: usize, degree: usize) -> Self {
        let indices: Vec<SymIndex> = compositions(d, degree).into_iter().map(SymIndex).collect();
        let lookup = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Self { d, degree, indices, lookup }
    }

    /// Process-wide cached basis.
    pub fn shared(d: usize, degree: usize) -> Arc<SymBasis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<SymBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("basis cache poisoned");
        guard.entry((d, degree)).or_insert_with(|| Arc::new(SymBasis::new(d, degree))).clone()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, pos: usize) -> &SymIndex {
        &self.indices[pos]
    }

    pub fn position(&self, idx: &SymIndex) -> Option<usize> {
        self.lookup.get(idx).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SymIndex> {
        self.indices.iter()
    }

    /// All monomials `x^α` of this degree.
    pub fn monomials(&self, x: &[C64]) -> Vec<C64> {
        let powers = power_table(x, self.degree);
        self.indices.iter().map(|a| a.eval_with(&powers, C64::new(1.0, 0.0))).collect()
    }

    pub fn monomials_real(&self, x: &[f64]) -> Vec<f64> {
        let powers = power_table(x, self.degree);
        self.indices.iter().map(|a| a.eval_with(&powers, 1.0)).collect()
    }
}

pub fn power_table<T: Copy + std::ops::Mul<Output = T> + num::One>(x: &[T], max: usize) -> Vec<Vec<T>> {
    x.iter()
        .map(|&xi| {
            let mut row = Vec::with_capacity(max + 1);
            let mut acc = T::one();
            for _ in 0..=max {
                row.push(acc);
                acc = acc * xi;
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::sym_dim;

    #[test]
    fn enumeration_matches_dimension() {
        for d in 1..=6 {
            for n in 0..=8 {
                let b = SymBasis::new(d, n);
                assert_eq!(b.len(), sym_dim(d, n).unwrap());
                assert!(b.iter().all(|a| a.degree() == n && a.dim() == d));
                for (i, a) in b.iter().enumerate() {
                    assert_eq!(b.position(a), Some(i));
                }
            }
        }
    }

    #[test]
    fn word_types() {
        let a = SymIndex::of_word(&[0, 2, 0], 3);
        assert_eq!(a.exponents(), &[2, 0, 1]);
        assert_eq!(a.multinomial(), BigInt::from(3));
        assert_eq!(a.factorial_product(), BigInt::from(2));
    }
}
