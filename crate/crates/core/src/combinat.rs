//! Exact integer and rational combinatorics.

use num::traits::{One, ToPrimitive, Zero};
use num::BigInt;

use crate::error::{Error, Result};
use crate::scalar::{qb, Rational};

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `total! / Π parts_i!`, zero if the parts do not sum to `total`.
pub fn multinomial(parts: &[usize]) -> BigInt {
    let total: usize = parts.iter().sum();
    let mut acc = factorial(total);
    for &p in parts {
        acc /= factorial(p);
    }
    acc
}

/// Falling factorial `(x)_p = x (x-1) ... (x-p+1)`, with `(x)_0 = 1`.
pub fn falling(x: usize, p: usize) -> BigInt {
    if p > x {
        return BigInt::zero();
    }
    ((x - p + 1)..=x).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `(2m-1)!!`, with `(-1)!! = 1`.
pub fn odd_double_factorial(m: usize) -> BigInt {
    (0..m).fold(BigInt::one(), |acc, j| acc * BigInt::from(2 * j + 1))
}

/// Dimension `d[n] = binom(d+n-1, n)` of the symmetric subspace of `(C^d)^{⊗n}`.
pub fn sym_dim(d: usize, n: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidParameter("local dimension d must be >= 1".into()));
    }
    sym_dim_big(d, n)
        .to_usize()
        .ok_or_else(|| Error::Overflow(format!("d[n] for d = {d}, n = {n} exceeds usize")))
}

pub fn sym_dim_big(d: usize, n: usize) -> BigInt {
    binomial(d + n - 1, n)
}

pub fn sym_dim_q(d: usize, n: usize) -> Rational {
    qb(sym_dim_big(d, n))
}

/// Real Hilbert-identity constant
/// `d_R[n] = 2^{2n} n! Γ(n+d/2) / ((2n)! Γ(d/2))`.
///
/// `Γ(n+d/2)/Γ(d/2) = Π_{j<n} (d/2 + j)`, so the value is rational for every `d`:
/// `d_R[n] = 2^n n! Π_{j<n} (d + 2j) / (2n)!`.
pub fn real_dim_const(d: usize, n: usize) -> Rational {
    let mut num = BigInt::one() << n;
    num *= factorial(n);
    for j in 0..n {
        num *= BigInt::from(d + 2 * j);
    }
    Rational::new(num, factorial(2 * n))
}

/// Enumerate all compositions of `total` into `parts` nonnegative parts,
/// in descending lexicographic order (`(total, 0, ..)` first).
pub fn compositions(parts: usize, total: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut current = vec![0u32; parts];
    fill(&mut current, 0, total, &mut out);
    out
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: usize, out: &mut Vec<Vec<u32>>) {
    if pos == current.len() - 1 {
        current[pos] = remaining as u32;
        out.push(current.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v as u32;
        fill(current, pos + 1, remaining - v, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    #[test]
    fn sym_dim_examples() {
        assert_eq!(sym_dim(2, 3).unwrap(), 4);
        assert_eq!(sym_dim(1, 7).unwrap(), 1);
        assert_eq!(sym_dim(3, 2).unwrap(), 6);
        assert_eq!(sym_dim(5, 0).unwrap(), 1);
    }

    #[test]
    fn sym_dim_reports_overflow() {
        assert!(matches!(sym_dim(200, 200), Err(Error::Overflow(_))));
        assert!(sym_dim(0, 3).is_err());
    }

    #[test]
    fn real_dim_const_examples() {
        for d in 1..6 {
            assert_eq!(real_dim_const(d, 0), qi(1));
            assert_eq!(real_dim_const(d, 1), qi(d as i64));
        }
        // the mean of cos^4 over the circle is 3/8, and d_R[2] * 3/8 must be 1
        assert_eq!(real_dim_const(2, 2), q(8, 3));
    }

    #[test]
    fn composition_count_matches_sym_dim() {
        for d in 1..=6 {
            for n in 0..=8 {
                assert_eq!(compositions(d, n).len(), sym_dim(d, n).unwrap());
            }
        }
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn small_identities() {
        assert_eq!(multinomial(&[2, 1, 1]), BigInt::from(12));
        assert_eq!(falling(5, 2), BigInt::from(20));
        assert_eq!(falling(5, 0), BigInt::from(1));
        assert_eq!(odd_double_factorial(3), BigInt::from(15));
        assert_eq!(binomial(6, 3), BigInt::from(20));
    }
}
