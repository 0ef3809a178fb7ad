use num::traits::{One, Signed, Zero};
use num::BigInt;

use crate::combinat::{binomial, multinomial, sym_dim_big};
use crate::error::{Error, Result};
use crate::scalar::{qb, Rational};

fn range_error(what: &str, detail: String) -> Error {
    Error::InvalidParameter(format!("{what}: {detail}"))
}

fn sign(p: usize) -> Rational {
    if p % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `c(n,k,s) = C(k,s) C(n,s) / C(n+k,k)`.
pub fn coeff_c(n: usize, k: usize, s: usize) -> Result<Rational> {
    if s > n.min(k) {
        return Err(range_error("c(n,k,s)", format!("s = {s} exceeds min(n, k) = {}", n.min(k))));
    }
    Ok(Rational::new(binomial(k, s) * binomial(n, s), binomial(n + k, k)))
}

/// `q(n,k,t) = (-1)^{t+k} C(n+t,t) C(k,t) / C(n,k) · d[n+t]/d[n+k]`.
pub fn coeff_q(n: usize, k: usize, t: usize, d: usize) -> Result<Rational> {
    if !(t <= k && k <= n) || d == 0 {
        return Err(range_error("q(n,k,t)", format!("need n >= k >= t >= 0 and d >= 1, got n={n} k={k} t={t} d={d}")));
    }
    let v = Rational::new(binomial(n + t, t) * binomial(k, t), binomial(n, k))
        * Rational::new(sym_dim_big(d, n + t), sym_dim_big(d, n + k));
    Ok(sign(t + k) * v)
}

/// `q̂(n,k,k-s) = q(n,k,k-s) · d[n+k] d[k] / (d[n] d[k-s])`.
pub fn coeff_qhat(n: usize, k: usize, s: usize, d: usize) -> Result<Rational> {
    if s > k {
        return Err(range_error("q̂(n,k,k-s)", format!("s = {s} exceeds k = {k}")));
    }
    let q = coeff_q(n, k, k - s, d)?;
    Ok(q * Rational::new(sym_dim_big(d, n + k) * sym_dim_big(d, k), sym_dim_big(d, n) * sym_dim_big(d, k - s)))
}

/// `c_R(n,k,s) = 4^s multinom(n+k; 2s, n-s, k-s) / C(2n+2k, 2k)`.
pub fn coeff_c_real(n: usize, k: usize, s: usize) -> Result<Rational> {
    if s > n.min(k) {
        return Err(range_error("c_R(n,k,s)", format!("s = {s} exceeds min(n, k) = {}", n.min(k))));
    }
    let num = (BigInt::one() << (2 * s)) * multinomial(&[2 * s, n - s, k - s]);
    Ok(Rational::new(num, binomial(2 * n + 2 * k, 2 * k)))
}

/// `q_R(n,k,t) = (-1)^{k+t} 4^{-k} C(2n+2t,2t) C(2k,k-t) / C(n+t,k+t) · d_R[n+t]/d_R[n+k]`.
pub fn coeff_q_real(n: usize, k: usize, t: usize, d: usize) -> Result<Rational> {
    if !(t <= k && k <= n) || d == 0 {
        return Err(range_error("q_R(n,k,t)", format!("need n >= k >= t >= 0 and d >= 1, got n={n} k={k} t={t} d={d}")));
    }
    let v = Rational::new(binomial(2 * n + 2 * t, 2 * t) * binomial(2 * k, k - t), binomial(n + t, k + t) << (2 * k))
        * real_dim_ratio(d, n + t, n + k);
    Ok(sign(t + k) * v)
}

/// `q̂_R(n,k,k-s) = q_R(n,k,k-s) · d_R[n+k] d_R[k] / (d_R[n] d_R[k-s])`.
pub fn coeff_qhat_real(n: usize, k: usize, s: usize, d: usize) -> Result<Rational> {
    if s > k {
        return Err(range_error("q̂_R(n,k,k-s)", format!("s = {s} exceeds k = {k}")));
    }
    let q = coeff_q_real(n, k, k - s, d)?;
    Ok(q / (real_dim_ratio(d, k - s, k) * real_dim_ratio(d, n, n + k)))
}

/// `d_R[a]/d_R[b] = Π_{a ≤ N < b} (2N+1)/(d+2N)` for `a ≤ b`.
fn real_dim_ratio(d: usize, a: usize, b: usize) -> Rational {
    let num: BigInt = (a..b).map(|m| BigInt::from(2 * m + 1)).product();
    let den: BigInt = (a..b).map(|m| BigInt::from(d + 2 * m)).product();
    Rational::new(num, den)
}

/// Exact coefficient families for one `(d, k, n)` triple.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    /// `c(n,k,s)`, `s = 0..=min(n,k)`.
    pub c: Vec<Rational>,
    /// `q(n,k,t)`, `t = 0..=k`.
    pub q: Vec<Rational>,
    /// `q̂(n,k,k-s)`, `s = 0..=k`.
    pub qhat: Vec<Rational>,
    pub c_real: Vec<Rational>,
    pub q_real: Vec<Rational>,
}

impl CoeffTable {
    pub fn new(d: usize, k: usize, n: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidParameter(format!("coefficient table needs n >= k, got n = {n}, k = {k}")));
        }
        let c = (0..=k).map(|s| coeff_c(n, k, s)).collect::<Result<_>>()?;
        let q = (0..=k).map(|t| coeff_q(n, k, t, d)).collect::<Result<_>>()?;
        let qhat = (0..=k).map(|s| coeff_qhat(n, k, s, d)).collect::<Result<_>>()?;
        let c_real = (0..=k).map(|s| coeff_c_real(n, k, s)).collect::<Result<_>>()?;
        let q_real = (0..=k).map(|t| coeff_q_real(n, k, t, d)).collect::<Result<_>>()?;
        Ok(Self { d, k, n, c, q, qhat, c_real, q_real })
    }
}

/// Sign of a rational as `-1`, `0` or `1`.
pub fn signum(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn qd(d: usize, n: usize) -> Rational {
    qb(sym_dim_big(d, n))
}
