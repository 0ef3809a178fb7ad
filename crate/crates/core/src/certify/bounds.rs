use std::f64::consts::LN_2;

use num::traits::Signed;
use serde::{Deserialize, Serialize};

use crate::chiribella::{coeff_q, coeff_q_real};
use crate::combinat::falling;
use crate::error::{Error, Result};
use crate::scalar::{qb, ratio_from_f64, Rational};

/// Default cap for the bracket searches.
pub const DEFAULT_N_MAX: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Complex,
    Real,
}

/// Sufficient degrees `n` for the certificate, as ceilings clamped below by `k`.
///
/// In the real case each bound is stated for `2n` and converted to `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub field: Field,
    pub d: usize,
    pub k: usize,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    /// `dk(2k-1)/ln(1+m/M)` based bound, valid for every `k`.
    pub general: usize,
    /// `dM/m - d` bound for `k = 1`.
    pub k1: Option<usize>,
    /// Sharpened bound for `k ≥ 2`.
    pub improved: Option<usize>,
    /// `dk(2k-1)/ln 2 · M/m - d` (real case only), for comparison.
    pub reznick: Option<usize>,
    /// Smallest `n` with a nonnegative bracket, `None` if none up to `n_max`.
    pub numeric: Option<usize>,
    pub n_max: usize,
    /// `ln(1 + m/M)`.
    pub gamma: f64,
    /// `dk(2k-1)/(n+k+d-1)` at `n = general` (complex) or `k(2k-1)/(2n+2k+d-2)` (real).
    pub ratio_r: f64,
    /// Leading terms `dk(2k-1)/ln(1+m/M)` and `dk(2k-1) M/(m ln 2)`.
    pub leading_general: f64,
    pub leading_reznick: Option<f64>,
}

fn check_inputs(d: usize, k: usize, m: f64, big_m: f64) -> Result<()> {
    if !(m > 0.0) {
        return Err(Error::NotPositive(m));
    }
    if !(big_m >= m) || !big_m.is_finite() {
        return Err(Error::InvalidParameter(format!("need 0 < m <= M, got m = {m}, M = {big_m}")));
    }
    if d == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!("need d >= 1 and k >= 1, got d = {d}, k = {k}")));
    }
    Ok(())
}

/// `ceil(v)` clamped to `[floor, ∞)`, ignoring float noise just above an integer.
fn ceil_at_least(v: f64, floor: usize) -> usize {
    let c = (v - 1e-9 * v.abs().max(1.0)).ceil();
    if c <= floor as f64 {
        floor
    } else {
        c as usize
    }
}

fn half_ceil_at_least(two_n: f64, floor: usize) -> usize {
    ceil_at_least(two_n / 2.0, floor)
}

pub fn bound_n_complex(d: usize, k: usize, m: f64, big_m: f64, n_max: usize) -> Result<BoundReport> {
    check_inputs(d, k, m, big_m)?;
    let (df, kf) = (d as f64, k as f64);
    let gamma = (m / big_m).ln_1p();
    let leading = df * kf * (2.0 * kf - 1.0) / gamma;
    let general = ceil_at_least(leading - df - kf + 1.0, k);
    let k1 = (k == 1).then(|| ceil_at_least(df * big_m / m - df, k));
    let improved = (k >= 2).then(|| {
        let a = (kf - 1.0) * (2.0 * kf - 3.0);
        let frac = a / (kf * (2.0 * kf - 1.0));
        ceil_at_least(df * a / (frac * m / big_m).ln_1p() - df - kf + 2.0, k)
    });
    let numeric = bound_n_numeric(d, k, m, big_m, n_max)?;
    Ok(BoundReport {
        field: Field::Complex,
        d,
        k,
        m,
        big_m,
        general,
        k1,
        improved,
        reznick: None,
        numeric,
        n_max,
        gamma,
        ratio_r: df * kf * (2.0 * kf - 1.0) / (general as f64 + kf + df - 1.0),
        leading_general: leading,
        leading_reznick: None,
    })
}

fn exact_pair(m: f64, big_m: f64) -> Result<(Rational, Rational)> {
    let conv = |v: f64| ratio_from_f64(v).ok_or_else(|| Error::InvalidParameter(format!("not a finite number: {v}")));
    Ok((conv(m)?, conv(big_m)?))
}

/// `m q(n,k,k) - M Σ_{t<k} |q(n,k,t)| ((k)_{k-t})^{-2} (d/2)^{k-t} (2k)_{2k-2t}`.
pub fn complex_bracket(d: usize, k: usize, n: usize, m: &Rational, big_m: &Rational) -> Result<Rational> {
    let mut acc = m * coeff_q(n, k, k, d)?;
    let half_d = Rational::new(d.into(), 2.into());
    for t in 0..k {
        let fk = qb(falling(k, k - t));
        let term = coeff_q(n, k, t, d)?.abs() / (&fk * &fk) * pow(&half_d, k - t) * qb(falling(2 * k, 2 * k - 2 * t));
        acc -= big_m * term;
    }
    Ok(acc)
}

/// `m q_R(n,k,k) - M Σ_{t<k} |q_R(n,k,t)| d^{k-t}`.
pub fn real_bracket(d: usize, k: usize, n: usize, m: &Rational, big_m: &Rational) -> Result<Rational> {
    let mut acc = m * coeff_q_real(n, k, k, d)?;
    let df = Rational::from_integer(d.into());
    for t in 0..k {
        acc -= big_m * coeff_q_real(n, k, t, d)?.abs() * pow(&df, k - t);
    }
    Ok(acc)
}

fn pow(x: &Rational, e: usize) -> Rational {
    (0..e).fold(Rational::from_integer(1.into()), |acc, _| acc * x)
}

fn search<F>(k: usize, n_max: usize, bracket: F) -> Result<Option<usize>>
where
    F: Fn(usize) -> Result<Rational>,
{
    for n in k..=n_max {
        let b = bracket(n)?;
        if !b.is_negative() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Smallest `n ≥ k` for which the complex bracket is nonnegative, in exact arithmetic.
pub fn bound_n_numeric(d: usize, k: usize, m: f64, big_m: f64, n_max: usize) -> Result<Option<usize>> {
    check_inputs(d, k, m, big_m)?;
    let (mq, bq) = exact_pair(m, big_m)?;
    search(k, n_max, |n| complex_bracket(d, k, n, &mq, &bq))
}

/// Smallest `n ≥ k` for which the real bracket is nonnegative, in exact arithmetic.
pub fn bound_n_real_numeric(d: usize, k: usize, m: f64, big_m: f64, n_max: usize) -> Result<Option<usize>> {
    check_inputs(d, k, m, big_m)?;
    let (mq, bq) = exact_pair(m, big_m)?;
    search(k, n_max, |n| real_bracket(d, k, n, &mq, &bq))
}

pub fn bound_n_real(d: usize, k: usize, m: f64, big_m: f64, n_max: usize) -> Result<BoundReport> {
    check_inputs(d, k, m, big_m)?;
    let (df, kf) = (d as f64, k as f64);
    let gamma = (m / big_m).ln_1p();
    let leading = df * kf * (2.0 * kf - 1.0) / gamma;
    let general = half_ceil_at_least(leading + 2.0 - 2.0 * kf - df, k);
    let k1 = (k == 1).then(|| half_ceil_at_least(df * big_m / m - df, k));
    let improved = (k >= 2).then(|| {
        let a = (kf - 1.0) * (2.0 * kf - 3.0);
        let frac = a / (kf * (2.0 * kf - 1.0));
        half_ceil_at_least(df * a / (frac * m / big_m).ln_1p() + 4.0 - 2.0 * kf - df, k)
    });
    let leading_reznick = df * kf * (2.0 * kf - 1.0) / LN_2 * big_m / m;
    let reznick = Some(half_ceil_at_least(leading_reznick - df, k));
    let numeric = bound_n_real_numeric(d, k, m, big_m, n_max)?;
    Ok(BoundReport {
        field: Field::Real,
        d,
        k,
        m,
        big_m,
        general,
        k1,
        improved,
        reznick,
        numeric,
        n_max,
        gamma,
        ratio_r: kf * (2.0 * kf - 1.0) / (2.0 * general as f64 + 2.0 * kf + df - 2.0),
        leading_general: leading,
        leading_reznick: Some(leading_reznick),
    })
}

impl BoundReport {
    /// The tightest available guaranteed value: the bracket search, else the best closed form.
    pub fn recommended(&self) -> usize {
        self.numeric.unwrap_or_else(|| [self.k1, self.improved].into_iter().flatten().fold(self.general, usize::min))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_example() {
        let r = bound_n_complex(2, 1, 1.0, 3.0, 1000).unwrap();
        assert_eq!(r.k1, Some(4));
        assert!(r.k1.unwrap() <= r.general);
        assert_eq!(r.numeric, Some(4));
    }

    #[test]
    fn flat_polynomial() {
        let r = bound_n_complex(2, 1, 1.0, 1.0, 100).unwrap();
        assert_eq!(r.k1, Some(1));
        assert_eq!(r.numeric, Some(1));
        let rr = bound_n_real(3, 1, 1.0, 1.0, 100).unwrap();
        assert_eq!(rr.k1, Some(1));
    }

    #[test]
    fn identity_bracket_value() {
        let b = complex_bracket(2, 1, 1, &Rational::from_integer(1.into()), &Rational::from_integer(1.into())).unwrap();
        assert_eq!(b, Rational::new(2.into(), 3.into()));
    }

    #[test]
    fn k1_bracket_flips_at_closed_form() {
        for d in 1..5usize {
            for (m, big_m) in [(1.0, 3.0), (0.25, 2.0), (0.5, 0.75)] {
                let expect = ((d as f64) * big_m / m - d as f64).ceil().max(1.0) as usize;
                assert_eq!(bound_n_numeric(d, 1, m, big_m, 1000).unwrap(), Some(expect), "d={d}");
                let expect_real = (((d as f64) * big_m / m - d as f64) / 2.0).ceil().max(1.0) as usize;
                assert_eq!(bound_n_real_numeric(d, 1, m, big_m, 1000).unwrap(), Some(expect_real), "d={d}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive_minimum() {
        assert!(matches!(bound_n_complex(2, 1, 0.0, 1.0, 10), Err(Error::NotPositive(_))));
        assert!(bound_n_real(2, 1, 2.0, 1.0, 10).is_err());
    }
}
