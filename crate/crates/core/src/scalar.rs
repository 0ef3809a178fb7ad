//! Scalar abstraction shared by the exact (rational) and float code paths.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, ToPrimitive, Zero};
use num::{BigInt, BigRational, Complex};

pub type Rational = BigRational;
pub type ComplexRational = Complex<BigRational>;
pub type C64 = Complex<f64>;

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(q: &Rational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(&Rational::from_integer(BigInt::from(v)))
    }

    fn conj(&self) -> Self;

    fn to_c64(&self) -> C64;

    /// Magnitude used for tolerance checks.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
}

pub fn ratio_to_f64(q: &Rational) -> f64 {
    match q.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            // numerator/denominator too large for a direct conversion
            let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
            let shift = shift.max(0) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl Scalar for f64 {
    fn from_ratio(q: &Rational) -> Self {
        ratio_to_f64(q)
    }
    fn conj(&self) -> Self {
        *self
    }
    fn to_c64(&self) -> C64 {
        C64::new(*self, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for C64 {
    fn from_ratio(q: &Rational) -> Self {
        C64::new(ratio_to_f64(q), 0.0)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_ratio(q: &Rational) -> Self {
        q.clone()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn to_c64(&self) -> C64 {
        C64::new(ratio_to_f64(self), 0.0)
    }
}

impl Scalar for ComplexRational {
    fn from_ratio(q: &Rational) -> Self {
        Complex::new(q.clone(), Rational::zero())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn to_c64(&self) -> C64 {
        C64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
}

/// Exact rational from an `f64`; every finite double is a dyadic rational.
pub fn ratio_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

/// Render a rational as `p/q` (or `p` when integral).
pub fn fmt_ratio(q: &Rational) -> String {
    if q.denom() == &BigInt::one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p/q` or an integer.
pub fn parse_ratio(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qb(n: BigInt) -> Rational {
    Rational::from_integer(n)
}
