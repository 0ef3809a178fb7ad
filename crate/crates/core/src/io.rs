//! JSON schemas for polynomial input, exact coefficient tables and report fields.

use std::path::Path;

use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::chiribella::CoeffTable;
use crate::error::{Error, Result};
use crate::scalar::{fmt_ratio, parse_ratio, ratio_from_f64, ratio_to_f64, ComplexRational, Rational};
use crate::symspace::{BiForm, RealSymPoly, SymIndex};

/// Floats written as decimal strings with 17 significant digits.
pub mod decimal {
    pub const SIGNIFICANT_DIGITS: usize = 17;

    pub fn format(v: f64) -> String {
        format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
    }

    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Loose {
        Num(f64),
        Text(String),
    }

    fn parse<E: serde::de::Error>(l: Loose) -> Result<f64, E> {
        match l {
            Loose::Num(v) => Ok(v),
            Loose::Text(s) => s.trim().parse().map_err(|_| E::custom(format!("not a decimal number: {s:?}"))),
        }
    }

    pub mod scalar {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&super::format(*v))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
            super::parse(super::Loose::deserialize(d)?)
        }
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&super::format(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<super::Loose>::deserialize(d)?.into_iter().map(super::parse).collect()
        }
    }
}

/// Exact rationals written as `p/q` strings.
pub mod fraction {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::{fmt_ratio, parse_ratio, Rational};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_ratio(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_ratio(&text).ok_or_else(|| serde::de::Error::custom(format!("not a fraction: {text:?}")))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.serialize_some(&fmt_ratio(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_ratio(&t).ok_or_else(|| serde::de::Error::custom(format!("not a fraction: {t:?}"))))
                .transpose()
        }
    }

    pub mod vec {
        use serde::ser::SerializeSeq;

        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&fmt_ratio(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .into_iter()
                .map(|t| parse_ratio(&t).ok_or_else(|| serde::de::Error::custom(format!("not a fraction: {t:?}"))))
                .collect()
        }
    }
}

/// Integer given either as a JSON number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntLike {
    Int(i64),
    Text(String),
}

impl IntLike {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntLike::Int(v) => Ok(BigInt::from(*v)),
            IntLike::Text(s) => s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyField {
    Complex,
    Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub alpha: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num: Option<IntLike>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<IntLike>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im_num: Option<IntLike>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im_den: Option<IntLike>,
}

/// Polynomial input file. For real polynomials `k` is half the degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub field: PolyField,
    pub d: usize,
    pub k: usize,
    #[serde(rename = "D", default = "one")]
    pub ancilla: usize,
    pub terms: Vec<PolyTerm>,
}

fn one() -> usize {
    1
}

/// A parsed polynomial, always held with exact rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum Poly {
    Complex(BiForm<ComplexRational>),
    Real(RealSymPoly<Rational>),
}

fn part(float: Option<f64>, num: &Option<IntLike>, den: &Option<IntLike>, what: &str) -> Result<(Rational, bool)> {
    match (num, den, float) {
        (Some(n), d, _) => {
            let den = match d {
                Some(d) => d.to_bigint()?,
                None => BigInt::from(1),
            };
            if den == BigInt::from(0) {
                return Err(Error::Parse(format!("{what}: zero denominator")));
            }
            Ok((Rational::new(n.to_bigint()?, den), true))
        }
        (None, Some(_), _) => Err(Error::Parse(format!("{what}: denominator without numerator"))),
        (None, None, Some(v)) => ratio_from_f64(v).map(|r| (r, false)).ok_or_else(|| Error::Parse(format!("{what}: {v} is not finite"))),
        (None, None, None) => Ok((Rational::from_integer(0.into()), true)),
    }
}

impl PolyJson {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// True when every coefficient was given as an exact fraction.
    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| t.re.is_none() && t.im.is_none())
    }

    pub fn to_poly(&self) -> Result<Poly> {
        if self.d == 0 {
            return Err(Error::Parse("d must be >= 1".into()));
        }
        match self.field {
            PolyField::Real => {
                if self.ancilla != 1 {
                    return Err(Error::Parse("real polynomials support D = 1 only".into()));
                }
                let mut terms = Vec::with_capacity(self.terms.len());
                for t in &self.terms {
                    if t.beta.is_some() || t.im.is_some() || t.im_num.is_some() {
                        return Err(Error::Parse("real terms take alpha and a real coefficient only".into()));
                    }
                    self.check_len(&t.alpha)?;
                    terms.push((SymIndex::new(t.alpha.clone()), part(t.re, &t.num, &t.den, "re")?.0));
                }
                Ok(Poly::Real(RealSymPoly::from_terms(self.d, self.k, terms)?))
            }
            PolyField::Complex => {
                let mut terms = Vec::with_capacity(self.terms.len());
                for t in &self.terms {
                    let beta = t.beta.as_ref().ok_or_else(|| Error::Parse("complex terms need beta".into()))?;
                    self.check_len(&t.alpha)?;
                    self.check_len(beta)?;
                    let re = part(t.re, &t.num, &t.den, "re")?.0;
                    let im = part(t.im, &t.im_num, &t.im_den, "im")?.0;
                    terms.push((
                        SymIndex::new(t.alpha.clone()),
                        SymIndex::new(beta.clone()),
                        t.i.unwrap_or(0),
                        t.j.unwrap_or(0),
                        ComplexRational::new(re, im),
                    ));
                }
                let form = BiForm::from_terms(self.d, self.k, self.ancilla, terms)?;
                if !form.is_hermitian() {
                    return Err(Error::NotHermitian(
                        "the coefficient of x^a conj(x)^b y_i conj(y_j) must be the conjugate of that of x^b conj(x)^a y_j conj(y_i)".into(),
                    ));
                }
                Ok(Poly::Complex(form))
            }
        }
    }

    fn check_len(&self, e: &[u32]) -> Result<()> {
        if e.len() != self.d {
            return Err(Error::Parse(format!("exponent {e:?} has length {}, expected d = {}", e.len(), self.d)));
        }
        Ok(())
    }

    /// Exact JSON form of a real polynomial.
    pub fn from_real(p: &RealSymPoly<Rational>) -> Self {
        let terms = p
            .terms()
            .into_iter()
            .map(|(a, v)| PolyTerm {
                alpha: a.exponents().to_vec(),
                beta: None,
                i: None,
                j: None,
                re: None,
                im: None,
                num: Some(IntLike::Text(v.numer().to_string())),
                den: Some(IntLike::Text(v.denom().to_string())),
                im_num: None,
                im_den: None,
            })
            .collect();
        Self { field: PolyField::Real, d: p.d(), k: p.k(), ancilla: 1, terms }
    }

    /// Exact JSON form of a bi-Hermitian form.
    pub fn from_complex(f: &BiForm<ComplexRational>) -> Self {
        let terms = f
            .terms()
            .into_iter()
            .map(|(a, b, i, j, v)| PolyTerm {
                alpha: a.exponents().to_vec(),
                beta: Some(b.exponents().to_vec()),
                i: Some(i),
                j: Some(j),
                re: None,
                im: None,
                num: Some(IntLike::Text(v.re.numer().to_string())),
                den: Some(IntLike::Text(v.re.denom().to_string())),
                im_num: Some(IntLike::Text(v.im.numer().to_string())),
                im_den: Some(IntLike::Text(v.im.denom().to_string())),
            })
            .collect();
        Self { field: PolyField::Complex, d: f.d(), k: f.k(), ancilla: f.ancilla(), terms }
    }
}

/// Coefficient `value · x^alpha` with an exact fraction and its float value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffTerm {
    pub alpha: Vec<u32>,
    pub value: String,
    pub approx: f64,
}

impl CoeffTerm {
    pub fn from_poly(p: &RealSymPoly<Rational>) -> Vec<Self> {
        p.terms()
            .into_iter()
            .map(|(a, v)| Self { alpha: a.exponents().to_vec(), value: fmt_ratio(&v), approx: ratio_to_f64(&v) })
            .collect()
    }
}

/// [`CoeffTable`] with every entry as a `p/q` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffTableJson {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub c: Vec<String>,
    pub q: Vec<String>,
    pub qhat: Vec<String>,
    pub c_real: Vec<String>,
    pub q_real: Vec<String>,
}

impl From<&CoeffTable> for CoeffTableJson {
    fn from(t: &CoeffTable) -> Self {
        let f = |v: &[Rational]| v.iter().map(fmt_ratio).collect();
        Self { d: t.d, k: t.k, n: t.n, c: f(&t.c), q: f(&t.q), qhat: f(&t.qhat), c_real: f(&t.c_real), q_real: f(&t.q_real) }
    }
}

impl TryFrom<&CoeffTableJson> for CoeffTable {
    type Error = Error;

    fn try_from(j: &CoeffTableJson) -> Result<Self> {
        let f = |v: &[String]| -> Result<Vec<Rational>> {
            v.iter().map(|s| parse_ratio(s).ok_or_else(|| Error::Parse(format!("not a fraction: {s:?}")))).collect()
        };
        Ok(CoeffTable { d: j.d, k: j.k, n: j.n, c: f(&j.c)?, q: f(&j.q)?, qhat: f(&j.qhat)?, c_real: f(&j.c_real)?, q_real: f(&j.q_real)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn decimal_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 12345.678] {
            assert_eq!(decimal::format(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn parse_real_fraction() {
        let text = r#"{"field":"real","d":2,"k":1,"terms":[{"alpha":[2,0],"num":1,"den":3},{"alpha":[0,2],"re":0.5}]}"#;
        let pj: PolyJson = serde_json::from_str(text).unwrap();
        assert!(!pj.is_exact());
        let Poly::Real(p) = pj.to_poly().unwrap() else { panic!("expected real") };
        assert_eq!(p.coeff(&SymIndex::new(vec![2, 0])), Some(&q(1, 3)));
        assert_eq!(p.coeff(&SymIndex::new(vec![0, 2])), Some(&q(1, 2)));
        let back = PolyJson::from_real(&p);
        assert_eq!(back.to_poly().unwrap(), Poly::Real(p));
    }

    #[test]
    fn parse_complex_and_reject_non_hermitian() {
        let text = r#"{"field":"complex","d":2,"k":1,"D":1,"terms":[
            {"alpha":[1,0],"beta":[1,0],"re":1.0},
            {"alpha":[0,1],"beta":[0,1],"re":3.0},
            {"alpha":[1,0],"beta":[0,1],"re":0.5,"im":0.25},
            {"alpha":[0,1],"beta":[1,0],"re":0.5,"im":-0.25}]}"#;
        let pj: PolyJson = serde_json::from_str(text).unwrap();
        let Poly::Complex(f) = pj.to_poly().unwrap() else { panic!("expected complex") };
        let again = PolyJson::from_complex(&f).to_poly().unwrap();
        assert_eq!(again, Poly::Complex(f));
        let bad = text.replace("\"im\":-0.25", "\"im\":0.25");
        let pj: PolyJson = serde_json::from_str(&bad).unwrap();
        assert!(matches!(pj.to_poly(), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn coeff_table_round_trip() {
        let t = CoeffTable::new(3, 2, 4).unwrap();
        let j = CoeffTableJson::from(&t);
        let text = serde_json::to_string(&j).unwrap();
        let back: CoeffTableJson = serde_json::from_str(&text).unwrap();
        assert_eq!(CoeffTable::try_from(&back).unwrap(), t);
    }
}
