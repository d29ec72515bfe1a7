use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::form::Label;

/// An extended real: exact rational, or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum XReal {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl XReal {
    pub fn zero() -> Self {
        XReal::Finite(BigRational::zero())
    }

    pub fn int(n: i64) -> Self {
        XReal::Finite(BigRational::from_integer(n.into()))
    }

    /// `n / d`; panics if `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        XReal::Finite(BigRational::new(n.into(), d.into()))
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            XReal::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, XReal::Finite(_))
    }

    /// Sum, or `None` for `∞ + −∞`.
    pub fn checked_add(&self, other: &XReal) -> Option<XReal> {
        use XReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
        }
    }

    /// Product with a nonnegative rational; `0 · ±∞ = 0`.
    pub fn scale(&self, c: &BigRational) -> XReal {
        debug_assert!(!c.is_negative());
        match self {
            XReal::Finite(a) => XReal::Finite(a * c),
            _ if c.is_zero() => XReal::zero(),
            inf => inf.clone(),
        }
    }

    pub fn neg(&self) -> XReal {
        match self {
            XReal::NegInf => XReal::PosInf,
            XReal::Finite(a) => XReal::Finite(-a),
            XReal::PosInf => XReal::NegInf,
        }
    }

    /// Approximate value, for reports and float oracles.
    pub fn to_f64(&self) -> f64 {
        match self {
            XReal::NegInf => f64::NEG_INFINITY,
            XReal::PosInf => f64::INFINITY,
            XReal::Finite(r) => ratio_to_f64(r),
        }
    }

    /// Decimal rendering with repeating digits marked by a macron, e.g.
    /// `0.42̄` for 19/45.
    pub fn decimal(&self) -> String {
        match self {
            XReal::Finite(r) => repeating_decimal(r),
            other => other.to_string(),
        }
    }

    /// `5/9 (= 0.5̄)`; plain when the decimal adds nothing.
    pub fn describe(&self) -> String {
        let exact = self.to_string();
        let dec = self.decimal();
        if dec == exact {
            exact
        } else {
            format!("{exact} (= {dec})")
        }
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl From<BigRational> for XReal {
    fn from(r: BigRational) -> Self {
        XReal::Finite(r)
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XReal::NegInf => f.write_str("-inf"),
            XReal::PosInf => f.write_str("inf"),
            XReal::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            XReal::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for XReal {
    type Err = Error;

    /// Accepts integers, decimals (`-0.25`), fractions (`5/9`), `inf`,
    /// `+inf` and `-inf`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            location: format!("value {s:?}"),
            message: "expected an integer, decimal, fraction, inf or -inf".into(),
        };
        let t = s.trim();
        match t {
            "inf" | "+inf" => return Ok(XReal::PosInf),
            "-inf" => return Ok(XReal::NegInf),
            _ => {}
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(XReal::Finite(BigRational::new(n, d)));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty()
            || !int.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(numer, denom);
        Ok(XReal::Finite(if neg { -r } else { r }))
    }
}

const MACRON: char = '\u{0304}';
const MAX_DIGITS: usize = 16;

fn repeating_decimal(r: &BigRational) -> String {
    let mut out = String::new();
    if r.is_negative() {
        out.push('-');
    }
    let r = r.abs();
    let int = r.trunc();
    out.push_str(&int.numer().to_string());
    let mut rem = (&r - &int).numer().clone();
    let den = r.denom().clone();
    if rem.is_zero() {
        return out;
    }
    out.push('.');
    let ten = BigInt::from(10);
    let mut digits: Vec<char> = Vec::new();
    let mut seen: BTreeMap<BigInt, usize> = BTreeMap::new();
    while !rem.is_zero() {
        if let Some(&start) = seen.get(&rem) {
            for (k, d) in digits.iter().enumerate() {
                out.push(*d);
                if k >= start {
                    out.push(MACRON);
                }
            }
            return out;
        }
        if digits.len() == MAX_DIGITS {
            out.extend(digits);
            out.push('…');
            return out;
        }
        seen.insert(rem.clone(), digits.len());
        rem *= &ten;
        let d = &rem / &den;
        rem -= &d * &den;
        let d = num_traits::ToPrimitive::to_u32(&d).expect("decimal digit");
        digits.push(char::from_digit(d, 10).expect("decimal digit"));
    }
    out.extend(digits);
    out
}

/// A stakeholder-indexed utility profile.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile(BTreeMap<Label, XReal>);

impl Profile {
    pub fn new(values: BTreeMap<Label, XReal>) -> Self {
        Profile(values)
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, XReal)>) -> Self {
        Profile(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    /// Every stakeholder gets `x`.
    pub fn constant(stakeholders: &BTreeSet<Label>, x: XReal) -> Self {
        Profile(
            stakeholders
                .iter()
                .map(|k| (k.clone(), x.clone()))
                .collect(),
        )
    }

    pub fn get(&self, k: &str) -> Option<&XReal> {
        self.0.get(k)
    }

    /// The coordinate for `k`; panics when `k` is not a stakeholder.
    pub fn at(&self, k: &str) -> &XReal {
        self.0
            .get(k)
            .unwrap_or_else(|| panic!("profile has no stakeholder {k:?}"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &XReal)> {
        self.0.iter()
    }

    pub fn stakeholders(&self) -> BTreeSet<Label> {
        self.0.keys().cloned().collect()
    }

    pub fn as_map(&self) -> &BTreeMap<Label, XReal> {
        &self.0
    }

    /// `self + c · other`, coordinatewise; `None` on `∞ − ∞`.
    pub fn plus_scaled(&self, c: &BigRational, other: &Profile) -> Option<Profile> {
        let mut out = BTreeMap::new();
        for (k, a) in &self.0 {
            let b = other.get(k)?.scale(c);
            out.insert(k.clone(), a.checked_add(&b)?);
        }
        Some(Profile(out))
    }

    pub fn scaled(&self, c: &BigRational) -> Profile {
        Profile(
            self.0
                .iter()
                .map(|(k, v)| (k.clone(), v.scale(c)))
                .collect(),
        )
    }

    pub fn zero(stakeholders: &BTreeSet<Label>) -> Self {
        Self::constant(stakeholders, XReal::zero())
    }

    /// Like `Display`, with repeating decimals spelled out.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| format!("{k}: {}", v.describe()))
            .collect();
        format!("({})", parts.join(", "))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (n, (k, v)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str(")")
    }
}

impl FromIterator<(Label, XReal)> for Profile {
    fn from_iter<T: IntoIterator<Item = (Label, XReal)>>(iter: T) -> Self {
        Profile(iter.into_iter().collect())
    }
}
