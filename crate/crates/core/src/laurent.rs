//! Univariate Laurent polynomials in `m` with arbitrary-precision integer
//! coefficients, and the linear quandles they are evaluated in.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest exponent magnitude accepted by the text parser.
pub const MAX_PARSE_EXPONENT: i32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("the zero polynomial has no Alexander normalization")]
    Zero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuandleError {
    #[error("modulus n = {0} must be at least 2")]
    ModulusTooSmall(u64),
    #[error("multiplier m = {m} must satisfy 1 <= m < n = {n}")]
    MultiplierRange { m: u64, n: u64 },
    #[error("gcd(m, n) = gcd({m}, {n}) = {g} is not 1")]
    NotCoprime { m: u64, n: u64, g: u64 },
}

/// A finite sum of `c * m^e` with `e` any integer. Zero coefficients are never stored,
/// so structural equality is polynomial equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(BigInt::from(c), 0)
    }

    /// `c * m^e`.
    pub fn monomial(c: BigInt, e: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// The variable `m`.
    pub fn m() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    /// `m^-1`.
    pub fn m_inv() -> Self {
        Self::monomial(BigInt::one(), -1)
    }

    /// Builds `c0 + c1*m + c2*m^2 + ...`.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(e, &c)| (e as i32, BigInt::from(c))))
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, BigInt)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in iter {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i32, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, e: i32) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// `max_exp - min_exp`, the degree once normalized. Zero for the zero polynomial.
    pub fn span(&self) -> u32 {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (hi - lo) as u32,
            _ => 0,
        }
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Coefficients from `m^0` up to the top exponent. `None` if there are negative powers.
    pub fn to_coeffs(&self) -> Option<Vec<BigInt>> {
        match self.min_exp() {
            None => Some(Vec::new()),
            Some(lo) if lo < 0 => None,
            Some(_) => {
                let hi = self.max_exp().unwrap();
                Some((0..=hi).map(|e| self.coeff(e)).collect())
            }
        }
    }

    /// Multiplies by `m^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Value at `m = x` as an exact integer. Negative powers only make sense for `x = ±1`,
    /// so `None` is returned otherwise.
    pub fn eval_int(&self, x: &BigInt) -> Option<BigInt> {
        let unit = x.abs().is_one();
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            if *e < 0 && !unit {
                return None;
            }
            acc += c * num_traits::pow(x.clone(), e.unsigned_abs() as usize);
        }
        Some(acc)
    }

    /// Value in `Z_n` with `m -> q.m()` and `m^-1 -> q.m_inv()`.
    pub fn eval_mod(&self, q: &QuandleSpec) -> u64 {
        let n = BigInt::from(q.n);
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let base = if *e >= 0 { q.m } else { q.m_inv };
            let p = pow_mod(base, e.unsigned_abs() as u64, q.n);
            acc += c * BigInt::from(p);
        }
        acc.mod_floor(&n).to_u64().expect("reduced value fits")
    }

    /// `Some((negative, k))` when the polynomial is `±m^k`.
    pub fn as_unit(&self) -> Option<(bool, i32)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        if c.abs().is_one() {
            Some((c.is_negative(), *e))
        } else {
            None
        }
    }

    pub fn is_unit(&self) -> bool {
        self.as_unit().is_some()
    }

    /// `Some((negative, k))` when `self = ±m^k * other`, both nonzero.
    pub fn unit_ratio(&self, other: &Self) -> Option<(bool, i32)> {
        if self.is_zero() || other.is_zero() || self.terms.len() != other.terms.len() {
            return None;
        }
        let k = self.min_exp()? - other.min_exp()?;
        let (_, c0) = self.terms.iter().next()?;
        let (_, d0) = other.terms.iter().next()?;
        let negative = c0.is_negative() != d0.is_negative();
        if c0.abs() != d0.abs() {
            return None;
        }
        for ((e1, c1), (e2, c2)) in self.terms.iter().zip(other.terms.iter()) {
            if e1 - e2 != k {
                return None;
            }
            let expect = if negative { -c2 } else { c2.clone() };
            if *c1 != expect {
                return None;
            }
        }
        Some((negative, k))
    }

    /// The unique `±m^k * self` with lowest exponent 0 and positive constant term.
    pub fn normalize_alexander(&self) -> Result<Self, LaurentError> {
        let lo = self.min_exp().ok_or(LaurentError::Zero)?;
        let shifted = self.shift(-lo);
        if shifted.coeff(0).is_negative() {
            Ok(-shifted)
        } else {
            Ok(shifted)
        }
    }

    /// True iff `self = ±m^k * other`; two zero polynomials count as unit-equal.
    pub fn unit_equal(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.unit_ratio(other).is_some()
    }

    /// Exact quotient in `Z[m, m^-1]`, or `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let d_lo = divisor.min_exp().unwrap();
        let d_hi = divisor.max_exp().unwrap();
        let d_lead = divisor.coeff(d_hi);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let floor = self.min_exp().unwrap() - d_lo;
        while let Some(hi) = rem.max_exp() {
            let e = hi - d_hi;
            if e < floor {
                return None;
            }
            let (q, r) = rem.coeff(hi).div_rem(&d_lead);
            if !r.is_zero() {
                return None;
            }
            let term = Self::monomial(q, e);
            rem -= &(divisor * &term);
            quot += &term;
        }
        Some(quot)
    }

    /// Greatest common divisor of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }
}

/// `base^exp mod n`.
pub fn pow_mod(base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let n128 = n as u128;
    let mut b = (base % n) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % n128;
        }
        b = b * b % n128;
        exp >>= 1;
    }
    acc as u64
}

/// `gcd(v, n)` for `v` already reduced into `[0, n)`, with `gcd(0, n) = n`.
pub fn gcd_with_modulus(v: u64, n: u64) -> u64 {
    v.gcd(&n)
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match *e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if *e == 1 {
                        write!(f, "m")?;
                    } else {
                        write!(f, "m^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;

    /// Parses sums like `7 - 13*m + 7*m^2` or `m^-1 - 1`. `t` is accepted as a synonym
    /// for `m`, the `*` is optional and whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<(usize, char)> =
            s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let err = |pos: usize, msg: &str| LaurentError::Parse { pos, msg: msg.to_string() };
        if chars.is_empty() {
            return Err(err(0, "empty polynomial"));
        }
        let mut out = LaurentPoly::zero();
        let mut i = 0;
        let pos_at = |i: usize| chars.get(i).map(|&(p, _)| p).unwrap_or(s.len());
        while i < chars.len() {
            let mut negative = false;
            let mut saw_sign = false;
            while i < chars.len() && (chars[i].1 == '+' || chars[i].1 == '-') {
                if saw_sign && i > 0 {
                    return Err(err(pos_at(i), "repeated sign"));
                }
                negative = chars[i].1 == '-';
                saw_sign = true;
                i += 1;
            }
            if !saw_sign && i > 0 {
                return Err(err(pos_at(i), "expected '+' or '-'"));
            }
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let coeff: Option<BigInt> = if i > start {
                let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                Some(digits.parse().map_err(|_| err(pos_at(start), "bad integer"))?)
            } else {
                None
            };
            if i < chars.len() && chars[i].1 == '*' {
                if coeff.is_none() {
                    return Err(err(pos_at(i), "'*' without a coefficient"));
                }
                i += 1;
                if i >= chars.len() || !matches!(chars[i].1, 'm' | 't') {
                    return Err(err(pos_at(i), "expected 'm' after '*'"));
                }
            }
            let mut exp = 0i32;
            if i < chars.len() && matches!(chars[i].1, 'm' | 't') {
                i += 1;
                exp = 1;
                if i < chars.len() && chars[i].1 == '^' {
                    i += 1;
                    let estart = i;
                    if i < chars.len() && chars[i].1 == '-' {
                        i += 1;
                    }
                    let dstart = i;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                    if i == dstart {
                        return Err(err(pos_at(estart), "expected exponent"));
                    }
                    let text: String = chars[estart..i].iter().map(|&(_, c)| c).collect();
                    exp = text
                        .parse::<i32>()
                        .ok()
                        .filter(|e| e.abs() <= MAX_PARSE_EXPONENT)
                        .ok_or_else(|| err(pos_at(estart), "exponent outside [-64, 64]"))?;
                }
            } else if coeff.is_none() {
                return Err(err(pos_at(i), "expected a term"));
            }
            let mut c = coeff.unwrap_or_else(BigInt::one);
            if negative {
                c = -c;
            }
            out.add_term(exp, c);
        }
        Ok(out)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            let key = e.to_string();
            match c.to_i64() {
                Some(v) => map.serialize_entry(&key, &v)?,
                None => map.serialize_entry(&key, &c.to_string())?,
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PolyVisitor;

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coeff {
            Int(i64),
            Text(String),
        }

        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = LaurentPoly;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map from exponent strings to integer coefficients")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<LaurentPoly, A::Error> {
                let mut p = LaurentPoly::zero();
                while let Some((k, v)) = access.next_entry::<String, Coeff>()? {
                    let e: i32 = k.parse().map_err(de::Error::custom)?;
                    let c = match v {
                        Coeff::Int(i) => BigInt::from(i),
                        Coeff::Text(t) => t.parse().map_err(de::Error::custom)?,
                    };
                    p.add_term(e, c);
                }
                Ok(p)
            }
        }

        deserializer.deserialize_map(PolyVisitor)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c);
        }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

pub fn poly_add(p: &LaurentPoly, q: &LaurentPoly) -> LaurentPoly {
    p + q
}

pub fn poly_mul(p: &LaurentPoly, q: &LaurentPoly) -> LaurentPoly {
    p * q
}

pub fn poly_eval_mod(p: &LaurentPoly, q: &QuandleSpec) -> u64 {
    p.eval_mod(q)
}

pub fn poly_normalize_alexander(p: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
    p.normalize_alexander()
}

pub fn poly_unit_equal(p: &LaurentPoly, q: &LaurentPoly) -> bool {
    p.unit_equal(q)
}

/// The linear Alexander quandle `Z_n[t, t^-1]/(t - m)`, i.e. `Z_n` with
/// `a * b = m a + (1 - m) b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuandleSpec {
    n: u64,
    m: u64,
    m_inv: u64,
}

impl QuandleSpec {
    pub fn new(m: u64, n: u64) -> Result<Self, QuandleError> {
        if n < 2 {
            return Err(QuandleError::ModulusTooSmall(n));
        }
        if m == 0 || m >= n {
            return Err(QuandleError::MultiplierRange { m, n });
        }
        let g = m.gcd(&n);
        if g != 1 {
            return Err(QuandleError::NotCoprime { m, n, g });
        }
        let e = (m as i128).extended_gcd(&(n as i128));
        let m_inv = e.x.rem_euclid(n as i128) as u64;
        Ok(Self { n, m, m_inv })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn m_inv(&self) -> u64 {
        self.m_inv
    }

    /// All valid quandles with modulus `n` and multiplier below `m_bound`, in increasing `m`.
    pub fn all_for_modulus(n: u64, m_bound: u64) -> impl Iterator<Item = QuandleSpec> {
        (1..n.min(m_bound)).filter_map(move |m| QuandleSpec::new(m, n).ok())
    }
}

impl fmt::Display for QuandleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, n={})", self.m, self.n)
    }
}
