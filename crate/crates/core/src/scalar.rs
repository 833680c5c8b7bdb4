//! Arbitrary-precision scalars.
//!
//! A [`Scalar`] is either an exact rational or a binary big-float carrying its
//! own precision. Exact values never round. Mixing the two promotes the exact
//! operand to the float's precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Complete, Float as BigFloat, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default working precision for big-float mode.
pub const DEFAULT_PRECISION_BITS: u32 = 256;
/// Smallest precision accepted for big-float mode.
pub const MIN_PRECISION_BITS: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("exact mode requires an integer sigma, got {0}")]
    NonIntegerSigma(String),
    #[error("sigma must be >= 1, got {0}")]
    SigmaBelowOne(String),
    #[error("precision of {0} bits is below the minimum of {MIN_PRECISION_BITS}")]
    PrecisionTooLow(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse number `{0}`")]
    Parse(String),
}

/// Arithmetic mode for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NumericMode {
    Exact,
    Float { precision_bits: u32 },
}

impl NumericMode {
    pub fn float(precision_bits: u32) -> Result<Self, ScalarError> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(ScalarError::PrecisionTooLow(precision_bits));
        }
        Ok(NumericMode::Float { precision_bits })
    }

    /// Exact whenever sigma is an integer, big-float at the default precision otherwise.
    pub fn for_sigma(sigma: &Sigma) -> Self {
        if sigma.integer().is_some() {
            NumericMode::Exact
        } else {
            NumericMode::Float {
                precision_bits: DEFAULT_PRECISION_BITS,
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, NumericMode::Exact)
    }

    pub fn name(&self) -> &'static str {
        match self {
            NumericMode::Exact => "exact",
            NumericMode::Float { .. } => "float",
        }
    }

    pub fn precision_bits(&self) -> Option<u32> {
        match self {
            NumericMode::Exact => None,
            NumericMode::Float { precision_bits } => Some(*precision_bits),
        }
    }
}

/// An exact rational or a rounded big-float.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(Rational),
    Float(BigFloat),
}

impl Scalar {
    pub fn zero(mode: NumericMode) -> Self {
        Self::from_i64(0, mode)
    }

    pub fn one(mode: NumericMode) -> Self {
        Self::from_i64(1, mode)
    }

    pub fn from_i64(v: i64, mode: NumericMode) -> Self {
        match mode {
            NumericMode::Exact => Scalar::Exact(Rational::from(v)),
            NumericMode::Float { precision_bits } => {
                Scalar::Float(BigFloat::with_val(precision_bits, v))
            }
        }
    }

    pub fn from_integer(v: Integer, mode: NumericMode) -> Self {
        match mode {
            NumericMode::Exact => Scalar::Exact(Rational::from(v)),
            NumericMode::Float { precision_bits } => {
                Scalar::Float(BigFloat::with_val(precision_bits, v))
            }
        }
    }

    pub fn from_rational(v: Rational, mode: NumericMode) -> Self {
        match mode {
            NumericMode::Exact => Scalar::Exact(v),
            NumericMode::Float { precision_bits } => {
                Scalar::Float(BigFloat::with_val(precision_bits, v))
            }
        }
    }

    /// Parses a decimal string, `p/q` rational or float literal in the given mode.
    pub fn parse(s: &str, mode: NumericMode) -> Result<Self, ScalarError> {
        let s = s.trim();
        match mode {
            NumericMode::Exact => parse_rational(s)
                .map(Scalar::Exact)
                .ok_or_else(|| ScalarError::Parse(s.to_string())),
            NumericMode::Float { precision_bits } => {
                if let Some(r) = parse_rational(s) {
                    return Ok(Scalar::Float(BigFloat::with_val(precision_bits, r)));
                }
                let parsed = BigFloat::parse(s).map_err(|_| ScalarError::Parse(s.to_string()))?;
                Ok(Scalar::Float(BigFloat::with_val(precision_bits, parsed)))
            }
        }
    }

    pub fn mode(&self) -> NumericMode {
        match self {
            Scalar::Exact(_) => NumericMode::Exact,
            Scalar::Float(f) => NumericMode::Float {
                precision_bits: f.prec(),
            },
        }
    }

    /// Converts to the given mode; exact to float rounds, float to exact is exact
    /// (every finite binary float is a rational).
    pub fn to_mode(&self, mode: NumericMode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(r), NumericMode::Exact) => Scalar::Exact(r.clone()),
            (Scalar::Exact(r), NumericMode::Float { precision_bits }) => {
                Scalar::Float(BigFloat::with_val(precision_bits, r))
            }
            (Scalar::Float(f), NumericMode::Exact) => {
                Scalar::Exact(f.to_rational().unwrap_or_default())
            }
            (Scalar::Float(f), NumericMode::Float { precision_bits }) => {
                Scalar::Float(BigFloat::with_val(precision_bits, f))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.cmp0() == Ordering::Equal,
            Scalar::Float(f) => f.is_zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(f) => f.is_finite(),
        }
    }

    pub fn signum(&self) -> i32 {
        let ord = match self {
            Scalar::Exact(r) => Some(r.cmp0()),
            Scalar::Float(f) => f.cmp0(),
        };
        match ord {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.clone().abs()),
            Scalar::Float(f) => Scalar::Float(f.clone().abs()),
        }
    }

    pub fn pow_u32(&self, e: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.pow(e).complete()),
            Scalar::Float(f) => Scalar::Float(BigFloat::with_val(f.prec(), f.pow(e))),
        }
    }

    /// `self^e` for a signed exponent; a zero base with negative exponent is an error.
    pub fn pow_i64(&self, e: i64) -> Result<Scalar, ScalarError> {
        if e >= 0 {
            return Ok(self.pow_u32(e as u32));
        }
        let inv = self.recip()?;
        Ok(inv.pow_u32(e.unsigned_abs() as u32))
    }

    pub fn recip(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Exact(r) => Scalar::Exact(r.clone().recip()),
            Scalar::Float(f) => Scalar::Float(f.clone().recip()),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn mul_integer(&self, k: &Integer) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact((r * k).complete()),
            Scalar::Float(f) => Scalar::Float(BigFloat::with_val(f.prec(), f * k)),
        }
    }

    /// `self += k * a * b`, the Leibniz accumulation step.
    pub fn add_scaled_product(&mut self, k: &Integer, a: &Scalar, b: &Scalar) {
        match (&mut *self, a, b) {
            (Scalar::Exact(acc), Scalar::Exact(x), Scalar::Exact(y)) => {
                let mut t = (x * y).complete();
                t *= k;
                *acc += t;
            }
            _ => {
                let t = (a * b).mul_integer(k);
                *self += &t;
            }
        }
    }

    /// Natural logarithm as a big-float with at least `prec` bits; `None` for values <= 0.
    pub fn ln(&self, prec: u32) -> Option<BigFloat> {
        if self.signum() <= 0 {
            return None;
        }
        Some(match self {
            Scalar::Exact(r) => {
                // log(p) - log(q) keeps full relative precision on 80-digit integers
                let num = BigFloat::with_val(prec, r.numer()).ln();
                let den = BigFloat::with_val(prec, r.denom()).ln();
                num - den
            }
            Scalar::Float(f) => BigFloat::with_val(prec.max(f.prec()), f).ln(),
        })
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Float(f) => f.to_f64(),
        }
    }

    pub fn to_big_float(&self, prec: u32) -> BigFloat {
        match self {
            Scalar::Exact(r) => BigFloat::with_val(prec, r),
            Scalar::Float(f) => BigFloat::with_val(prec, f),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn max<'a>(&'a self, other: &'a Scalar) -> &'a Scalar {
        if other > self {
            other
        } else {
            self
        }
    }
}

fn float_of(r: &Rational, like: &BigFloat) -> BigFloat {
    BigFloat::with_val(like.prec(), r)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
            (Scalar::Float(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Exact(a), Scalar::Float(b)) => b.partial_cmp(a).map(Ordering::reverse),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact((a + b).complete()),
            (Scalar::Float(a), Scalar::Float(b)) => {
                Scalar::Float(BigFloat::with_val(a.prec().max(b.prec()), a + b))
            }
            (Scalar::Float(a), Scalar::Exact(b)) | (Scalar::Exact(b), Scalar::Float(a)) => {
                Scalar::Float(BigFloat::with_val(a.prec(), a + b))
            }
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact((a - b).complete()),
            (Scalar::Float(a), Scalar::Float(b)) => {
                Scalar::Float(BigFloat::with_val(a.prec().max(b.prec()), a - b))
            }
            (Scalar::Float(a), Scalar::Exact(b)) => {
                Scalar::Float(BigFloat::with_val(a.prec(), a - b))
            }
            (Scalar::Exact(a), Scalar::Float(b)) => {
                Scalar::Float(BigFloat::with_val(b.prec(), &float_of(a, b) - b))
            }
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact((a * b).complete()),
            (Scalar::Float(a), Scalar::Float(b)) => {
                Scalar::Float(BigFloat::with_val(a.prec().max(b.prec()), a * b))
            }
            (Scalar::Float(a), Scalar::Exact(b)) | (Scalar::Exact(b), Scalar::Float(a)) => {
                Scalar::Float(BigFloat::with_val(a.prec(), a * b))
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact((-a).complete()),
            Scalar::Float(a) => Scalar::Float(BigFloat::with_val(a.prec(), -a)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => *a += b,
            (Scalar::Float(a), Scalar::Float(b)) => {
                if b.prec() > a.prec() {
                    a.set_prec(b.prec());
                }
                *a += b;
            }
            (Scalar::Float(a), Scalar::Exact(b)) => *a += b,
            (Scalar::Exact(a), Scalar::Float(b)) => {
                *self = Scalar::Float(BigFloat::with_val(b.prec(), &float_of(a, b) + b));
            }
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self += &(-rhs);
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => *a *= b,
            (Scalar::Float(a), Scalar::Exact(b)) => *a *= b,
            _ => *self = &*self * rhs,
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if *r.denom() == 1 {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => f.write_str(&x.to_string_radix(10, None)),
        }
    }
}

/// Parses `p`, `p/q`, or a decimal literal such as `-0.125` or `2.5e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if s.contains('/') {
        let r: Rational = s.parse().ok()?;
        return Some(r);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: Integer = all.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = Integer::from(10);
    let r = if scale >= 0 {
        Rational::from(num * ten.pow(scale as u32))
    } else {
        Rational::from((num, ten.pow(scale.unsigned_abs())))
    };
    Some(r)
}

/// Gevrey index, a rational number >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sigma(Rational);

impl Sigma {
    pub fn new(value: Rational) -> Result<Self, ScalarError> {
        if value < 1 {
            return Err(ScalarError::SigmaBelowOne(value.to_string()));
        }
        Ok(Sigma(value))
    }

    pub fn from_u32(v: u32) -> Result<Self, ScalarError> {
        Self::new(Rational::from(v))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn integer(&self) -> Option<u32> {
        if *self.0.denom() == 1 {
            self.0.numer().to_u32()
        } else {
            None
        }
    }

    pub fn to_big_float(&self, prec: u32) -> BigFloat {
        BigFloat::with_val(prec, &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl FromStr for Sigma {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r = parse_rational(s).ok_or_else(|| ScalarError::Parse(s.to_string()))?;
        Sigma::new(r)
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Scalar::Exact(self.0.clone()))
    }
}

impl Serialize for Sigma {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Sigma {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(n!)^sigma`. Exact mode needs an integer sigma and returns the exact integer.
pub fn factorial_pow(n: u32, sigma: &Sigma, mode: NumericMode) -> Result<Scalar, ScalarError> {
    let fact = Integer::factorial(n).complete();
    match (mode, sigma.integer()) {
        (NumericMode::Exact, Some(s)) => Ok(Scalar::Exact(Rational::from(fact.pow(s)))),
        (NumericMode::Exact, None) => Err(ScalarError::NonIntegerSigma(sigma.to_string())),
        (NumericMode::Float { precision_bits }, Some(s)) => Ok(Scalar::Float(BigFloat::with_val(
            precision_bits,
            fact.pow(s),
        ))),
        (NumericMode::Float { precision_bits }, None) => {
            // guard digits for the exp(sigma * ln n!) route
            let work = precision_bits + 64;
            let base = BigFloat::with_val(work, &fact);
            let powed = base.pow(&sigma.to_big_float(work));
            Ok(Scalar::Float(BigFloat::with_val(precision_bits, powed)))
        }
    }
}

/// Exact binomial coefficient, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> Integer {
    if n < 0 || k < 0 || k > n {
        return Integer::new();
    }
    Integer::binomial_u(n as u32, k as u32).complete()
}
