//! Exact field elements: arbitrary-precision rationals and prime fields.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The default modulus for fast rank computations (2^31 - 1).
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// A base field. Prime moduli are restricted below 2^32 so that products
/// of two residues fit in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if p >= 1 << 32 {
            return Err(Error::InvalidArgument(format!("modulus {p} must be below 2^32")));
        }
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("modulus {p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Prime { value: v.rem_euclid(p as i64) as u64, modulus: p },
        }
    }

    pub fn from_bigint(self, v: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                Scalar::Prime { value: r.to_u64().unwrap(), modulus: p }
            }
        }
    }

    /// Maps a rational number into this field. Fails when the denominator
    /// vanishes modulo p.
    pub fn from_rational(self, v: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Rational(v.clone())),
            Field::Prime(_) => {
                let n = self.from_bigint(v.numer());
                let d = self.from_bigint(v.denom());
                n.checked_div(&d)
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `q` or `fp:<prime>`.
    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("fp:")
            .ok_or_else(|| Error::Parse(format!("unknown field '{s}', expected q or fp:<prime>")))?;
        let p: u64 = p.parse().map_err(|_| Error::Parse(format!("bad modulus '{p}'")))?;
        Field::prime(p)
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Field, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Prime { value: u64, modulus: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

/// Applies `op` to `a` (and `b` for binary operations). Unary operations
/// ignore `b`.
pub fn arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
        ArithOp::Neg => Ok(-a),
        ArithOp::Inv => a.inv(),
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Prime { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
        }
    }

    fn mismatch(&self, other: &Scalar) -> Error {
        Error::FieldMismatch(self.field().to_string(), other.field().to_string())
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q }) if p == q => {
                Ok(Scalar::Prime { value: (a + b) % p, modulus: *p })
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q }) if p == q => {
                Ok(Scalar::Prime { value: a * b % p, modulus: *p })
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::Prime { value, modulus } => Scalar::Prime { value: inv_mod(*value, *modulus), modulus: *modulus },
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        if self.field() != other.field() {
            return Err(self.mismatch(other));
        }
        self.checked_mul(&other.inv()?)
    }

    /// Multiplies by a small integer.
    pub fn scale_i64(&self, c: i64) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(a * BigRational::from_integer(BigInt::from(c))),
            Scalar::Prime { value, modulus } => {
                let c = c.rem_euclid(*modulus as i64) as u64;
                Scalar::Prime { value: value * c % modulus, modulus: *modulus }
            }
        }
    }

    /// Reinterprets the value in another field (rationals reduce mod p).
    pub fn to_field(&self, field: Field) -> Result<Scalar> {
        match (self, field) {
            (Scalar::Rational(r), f) => f.from_rational(r),
            (Scalar::Prime { modulus, .. }, Field::Prime(p)) if *modulus == p => Ok(self.clone()),
            _ => Err(Error::FieldMismatch(self.field().to_string(), field.to_string())),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Prime { .. } => None,
        }
    }
}

// Operator impls panic on a field mismatch; use the checked variants when
// the operands come from untrusted input.
impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).expect("scalar field mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.checked_sub(rhs).expect("scalar field mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).expect("scalar field mismatch")
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => *a += b,
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q }) if p == q => {
                *a = (*a + b) % *p;
            }
            _ => panic!("scalar field mismatch"),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { value, modulus } => Scalar::Prime { value: (modulus - value) % modulus, modulus: *modulus },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Prime { value, modulus } => write!(f, "{value} mod {modulus}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `num/den`, a bare integer, or `v mod p`.
    fn from_str(s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad scalar '{s}'"));
        if let Some((v, p)) = s.split_once("mod") {
            let v: BigInt = v.trim().parse().map_err(|_| bad())?;
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            return Ok(Field::prime(p)?.from_bigint(&v));
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::Rational(BigRational::new(n, d)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(Field::Rational.from_i64(i)),
        }
    }
}

/// Binomial coefficient with the convention that it vanishes when
/// `k < 0`, `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `binomial` as an `i64`; panics on overflow, which cannot happen for the
/// small arguments used by the operation families.
pub fn binomial_i64(n: i64, k: i64) -> i64 {
    binomial(n, k).to_i64().expect("binomial overflow")
}

/// `(-1)^e`.
pub fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn rational_addition() {
        assert_eq!(q("1/2").checked_add(&q("1/3")).unwrap(), q("5/6"));
        assert_eq!(q("5/6").to_string(), "5/6");
        assert_eq!(q("2/4"), q("1/2"));
    }

    #[test]
    fn prime_inverse() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.from_i64(2).inv().unwrap(), f5.from_i64(3));
        assert_eq!(f5.from_i64(2).to_string(), "2 mod 5");
        assert_eq!("3 mod 5".parse::<Scalar>().unwrap(), f5.from_i64(3));
    }

    #[test]
    fn negating_zero() {
        assert_eq!(-Field::Rational.zero(), Field::Rational.zero());
        let f7 = Field::Prime(7);
        assert_eq!(-f7.zero(), f7.zero());
    }

    #[test]
    fn errors() {
        assert!(matches!(q("1").checked_div(&q("0")), Err(Error::DivisionByZero)));
        assert!(matches!(q("1").checked_add(&Field::Prime(5).one()), Err(Error::FieldMismatch(..))));
        assert!(Field::prime(9).is_err());
        assert!("fp:7".parse::<Field>().is_ok());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(7, 0), BigInt::from(1));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(2, 3), BigInt::zero());
        assert_eq!(binomial(-1, 0), BigInt::zero());
        assert_eq!(binomial(3, -1), BigInt::zero());
    }

    #[test]
    fn serde_round_trip() {
        let s = q("-7/3");
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, "\"-7/3\"");
        assert_eq!(serde_json::from_str::<Scalar>(&j).unwrap(), s);
        assert_eq!(serde_json::from_str::<Scalar>("4").unwrap(), q("4"));
    }
}
