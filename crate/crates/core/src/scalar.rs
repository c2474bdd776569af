//! Exact field elements over the rationals or a prime field.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// The coefficient field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    Prime(u64),
}

impl Field {
    pub const DEFAULT_PRIME: u64 = 32003;

    /// A prime field; the modulus must be a prime below 2^31 so products fit in a u64.
    pub fn prime(p: u64) -> Result<Field, AlgebraError> {
        if !(2..(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn is_rationals(self) -> bool {
        matches!(self, Field::Rationals)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = AlgebraError;

    /// Accepts `QQ` or `fp:<p>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "QQ" {
            return Ok(Field::Rationals);
        }
        if let Some(rest) = s.strip_prefix("fp:") {
            let p: u64 =
                rest.parse().map_err(|_| AlgebraError::Parse { pos: 3, msg: format!("bad modulus `{rest}`") })?;
            return Field::prime(p);
        }
        Err(AlgebraError::Parse { pos: 0, msg: format!("unknown field `{s}` (expected QQ or fp:<p>)") })
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact element of a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
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

pub(crate) fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a, p - 2, p)
}

impl Scalar {
    pub fn zero(field: Field) -> Scalar {
        Scalar::from_int(field, 0)
    }

    pub fn one(field: Field) -> Scalar {
        Scalar::from_int(field, 1)
    }

    pub fn from_int(field: Field, v: i64) -> Scalar {
        match field {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Modular { value: v.rem_euclid(p as i64) as u64, modulus: p },
        }
    }

    pub fn from_bigint(field: Field, v: &BigInt) -> Scalar {
        match field {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                Scalar::Modular { value: r.to_u64().expect("reduced residue"), modulus: p }
            }
        }
    }

    /// `num/den` in the field; `None` when the denominator vanishes there.
    pub fn from_ratio(field: Field, num: &BigInt, den: &BigInt) -> Option<Scalar> {
        match field {
            Field::Rationals => {
                if den.is_zero() {
                    None
                } else {
                    Some(Scalar::Rational(BigRational::new(num.clone(), den.clone())))
                }
            }
            Field::Prime(_) => {
                let d = Scalar::from_bigint(field, den);
                d.inv().map(|di| &Scalar::from_bigint(field, num) * &di)
            }
        }
    }

    pub fn from_rational(field: Field, q: &BigRational) -> Option<Scalar> {
        Scalar::from_ratio(field, q.numer(), q.denom())
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Modular { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Modular { value, modulus } => {
                Scalar::Modular { value: mod_inv(*value, *modulus), modulus: *modulus }
            }
        })
    }

    pub fn pow(&self, e: u32) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(num_traits::pow(q.clone(), e as usize)),
            Scalar::Modular { value, modulus } => {
                Scalar::Modular { value: mod_pow(*value, e as u64, *modulus), modulus: *modulus }
            }
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Modular { .. } => None,
        }
    }

    /// The residue for prime-field elements.
    pub fn as_residue(&self) -> Option<u64> {
        match self {
            Scalar::Modular { value, .. } => Some(*value),
            Scalar::Rational(_) => None,
        }
    }

    /// Small integer value when the element is one (used for compact printing and tests).
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(q) if q.is_integer() => q.numer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Modular { value, .. } => Some(*value as i64),
        }
    }

    /// Is the element negative when printed (rationals only)?
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_negative(),
            Scalar::Modular { .. } => false,
        }
    }

    /// Map into another field: identity, or reduction of a rational modulo p.
    pub fn to_field(&self, target: Field) -> Option<Scalar> {
        match (self, target) {
            (Scalar::Rational(q), _) => Scalar::from_rational(target, q),
            (Scalar::Modular { modulus, .. }, Field::Prime(p)) if *modulus == p => Some(self.clone()),
            _ => None,
        }
    }

    pub fn parse(field: Field, s: &str) -> Result<Scalar, AlgebraError> {
        let bad = || AlgebraError::Parse { pos: 0, msg: format!("bad number `{s}`") };
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Scalar::from_ratio(field, &num, &den)
            .ok_or_else(|| AlgebraError::Parse { pos: 0, msg: format!("denominator of `{s}` vanishes in {field}") })
    }

    fn check_same(&self, other: &Scalar) {
        if let (Scalar::Modular { modulus: p, .. }, Scalar::Modular { modulus: q, .. }) = (self, other) {
            assert_eq!(p, q, "scalars from different prime fields");
        } else if std::mem::discriminant(self) != std::mem::discriminant(other) {
            panic!("mixing rational and prime-field scalars");
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Rationals compare by value, prime-field elements by residue in `[0, p)`.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (Scalar::Modular { value: a, .. }, Scalar::Modular { value: b, .. }) => a.cmp(b),
            (Scalar::Rational(_), _) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Serialized as its display string (`"3/2"`, or the residue).
impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular { value: (a + b) % p, modulus: *p }
            }
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular { value: (a + p - b) % p, modulus: *p }
            }
            _ => unreachable!(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular { value: a * b % p, modulus: *p }
            }
            _ => unreachable!(),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Modular { value, modulus } => {
                Scalar::Modular { value: (modulus - value) % modulus, modulus: *modulus }
            }
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_inverse_round_trip() {
        let f = Field::Rationals;
        let a = Scalar::parse(f, "-7/3").unwrap();
        assert!((&a * &a.inv().unwrap()).is_one());
        assert_eq!(a.to_string(), "-7/3");
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        let a = Scalar::from_int(f, 3);
        let b = Scalar::from_int(f, -1);
        assert_eq!((&a + &b).as_residue(), Some(2));
        assert_eq!((&a * &a.inv().unwrap()).as_residue(), Some(1));
        assert_eq!(Scalar::parse(f, "1/2").unwrap().as_residue(), Some(4));
        assert!(Scalar::parse(f, "1/7").is_err());
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Field::prime(32001).is_err());
        assert!(Field::prime(32003).is_ok());
        assert_eq!("fp:32003".parse::<Field>().unwrap(), Field::Prime(32003));
        assert_eq!("QQ".parse::<Field>().unwrap(), Field::Rationals);
    }

    #[test]
    #[should_panic]
    fn mixing_fields_panics() {
        let _ = &Scalar::one(Field::Rationals) + &Scalar::one(Field::Prime(5));
    }
}
