//! Exact scalars over the rationals and over prime fields.
//!
//! A [`Scalar`] always knows which field it lives in. Arithmetic between
//! scalars of different fields is rejected by the `checked_*` methods and
//! panics through the operator impls; there is no implicit coercion.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A modulus that passed the primality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(Self(p))
        } else {
            Err(Error::InvalidModulus(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    Rational,
    Prime(PrimeModulus),
}

impl FieldDescriptor {
    pub fn prime(p: u64) -> Result<Self> {
        PrimeModulus::new(p).map(Self::Prime)
    }

    pub fn modulus(self) -> Option<u64> {
        match self {
            Self::Rational => None,
            Self::Prime(p) => Some(p.get()),
        }
    }

    pub fn zero(self) -> Scalar {
        Scalar::from_integer(self, 0)
    }

    pub fn one(self) -> Scalar {
        Scalar::from_integer(self, 1)
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational => f.write_str("Q"),
            Self::Prime(p) => write!(f, "F_{}", p.get()),
        }
    }
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse by Fermat; `a` must be nonzero mod `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Rational(BigRational),
    Prime { value: u64, modulus: PrimeModulus },
}

/// An exact field element in canonical form: a reduced fraction with
/// positive denominator, or a residue in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn from_integer(descriptor: FieldDescriptor, n: i64) -> Self {
        match descriptor {
            FieldDescriptor::Rational => Self(Repr::Rational(BigRational::from_integer(n.into()))),
            FieldDescriptor::Prime(modulus) => {
                let value = (n as i128).rem_euclid(modulus.get() as i128) as u64;
                Self(Repr::Prime { value, modulus })
            }
        }
    }

    pub fn from_bigint(descriptor: FieldDescriptor, n: &BigInt) -> Self {
        match descriptor {
            FieldDescriptor::Rational => Self(Repr::Rational(BigRational::from_integer(n.clone()))),
            FieldDescriptor::Prime(modulus) => {
                let value = n.mod_floor(&BigInt::from(modulus.get())).to_u64().expect("residue fits in u64");
                Self(Repr::Prime { value, modulus })
            }
        }
    }

    /// Image of `numer / denom`; fails if `denom` vanishes in the field.
    pub fn from_ratio(descriptor: FieldDescriptor, numer: &BigInt, denom: &BigInt) -> Result<Self> {
        let n = Self::from_bigint(descriptor, numer);
        let d = Self::from_bigint(descriptor, denom);
        n.checked_div(&d)
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self(Repr::Rational(q))
    }

    /// Residue `value mod p` in the prime field with modulus `p`.
    pub fn from_residue(modulus: PrimeModulus, value: u64) -> Self {
        Self(Repr::Prime { value: value % modulus.get(), modulus })
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        match &self.0 {
            Repr::Rational(_) => FieldDescriptor::Rational,
            Repr::Prime { modulus, .. } => FieldDescriptor::Prime(*modulus),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rational(q) => Some(q),
            Repr::Prime { .. } => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match &self.0 {
            Repr::Rational(_) => None,
            Repr::Prime { value, .. } => Some(*value),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Rational(q) => q.is_zero(),
            Repr::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Rational(q) => q.is_one(),
            Repr::Prime { value, .. } => *value == 1,
        }
    }

    /// Re-derives the canonical representative. Values are always stored
    /// canonically, so this is the identity on every constructed scalar.
    pub fn canonicalize(&self) -> Self {
        match &self.0 {
            Repr::Rational(q) => Self(Repr::Rational(BigRational::new(q.numer().clone(), q.denom().clone()))),
            Repr::Prime { value, modulus } => Self::from_residue(*modulus, *value),
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        match (&self.0, &other.0) {
            (Repr::Rational(_), Repr::Rational(_)) => Ok(()),
            (Repr::Prime { modulus: p, .. }, Repr::Prime { modulus: q, .. }) if p == q => Ok(()),
            _ => Err(Error::DescriptorMismatch),
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Self(Repr::Rational(a + b)),
            (Repr::Prime { value: a, modulus }, Repr::Prime { value: b, .. }) => {
                Self(Repr::Prime { value: add_mod(*a, *b, modulus.get()), modulus: *modulus })
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Self(Repr::Rational(a - b)),
            (Repr::Prime { value: a, modulus }, Repr::Prime { value: b, .. }) => {
                Self(Repr::Prime { value: sub_mod(*a, *b, modulus.get()), modulus: *modulus })
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Self(Repr::Rational(a * b)),
            (Repr::Prime { value: a, modulus }, Repr::Prime { value: b, .. }) => {
                Self(Repr::Prime { value: mul_mod(*a, *b, modulus.get()), modulus: *modulus })
            }
            _ => unreachable!(),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let inv = rhs.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Rational(q) => Self(Repr::Rational(q.recip())),
            Repr::Prime { value, modulus } => {
                Self(Repr::Prime { value: inv_mod(*value, modulus.get()), modulus: *modulus })
            }
        })
    }

    pub fn pow(&self, exp: u64) -> Self {
        match &self.0 {
            Repr::Rational(q) => {
                let e = i32::try_from(exp).ok();
                match e {
                    Some(e) => Self(Repr::Rational(num_traits::pow::Pow::pow(q, e))),
                    None => {
                        self.pow_big(&BigUint::from(exp)).expect("exponent beyond i32 on a rational other than 0 or ±1")
                    }
                }
            }
            Repr::Prime { value, modulus } => {
                Self(Repr::Prime { value: pow_mod(*value, exp, modulus.get()), modulus: *modulus })
            }
        }
    }

    /// `self^exp` for an arbitrary-size exponent, with `0^0 = 1`.
    ///
    /// Over a prime field the exponent is reduced modulo `p - 1`. Over the
    /// rationals a huge exponent is only feasible for `0` and `±1`;
    /// anything else yields [`Error::ExponentTooLarge`].
    pub fn pow_big(&self, exp: &BigUint) -> Result<Self> {
        let descriptor = self.descriptor();
        if exp.is_zero() {
            return Ok(descriptor.one());
        }
        if self.is_zero() || self.is_one() {
            return Ok(self.clone());
        }
        match &self.0 {
            Repr::Prime { value, modulus } => {
                let order = modulus.get() - 1;
                let reduced = (exp % order).to_u64().expect("fits");
                Ok(Self(Repr::Prime { value: pow_mod(*value, reduced, modulus.get()), modulus: *modulus }))
            }
            Repr::Rational(q) => {
                if q.abs().is_one() {
                    // q == -1
                    return Ok(if exp.is_even() { descriptor.one() } else { self.clone() });
                }
                let e = exp.to_i32().ok_or(Error::ExponentTooLarge)?;
                Ok(Self(Repr::Rational(num_traits::pow::Pow::pow(q, e))))
            }
        }
    }

    /// `self^exp` for a signed exponent; negative powers invert first.
    pub fn pow_signed(&self, exp: &BigInt) -> Result<Self> {
        match exp.to_biguint() {
            Some(e) => self.pow_big(&e),
            None => self.inv()?.pow_big(&(-exp).to_biguint().expect("positive")),
        }
    }

    /// Parses the text encoding: `a/b` or `a` over Q, a decimal integer over F_p.
    ///
    /// Integers outside `[0, p)` are reduced; output is always canonical.
    pub fn parse(descriptor: FieldDescriptor, text: &str) -> Result<Self> {
        let err = |reason: &str| Error::ParseScalar { text: text.to_string(), reason: reason.to_string() };
        let trimmed = text.trim();
        match descriptor {
            FieldDescriptor::Rational => {
                let (n, d) = match trimmed.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (trimmed, "1"),
                };
                let n = BigInt::from_str(n).map_err(|_| err("bad numerator"))?;
                let d = BigInt::from_str(d).map_err(|_| err("bad denominator"))?;
                if d.is_zero() {
                    return Err(err("zero denominator"));
                }
                Ok(Self(Repr::Rational(BigRational::new(n, d))))
            }
            FieldDescriptor::Prime(_) => {
                if trimmed.contains('/') {
                    return Err(err("fractions are not accepted over a prime field"));
                }
                let n = BigInt::from_str(trimmed).map_err(|_| err("bad integer"))?;
                Ok(Self::from_bigint(descriptor, &n))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Repr::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Repr::Prime { value, .. } => write!(f, "{value}"),
        }
    }
}

// Operator impls panic on mismatched fields; use the checked methods at
// API boundaries where inputs are not known to agree.

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

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Rational(q) => Scalar(Repr::Rational(-q)),
            Repr::Prime { value, modulus } => {
                Scalar(Repr::Prime { value: sub_mod(0, *value, modulus.get()), modulus: *modulus })
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
