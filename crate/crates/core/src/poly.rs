//! Dense univariate polynomials over a [`FieldDescriptor`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`.
///
/// Ordered so that `NegInfinity` is below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(n) => Some(n),
        }
    }

    /// Max-plus addition: `NegInfinity` absorbs.
    pub fn plus(self, other: Degree) -> Degree {
        match (self, other) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(n) => write!(f, "{n}"),
        }
    }
}

/// Dense polynomial; `coeffs[s]` is the coefficient of `x^s`.
///
/// Always normalized: no trailing zero, and the zero polynomial has no
/// coefficients at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    descriptor: FieldDescriptor,
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn zero(descriptor: FieldDescriptor) -> Self {
        Self { descriptor, coeffs: Vec::new() }
    }

    pub fn one(descriptor: FieldDescriptor) -> Self {
        Self::constant(descriptor.one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * x^exp`.
    pub fn monomial(c: Scalar, exp: usize) -> Self {
        let descriptor = c.descriptor();
        if c.is_zero() {
            return Self::zero(descriptor);
        }
        let mut coeffs = vec![descriptor.zero(); exp];
        coeffs.push(c);
        Self { descriptor, coeffs }
    }

    pub fn x(descriptor: FieldDescriptor) -> Self {
        Self::monomial(descriptor.one(), 1)
    }

    pub fn new(descriptor: FieldDescriptor, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.iter().any(|c| c.descriptor() != descriptor) {
            return Err(Error::DescriptorMismatch);
        }
        Ok(Self::from_vec_unchecked(descriptor, coeffs))
    }

    pub fn from_ints(descriptor: FieldDescriptor, coeffs: &[i64]) -> Self {
        let coeffs = coeffs.iter().map(|&c| Scalar::from_integer(descriptor, c)).collect();
        Self::from_vec_unchecked(descriptor, coeffs)
    }

    fn from_vec_unchecked(descriptor: FieldDescriptor, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Self { descriptor, coeffs }
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        self.descriptor
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Coefficient of `x^s`, zero beyond the stored length.
    pub fn coeff(&self, s: usize) -> Scalar {
        self.coeffs.get(s).cloned().unwrap_or_else(|| self.descriptor.zero())
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading_coeff(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(|| self.descriptor.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(0)
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.descriptor == other.descriptor {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch)
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() { (self, other) } else { (other, self) };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c = &*c + s;
        }
        Ok(Self::from_vec_unchecked(self.descriptor, coeffs))
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        self.checked_add(&-other)
    }

    /// Schoolbook product.
    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.descriptor));
        }
        let mut coeffs = vec![self.descriptor.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = a * b;
                coeffs[i + j] = &coeffs[i + j] + &t;
            }
        }
        Ok(Self::from_vec_unchecked(self.descriptor, coeffs))
    }

    pub fn scale(&self, c: &Scalar) -> Result<Poly> {
        if c.descriptor() != self.descriptor {
            return Err(Error::DescriptorMismatch);
        }
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        Ok(Self::from_vec_unchecked(self.descriptor, coeffs))
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.descriptor.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { descriptor: self.descriptor, coeffs }
    }

    /// Repeated squaring; `f^0 = 1` including for `f = 0`.
    pub fn pow(&self, mut exp: u64) -> Poly {
        let mut acc = Self::one(self.descriptor);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check(divisor)?;
        let Degree::Finite(dg) = divisor.degree() else {
            return Err(Error::DivisionByZero);
        };
        let zero = self.descriptor.zero();
        if self.coeffs.len() <= dg {
            return Ok((Self::zero(self.descriptor), self.clone()));
        }
        let lead_inv = divisor.leading_coeff().inv()?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![zero.clone(); rem.len() - dg];
        for i in (dg..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let factor = &rem[i] * &lead_inv;
            let offset = i - dg;
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[offset + j] = &rem[offset + j] - &(&factor * b);
            }
            debug_assert!(rem[i].is_zero());
            quot[offset] = factor;
        }
        rem.truncate(dg);
        Ok((Self::from_vec_unchecked(self.descriptor, quot), Self::from_vec_unchecked(self.descriptor, rem)))
    }

    /// Horner evaluation.
    pub fn eval(&self, a: &Scalar) -> Result<Scalar> {
        if a.descriptor() != self.descriptor {
            return Err(Error::DescriptorMismatch);
        }
        Ok(self.coeffs.iter().rev().fold(self.descriptor.zero(), |acc, c| &(&acc * a) + c))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("polynomial field mismatch")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomial field mismatch")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("polynomial field mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { descriptor: self.descriptor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// Human-readable form, highest degree first, e.g. `x^3 - 2x`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (exp, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_string();
            let (negative, magnitude) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let unit = magnitude == "1";
            let fraction = magnitude.contains('/');
            match (exp, unit) {
                (0, _) => f.write_str(&magnitude)?,
                (_, true) => {}
                (_, false) if fraction => write!(f, "({magnitude})")?,
                (_, false) => f.write_str(&magnitude)?,
            }
            match exp.cmp(&1) {
                Ordering::Less => {}
                Ordering::Equal => f.write_str("x")?,
                Ordering::Greater => write!(f, "x^{exp}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldDescriptor {
        FieldDescriptor::Rational
    }

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_ints(q(), coeffs)
    }

    #[test]
    fn degrees() {
        assert_eq!(p(&[-1, 0, 1]).degree(), Degree::Finite(2));
        assert_eq!(p(&[5]).degree(), Degree::Finite(0));
        assert_eq!(p(&[]).degree(), Degree::NegInfinity);
        assert_eq!(p(&[0, 0, 0]).degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(Degree::NegInfinity.plus(Degree::Finite(3)), Degree::NegInfinity);
        assert_eq!(Degree::Finite(2).plus(Degree::Finite(3)), Degree::Finite(5));
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
        assert_eq!(p(&[1, 1]).pow(0), p(&[1]));
        assert_eq!(p(&[0]).pow(0), p(&[1]));
        let sum = &p(&[-1, 0, 1]) + &p(&[1, 0, -1]);
        assert!(sum.is_zero());
        assert!(sum.coeffs().is_empty());
        assert_eq!(p(&[1, 1]).pow(3), p(&[1, 3, 3, 1]));
        assert_eq!(p(&[1, 2]).shift(2), p(&[0, 0, 1, 2]));
    }

    #[test]
    fn division_examples() {
        let (quo, rem) = p(&[-1, 0, 1]).divrem(&p(&[0, 1])).unwrap();
        assert_eq!((quo, rem), (p(&[0, 1]), p(&[-1])));
        let (quo, rem) = p(&[0, 1]).divrem(&p(&[-1, 0, 1])).unwrap();
        assert_eq!((quo, rem), (p(&[]), p(&[0, 1])));
        let f = p(&[0, -2, 0, 1]);
        let g = p(&[-1, 0, 1]);
        let (quo, rem) = f.divrem(&g).unwrap();
        assert_eq!(quo, p(&[0, 1]));
        assert_eq!(rem, p(&[0, -1]));
        assert_eq!(&(&quo * &g) + &rem, f);
        assert_eq!(f.divrem(&p(&[])), Err(Error::DivisionByZero));
    }

    #[test]
    fn evaluation() {
        let s = |n| Scalar::from_integer(q(), n);
        assert_eq!(p(&[-1, 0, 1]).eval(&s(0)).unwrap(), s(-1));
        assert_eq!(p(&[-1, 0, 1]).eval(&s(1)).unwrap(), s(0));
        assert_eq!(p(&[0, -2, 0, 1]).eval(&s(2)).unwrap(), s(4));
        let f7 = FieldDescriptor::prime(7).unwrap();
        assert_eq!(p(&[1]).eval(&Scalar::from_integer(f7, 1)), Err(Error::DescriptorMismatch));
    }

    #[test]
    fn coefficient_access() {
        let f = p(&[-1, 0, 1]);
        assert!(f.coeff(2).is_one());
        assert!(f.coeff(1).is_zero());
        assert!(f.coeff(7).is_zero());
        assert!(p(&[]).leading_coeff().is_zero());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[0, -2, 0, 1]).to_string(), "x^3 - 2x");
        assert_eq!(p(&[-1, 0, 1]).to_string(), "x^2 - 1");
        assert_eq!(p(&[1, -1]).to_string(), "-x + 1");
        assert_eq!(p(&[]).to_string(), "0");
        let half = Scalar::parse(q(), "-1/2").unwrap();
        assert_eq!(Poly::monomial(half, 2).to_string(), "-(1/2)x^2");
    }

    #[test]
    fn mixed_fields_rejected() {
        let f7 = FieldDescriptor::prime(7).unwrap();
        let a = Poly::from_ints(f7, &[1, 2]);
        assert_eq!(a.checked_mul(&p(&[1])), Err(Error::DescriptorMismatch));
        assert_eq!(Poly::new(q(), vec![Scalar::from_integer(f7, 1)]), Err(Error::DescriptorMismatch));
    }

    fn arb_poly(descriptor: FieldDescriptor) -> impl Strategy<Value = Poly> {
        prop::collection::vec(-20i64..20, 0..12).prop_map(move |c| Poly::from_ints(descriptor, &c))
    }

    fn arb_scalar(descriptor: FieldDescriptor) -> impl Strategy<Value = Scalar> {
        (-20i64..20).prop_map(move |c| Scalar::from_integer(descriptor, c))
    }

    fn normalized(f: &Poly) -> bool {
        f.coeffs().last().is_none_or(|c| !c.is_zero())
    }

    proptest! {
        #[test]
        fn ring_axioms(f in arb_poly(q()), g in arb_poly(q()), h in arb_poly(q())) {
            prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f + &g, &g + &f);
            prop_assert_eq!(&f * &g, &g * &f);
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            for r in [&f + &g, &f - &g, &f * &g, f.pow(3)] {
                prop_assert!(normalized(&r));
            }
        }

        #[test]
        fn divrem_round_trip(f in arb_poly(FieldDescriptor::prime(10007).unwrap()),
                             g in arb_poly(FieldDescriptor::prime(10007).unwrap())) {
            prop_assume!(!g.is_zero());
            let (quo, rem) = f.divrem(&g).unwrap();
            prop_assert_eq!(&(&quo * &g) + &rem, f);
            prop_assert!(rem.degree() < g.degree());
            prop_assert!(normalized(&quo) && normalized(&rem));
        }

        #[test]
        fn divrem_round_trip_rational(f in arb_poly(q()), g in arb_poly(q())) {
            prop_assume!(!g.is_zero());
            let (quo, rem) = f.divrem(&g).unwrap();
            prop_assert_eq!(&(&quo * &g) + &rem, f);
            prop_assert!(rem.degree() < g.degree());
        }

        #[test]
        fn eval_is_a_homomorphism(f in arb_poly(q()), g in arb_poly(q()), a in arb_scalar(q())) {
            let fa = f.eval(&a).unwrap();
            let ga = g.eval(&a).unwrap();
            prop_assert_eq!((&f * &g).eval(&a).unwrap(), &fa * &ga);
            prop_assert_eq!((&f + &g).eval(&a).unwrap(), &fa + &ga);
        }
    }
}
