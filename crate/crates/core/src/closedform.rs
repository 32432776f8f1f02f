//! Closed-form quantities for a recurrence instance: degrees, leading and
//! constant coefficients, the exponents of the resultant recursion, and the
//! resultant `Res(r_n, r_{n-1})` itself, all without generating the sequence.
//!
//! With `D_n = deg r_n`, `L_n` the leading coefficient and `C_n = r_n(0)`,
//! one division step of `r_n` by `r_{n-1}` gives
//!
//! ```text
//! R_n = (-1)^{D_n D_{n-1} + l D_{n-1}} L_{n-1}^{γ(n)} v_n^{D_{n-1}} C_{n-1}^l R_{n-1}^m
//! ```
//!
//! where `γ(n) = D_n - l - m D_{n-2}`. The `l D_{n-1}` sign term comes from
//! `Res(r_{n-1}, x) = (-1)^{D_{n-1}} r_{n-1}(0)`. Unrolling down to
//! `R_d = Res(r_d, r_{d-1})` yields [`resultant_formula`].

use std::cell::{OnceCell, RefCell};
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::recurrence::{validate, RecurrenceSpec, ValidationOptions};
use crate::resultant::resultant_sylvester;

fn m_pow(spec: &RecurrenceSpec, e: usize) -> BigUint {
    num_traits::pow(BigUint::from(spec.m()), e)
}

/// Degree of `r_n`: `i_n` for `n <= d`, otherwise
/// `k (1 + m + ... + m^{n-d-1}) + i_d m^{n-d}`.
pub fn degree_formula(spec: &RecurrenceSpec, n: usize) -> BigUint {
    let d = spec.d();
    if n <= d {
        return BigUint::from(spec.degrees()[n]);
    }
    let m = BigUint::from(spec.m());
    let mut geometric = BigUint::zero();
    let mut power = BigUint::one();
    for _ in 0..n - d {
        geometric += &power;
        power *= &m;
    }
    BigUint::from(spec.k()) * geometric + BigUint::from(spec.degrees()[d]) * power
}

/// Exponents attached to step n of the resultant recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepExponents {
    /// Degree drop `deg r_n - deg(v_n x^l r_{n-2}^m)`.
    pub gamma: BigInt,
    /// `deg r_n · deg r_{n-1}`.
    pub e: BigUint,
}

pub fn exponents(spec: &RecurrenceSpec, n: usize) -> Result<StepExponents> {
    let d = spec.d();
    if d == 0 || n < d + 1 {
        return Err(Error::IndexOutOfRange { n, min: d + 1 });
    }
    let k = BigInt::from(spec.k());
    let l = BigInt::from(spec.l());
    let m = BigInt::from(spec.m());
    let top = BigInt::from(spec.degrees()[d]);
    let gamma = if n == d + 1 {
        &k - &l + &m * (&top - BigInt::from(spec.degrees()[d - 1]))
    } else {
        BigInt::from(m_pow(spec, n - d - 1)) * (&k + &top * (&m - 1)) + &k - &l
    };
    let e = degree_formula(spec, n) * degree_formula(spec, n - 1);
    Ok(StepExponents { gamma, e })
}

/// Parity-carrying exponent of step n: `e(n) + l · deg r_{n-1}`.
pub fn step_sign_exponent(spec: &RecurrenceSpec, n: usize) -> Result<BigUint> {
    let e = exponents(spec, n)?.e;
    Ok(e + BigUint::from(spec.l()) * degree_formula(spec, n - 1))
}

/// Total sign exponent `sum_{s=d+1}^{n} m^{n-s} (e(s) + l · deg r_{s-1})`,
/// kept exact; only its parity matters.
pub fn sign_exponent(spec: &RecurrenceSpec, n: usize) -> Result<BigUint> {
    let d = spec.d();
    let mut total = BigUint::zero();
    for s in d + 1..=n {
        total += m_pow(spec, n - s) * step_sign_exponent(spec, s)?;
    }
    Ok(total)
}

/// Memoizing evaluator for one instance.
///
/// Single-threaded by construction (interior mutability without locking);
/// create one context per thread.
pub struct FormulaContext<'a> {
    spec: &'a RecurrenceSpec,
    options: ValidationOptions,
    base: OnceCell<Scalar>,
    leading: RefCell<BTreeMap<usize, Scalar>>,
    values: RefCell<BTreeMap<usize, Scalar>>,
}

impl<'a> FormulaContext<'a> {
    pub fn new(spec: &'a RecurrenceSpec) -> Self {
        Self::with_options(spec, ValidationOptions::default())
    }

    pub fn with_options(spec: &'a RecurrenceSpec, options: ValidationOptions) -> Self {
        Self { spec, options, base: OnceCell::new(), leading: RefCell::default(), values: RefCell::default() }
    }

    pub fn spec(&self) -> &RecurrenceSpec {
        self.spec
    }

    /// `R_d = Res(r_d, r_{d-1})`, computed from the initial polynomials.
    pub fn base_resultant(&self) -> Result<Scalar> {
        if let Some(r) = self.base.get() {
            return Ok(r.clone());
        }
        let d = self.spec.d();
        if d == 0 {
            return Err(Error::IndexOutOfRange { n: 0, min: 1 });
        }
        let initials = self.spec.initials();
        let r = resultant_sylvester(&initials[d], &initials[d - 1])?;
        Ok(self.base.get_or_init(|| r).clone())
    }

    fn a_k(&self, n: usize) -> Result<Scalar> {
        Ok(self.spec.step_coeffs(n)?.g.coeff(self.spec.k()))
    }

    fn a_0(&self, n: usize) -> Result<Scalar> {
        Ok(self.spec.step_coeffs(n)?.g.coeff(0))
    }

    /// Leading coefficient `L_n` of `r_n`.
    ///
    /// Generic branch: `p_{i_d,d}^{m^{n-d}} prod_{s=1}^{n-d} a_{k,d+s}^{m^{n-d-s}}`.
    /// When `i_d = i_{d-1}` and `k = l`, the first factors fuse into
    /// `(a_{k,d+1} p_{i_d,d}^m + v_{d+1} p_{i_{d-1},d-1}^m)^{m^{n-d-1}}`.
    pub fn leading_term(&self, n: usize) -> Result<Scalar> {
        if let Some(v) = self.leading.borrow().get(&n) {
            return Ok(v.clone());
        }
        let spec = self.spec;
        let d = spec.d();
        let value = if n <= d {
            spec.initials()[n].coeff(spec.degrees()[n])
        } else {
            let top = spec.initials()[d].coeff(spec.degrees()[d]);
            let mut acc;
            let first;
            if spec.is_edge_branch() {
                let m = spec.m() as u64;
                let below = spec.initials()[d - 1].coeff(spec.degrees()[d - 1]);
                let step = spec.step_coeffs(d + 1)?;
                let fused = &(&step.g.coeff(spec.k()) * &top.pow(m)) + &(&step.v * &below.pow(m));
                acc = fused.pow_big(&m_pow(spec, n - d - 1))?;
                first = 2;
            } else {
                acc = top.pow_big(&m_pow(spec, n - d))?;
                first = 1;
            }
            for s in first..=n - d {
                acc = &acc * &self.a_k(d + s)?.pow_big(&m_pow(spec, n - d - s))?;
            }
            acc
        };
        self.leading.borrow_mut().entry(n).or_insert_with(|| value.clone());
        Ok(value)
    }

    /// The factor `C_n` as it enters the resultant formula.
    ///
    /// For `l = 0` it only ever appears as `C^0`, so this returns 1. For
    /// `l > 0`, where t-terms and the `x^l` term vanish at 0,
    /// `C_n = p_{0,d}^{m^{n-d}} prod_{s=1}^{n-d} a_{0,d+s}^{m^{n-d-s}}`.
    pub fn constant_term(&self, n: usize) -> Result<Scalar> {
        let spec = self.spec;
        let d = spec.d();
        if spec.l() == 0 {
            return Ok(spec.descriptor().one());
        }
        if n < d {
            return Ok(spec.initials()[n].constant_term());
        }
        let mut acc = spec.initials()[d].constant_term().pow_big(&m_pow(spec, n - d))?;
        for s in 1..=n - d {
            acc = &acc * &self.a_0(d + s)?.pow_big(&m_pow(spec, n - d - s))?;
        }
        Ok(acc)
    }

    /// True value `r_n(0)`, via `C_n = a_{0,n} C_{n-1}^m + v_n C_{n-2}^m`
    /// (the `v_n` term only when `l = 0`). Used for cross-checks.
    pub fn constant_value(&self, n: usize) -> Result<Scalar> {
        if let Some(v) = self.values.borrow().get(&n) {
            return Ok(v.clone());
        }
        let spec = self.spec;
        let d = spec.d();
        let value = if n <= d {
            spec.initials()[n].constant_term()
        } else {
            let m = spec.m() as u64;
            let step = spec.step_coeffs(n)?;
            let mut acc = &step.g.coeff(0) * &self.constant_value(n - 1)?.pow(m);
            if spec.l() == 0 {
                acc = &acc + &(&step.v * &self.constant_value(n - 2)?.pow(m));
            }
            acc
        };
        self.values.borrow_mut().entry(n).or_insert_with(|| value.clone());
        Ok(value)
    }

    fn check_valid(&self, n: usize) -> Result<()> {
        let d = self.spec.d();
        if d == 0 || n < d + 1 {
            return Err(Error::IndexOutOfRange { n, min: d + 1 });
        }
        let report = validate(self.spec, n, self.options)?;
        if report.ok {
            Ok(())
        } else {
            Err(Error::ValidationFailed(Box::new(report)))
        }
    }

    /// `L_{s-1}^{γ(s)} v_s^{deg r_{s-1}} C_{s-1}^l`, raised to `outer`.
    fn step_factor(&self, s: usize, outer: &BigUint) -> Result<Scalar> {
        let spec = self.spec;
        let gamma = exponents(spec, s)?.gamma;
        let prev_degree = degree_formula(spec, s - 1);
        let outer_signed = BigInt::from(outer.clone());
        let mut acc = self.leading_term(s - 1)?.pow_signed(&(gamma * outer_signed))?;
        let v = &spec.step_coeffs(s)?.v;
        acc = &acc * &v.pow_big(&(prev_degree * outer))?;
        if spec.l() > 0 {
            let c = self.constant_term(s - 1)?;
            acc = &acc * &c.pow_big(&(BigUint::from(spec.l()) * outer))?;
        }
        Ok(acc)
    }

    /// `Res(r_n, r_{n-1})` from the closed form
    ///
    /// ```text
    /// (-1)^{sum_s m^{n-s}(e(s) + l deg r_{s-1})} R_d^{m^{n-d}} prod_{s=d+1}^{n} (L_{s-1}^{γ(s)} v_s^{deg r_{s-1}} C_{s-1}^l)^{m^{n-s}}
    /// ```
    ///
    /// with `0^0 = 1`. The instance is validated up to n first.
    pub fn resultant_formula(&self, n: usize) -> Result<Scalar> {
        self.check_valid(n)?;
        let spec = self.spec;
        let d = spec.d();
        let mut acc = self.base_resultant()?.pow_big(&m_pow(spec, n - d))?;
        for s in d + 1..=n {
            acc = &acc * &self.step_factor(s, &m_pow(spec, n - s))?;
        }
        if sign_exponent(spec, n)?.is_odd() {
            acc = -acc;
        }
        Ok(acc)
    }

    /// One unrolled step: `R_n` from `R_{n-1}`.
    pub fn resultant_step(&self, n: usize, previous: &Scalar) -> Result<Scalar> {
        self.check_valid(n)?;
        let spec = self.spec;
        let mut acc = &self.step_factor(n, &BigUint::one())? * &previous.pow(spec.m() as u64);
        if step_sign_exponent(spec, n)?.is_odd() {
            acc = -acc;
        }
        Ok(acc)
    }
}

/// Classical closed form for `r_n = (a_n x + b_n) r_{n-1} - c_n r_{n-2}`:
///
/// ```text
/// Res(r_n, r_{n-1}) = (-1)^{n(n-1)/2} prod_{i=1}^{n-1} a_i^{2(n-i)} c_{i+1}^i
/// ```
///
/// `a` and `c` are indexed by n, as in [`crate::recurrence::SchurParams`].
pub fn schur_formula(a: &[Scalar], c: &[Scalar], n: usize) -> Result<Scalar> {
    if n < 2 {
        return Err(Error::IndexOutOfRange { n, min: 2 });
    }
    if a.len() <= n || c.len() <= n {
        return Err(Error::InvalidParams(format!("need a_1..a_{n} and c_2..c_{n}")));
    }
    if let Some(i) = (1..=n).find(|&i| a[i].is_zero()) {
        return Err(Error::ZeroCoefficient(format!("a_{i}")));
    }
    if let Some(i) = (2..=n).find(|&i| c[i].is_zero()) {
        return Err(Error::ZeroCoefficient(format!("c_{i}")));
    }
    let descriptor = a[1].descriptor();
    let mut acc = descriptor.one();
    for i in 1..n {
        acc = &acc * &a[i].pow(2 * (n - i) as u64);
        acc = &acc * &c[i + 1].pow(i as u64);
    }
    if (n * (n - 1) / 2) % 2 == 1 {
        acc = -acc;
    }
    Ok(acc)
}
