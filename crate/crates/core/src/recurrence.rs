//! Instances of the nonlinear recurrence
//!
//! ```text
//! r_n = g_n r_{n-1}^m + sum_{|α|<m} t_{α,n} r_{n-1}^{α_0} ... r_{n-d-1}^{α_d} r_{n-1} + v_n x^l r_{n-2}^m
//! ```
//!
//! together with the admissibility checks that make the closed-form
//! resultant valid, sequence generation, and constructors for the classical
//! special cases.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;

use crate::closedform;
use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::poly::{Degree, Poly};

/// One summand `t_{α,n} · r^α · r_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TTerm {
    pub alpha: Vec<usize>,
    pub poly: Poly,
}

/// Coefficients used at a single step n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCoeffs {
    pub g: Poly,
    pub t_terms: Vec<TTerm>,
    pub v: Scalar,
}

/// A complete instance: the parameter tuple `(i_0, ..., i_d, k, l, m)`, the
/// initial polynomials `r_0..=r_d` and explicit per-step coefficients.
///
/// Construction only checks shapes and fields; whether the instance satisfies
/// the hypotheses of the resultant identity is decided by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSpec {
    descriptor: FieldDescriptor,
    d: usize,
    m: usize,
    k: usize,
    l: usize,
    degrees: Vec<usize>,
    initials: Vec<Poly>,
    steps: BTreeMap<usize, StepCoeffs>,
}

impl RecurrenceSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        descriptor: FieldDescriptor,
        d: usize,
        m: usize,
        k: usize,
        l: usize,
        degrees: Vec<usize>,
        initials: Vec<Poly>,
        steps: BTreeMap<usize, StepCoeffs>,
    ) -> Result<Self> {
        if degrees.len() != d + 1 {
            return Err(Error::InvalidParams(format!("expected {} initial degrees, got {}", d + 1, degrees.len())));
        }
        if initials.len() != d + 1 {
            return Err(Error::InvalidParams(format!(
                "expected {} initial polynomials, got {}",
                d + 1,
                initials.len()
            )));
        }
        if initials.iter().any(|p| p.descriptor() != descriptor) {
            return Err(Error::DescriptorMismatch);
        }
        for (&n, step) in &steps {
            if n <= d {
                return Err(Error::InvalidParams(format!("step n = {n} overlaps the initial polynomials")));
            }
            if step.g.descriptor() != descriptor || step.v.descriptor() != descriptor {
                return Err(Error::DescriptorMismatch);
            }
            for t in &step.t_terms {
                if t.poly.descriptor() != descriptor {
                    return Err(Error::DescriptorMismatch);
                }
                if t.alpha.len() != d + 1 {
                    return Err(Error::InvalidParams(format!(
                        "step {n}: alpha {:?} has length {}, expected {}",
                        t.alpha,
                        t.alpha.len(),
                        d + 1
                    )));
                }
            }
        }
        Ok(Self { descriptor, d, m, k, l, degrees, initials, steps })
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        self.descriptor
    }

    /// Recurrence order minus one: each term looks back `d + 1` places.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Declared degrees `i_0, ..., i_d`.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn initials(&self) -> &[Poly] {
        &self.initials
    }

    pub fn steps(&self) -> &BTreeMap<usize, StepCoeffs> {
        &self.steps
    }

    pub fn step_coeffs(&self, n: usize) -> Result<&StepCoeffs> {
        self.steps.get(&n).ok_or(Error::MissingStep(n))
    }

    /// `i_d = i_{d-1}` and `k = l`: the branch where the `v_{d+1}` term
    /// contributes to the leading coefficient of `r_{d+1}`.
    pub fn is_edge_branch(&self) -> bool {
        self.d >= 1 && self.degrees[self.d] == self.degrees[self.d - 1] && self.k == self.l
    }

    /// Copy of this spec with the steps beyond `n` removed.
    pub fn truncated(&self, n: usize) -> Self {
        let mut spec = self.clone();
        spec.steps.retain(|&s, _| s <= n);
        spec
    }

    /// Copy with one step replaced; used to build perturbed instances.
    pub fn with_step(&self, n: usize, step: StepCoeffs) -> Result<Self> {
        let mut steps = self.steps.clone();
        steps.insert(n, step);
        Self::new(self.descriptor, self.d, self.m, self.k, self.l, self.degrees.clone(), self.initials.clone(), steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    /// d = 0; the recurrence references `r_{n-2}`.
    OrderTooSmall,
    /// m = 0.
    MZero,
    /// Initial degrees are not nondecreasing.
    DegreesNotMonotone,
    /// k < l.
    KBelowL,
    /// An initial polynomial's degree differs from its declared `i_s`.
    InitialDegree,
    /// `deg g_n != k` (in particular `a_{k,n} = 0`).
    GDegree,
    /// `v_n = 0`.
    VZero,
    /// `|α| >= m`.
    AlphaTooLarge,
    DuplicateAlpha,
    /// A t-term polynomial is identically zero; omit it instead.
    TTermZero,
    /// `t_{α,n}(0) != 0`.
    TTermConstant,
    /// `deg t_{α,n} >= deg g_n`.
    TTermDegree,
    /// `a_{k,d+1} p_{i_d,d}^m + v_{d+1} p_{i_{d-1},d-1}^m = 0` in the edge branch.
    EdgeCaseZero,
    /// The `g_n` and `v_n` terms have equal degree at some step n >= d+2
    /// (k = 0 with m = 1 or i_d = 0), so leading terms may cancel.
    DegreeCollision,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::OrderTooSmall => "OrderTooSmall",
            Self::MZero => "MZero",
            Self::DegreesNotMonotone => "DegreesNotMonotone",
            Self::KBelowL => "KBelowL",
            Self::InitialDegree => "InitialDegree",
            Self::GDegree => "GDegree",
            Self::VZero => "VZero",
            Self::AlphaTooLarge => "AlphaTooLarge",
            Self::DuplicateAlpha => "DuplicateAlpha",
            Self::TTermZero => "TTermZero",
            Self::TTermConstant => "TTermConstant",
            Self::TTermDegree => "TTermDegree",
            Self::EdgeCaseZero => "EdgeCaseZero",
            Self::DegreeCollision => "DegreeCollision",
        }
    }

    /// Violations of the parameter-set membership conditions.
    pub fn is_membership(self) -> bool {
        matches!(self, Self::MZero | Self::DegreesNotMonotone | Self::KBelowL)
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub step: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Conditions downgraded by [`ValidationOptions`]; never affect `ok`.
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Report `v_n = 0` as a warning instead of a violation.
    pub allow_zero_v: bool,
}

/// Checks every hypothesis of the closed-form resultant for steps
/// `d+1..=up_to`, in the field of the instance.
pub fn validate(spec: &RecurrenceSpec, up_to: usize, options: ValidationOptions) -> Result<ValidationReport> {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let mut flag = |code, step, detail: String| violations.push(Violation { code, step, detail });
    let d = spec.d;
    let m = spec.m;

    if d == 0 {
        flag(ViolationCode::OrderTooSmall, None, "d must be at least 1".into());
    }
    if m == 0 {
        flag(ViolationCode::MZero, None, "m must be nonzero".into());
    }
    if spec.degrees.windows(2).any(|w| w[0] > w[1]) {
        flag(ViolationCode::DegreesNotMonotone, None, format!("degrees {:?} must be nondecreasing", spec.degrees));
    }
    if spec.k < spec.l {
        flag(ViolationCode::KBelowL, None, format!("k = {} < l = {}", spec.k, spec.l));
    }
    for (s, (poly, &declared)) in spec.initials.iter().zip(&spec.degrees).enumerate() {
        if poly.degree() != Degree::Finite(declared) {
            flag(
                ViolationCode::InitialDegree,
                Some(s),
                format!("r_{s} has degree {}, declared i_{s} = {declared}", poly.degree()),
            );
        }
    }

    for n in d + 1..=up_to {
        let step = spec.step_coeffs(n)?;
        if step.g.degree() != Degree::Finite(spec.k) {
            flag(
                ViolationCode::GDegree,
                Some(n),
                format!("g_{n} has degree {}, expected k = {}", step.g.degree(), spec.k),
            );
        }
        if step.v.is_zero() {
            let v = Violation { code: ViolationCode::VZero, step: Some(n), detail: format!("v_{n} = 0") };
            if options.allow_zero_v {
                warnings.push(v);
            } else {
                flag(v.code, v.step, v.detail);
            }
        }
        let mut seen = BTreeSet::new();
        for t in &step.t_terms {
            let order: usize = t.alpha.iter().sum();
            if order >= m {
                flag(
                    ViolationCode::AlphaTooLarge,
                    Some(n),
                    format!("|alpha| = {order} for {:?} is not below m = {m}", t.alpha),
                );
            }
            if !seen.insert(t.alpha.clone()) {
                flag(ViolationCode::DuplicateAlpha, Some(n), format!("alpha {:?} appears twice", t.alpha));
            }
            if t.poly.is_zero() {
                flag(ViolationCode::TTermZero, Some(n), format!("t for alpha {:?} is identically zero", t.alpha));
                continue;
            }
            if !t.poly.constant_term().is_zero() {
                flag(
                    ViolationCode::TTermConstant,
                    Some(n),
                    format!("t for alpha {:?} has nonzero constant term", t.alpha),
                );
            }
            if t.poly.degree() >= step.g.degree() {
                flag(
                    ViolationCode::TTermDegree,
                    Some(n),
                    format!(
                        "t for alpha {:?} has degree {} >= deg g_{n} = {}",
                        t.alpha,
                        t.poly.degree(),
                        step.g.degree()
                    ),
                );
            }
        }
    }

    if d >= 1 && up_to > d && spec.is_edge_branch() {
        let step = spec.step_coeffs(d + 1)?;
        let mm = m as u64;
        let lead = &(&step.g.coeff(spec.k) * &spec.initials[d].leading_coeff().pow(mm))
            + &(&step.v * &spec.initials[d - 1].leading_coeff().pow(mm));
        if lead.is_zero() {
            flag(
                ViolationCode::EdgeCaseZero,
                Some(d + 1),
                format!("leading terms of r_{} cancel: a_{{k,{0}}} p^m + v_{0} p'^m = 0", d + 1),
            );
        }
    }

    // gamma(n) = m^{n-d-1}(k + i_d(m-1)) + k - l vanishes exactly when k = 0 and (m = 1 or i_d = 0)
    let top = spec.degrees.get(d).copied().unwrap_or(0);
    if d >= 1 && m >= 1 && up_to >= d + 2 && spec.k == 0 && (m == 1 || top == 0) {
        flag(
            ViolationCode::DegreeCollision,
            Some(d + 2),
            "k = 0 with m = 1 or i_d = 0: degrees stop growing and leading terms can cancel".into(),
        );
    }

    Ok(ValidationReport { ok: violations.is_empty(), violations, warnings })
}

/// One application of the recurrence. `window` holds
/// `(r_{n-1}, r_{n-2}, ..., r_{n-d-1})`, newest first.
pub fn step(spec: &RecurrenceSpec, window: &[Poly], n: usize) -> Result<Poly> {
    if window.len() != spec.d + 1 {
        return Err(Error::WindowSizeMismatch { expected: spec.d + 1, found: window.len() });
    }
    if spec.d == 0 {
        return Err(Error::InvalidParams("d must be at least 1".into()));
    }
    let coeffs = spec.step_coeffs(n)?;
    let m = spec.m as u64;
    let prev = &window[0];
    let mut acc = coeffs.g.checked_mul(&prev.pow(m))?;
    for t in &coeffs.t_terms {
        let mut term = t.poly.checked_mul(prev)?;
        for (r, &a) in window.iter().zip(&t.alpha) {
            if a > 0 {
                term = term.checked_mul(&r.pow(a as u64))?;
            }
        }
        acc = acc.checked_add(&term)?;
    }
    let tail = window[1].pow(m).scale(&coeffs.v)?.shift(spec.l);
    acc.checked_add(&tail)
}

/// `r_0, ..., r_big_n` after validating the instance up to `big_n`.
///
/// Every generated degree is compared with the closed form; a deviation is
/// reported as [`Error::DegreeMismatch`].
pub fn generate(spec: &RecurrenceSpec, big_n: usize, options: ValidationOptions) -> Result<Vec<Poly>> {
    let report = validate(spec, big_n, options)?;
    if !report.ok {
        return Err(Error::ValidationFailed(Box::new(report)));
    }
    let d = spec.d;
    let mut seq: Vec<Poly> = spec.initials.iter().take(big_n + 1).cloned().collect();
    for n in d + 1..=big_n {
        let window: Vec<Poly> = seq[n - d - 1..n].iter().rev().cloned().collect();
        let next = step(spec, &window, n)?;
        let expected = closedform::degree_formula(spec, n);
        let found = next.degree();
        if found.finite().map(BigUint::from) != Some(expected.clone()) {
            return Err(Error::DegreeMismatch { n, expected: expected.to_string(), found: found.to_string() });
        }
        seq.push(next);
    }
    Ok(seq)
}

/// Classical three-term recurrence `r_n = (a_n x + b_n) r_{n-1} - c_n r_{n-2}`
/// with `r_0 = 1`, `r_1 = a_1 x + b_1`.
///
/// Each vector is indexed by n; `a` and `b` use indices `1..=N`, `c` uses
/// `2..=N`, and unused leading entries are ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurParams {
    pub descriptor: FieldDescriptor,
    pub a: Vec<Scalar>,
    pub b: Vec<Scalar>,
    pub c: Vec<Scalar>,
}

impl SchurParams {
    /// Largest n the parameters define.
    pub fn max_n(&self) -> usize {
        self.a.len().min(self.b.len()).min(self.c.len()).saturating_sub(1)
    }
}

/// `r_n = f_n r_{n-1} - v_n x^e r_{n-2}` with `deg r_0 = i <= j = deg r_1`,
/// `deg f_n = k >= e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UlasParams {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub x_exponent: usize,
    pub r0: Poly,
    pub r1: Poly,
    pub f: BTreeMap<usize, Poly>,
    pub v: BTreeMap<usize, Scalar>,
}

/// Order-two nonlinear recurrence
/// `r_n = sum_{s=0}^{m} t_{s,n} r_{n-1}^{m-s} r_{n-2}^s` with `t_{m,n} = v_n x^l`.
///
/// `t[n]` lists `t_{0,n}, ..., t_{m-1,n}`; `t_{0,n}` plays the role of `g_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corollary2Params {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub r0: Poly,
    pub r1: Poly,
    pub t: BTreeMap<usize, Vec<Poly>>,
    pub v: BTreeMap<usize, Scalar>,
}

impl RecurrenceSpec {
    /// General instance equivalent to the classical three-term recurrence:
    /// d = 1, m = 1, k = 1, l = 0, `g_n = a_n x + b_n`, `v_n = -c_n`.
    pub fn schur(params: &SchurParams) -> Result<Self> {
        let descriptor = params.descriptor;
        let big_n = params.max_n();
        if big_n < 1 {
            return Err(Error::InvalidParams("need a_1 and b_1 at least".into()));
        }
        for n in 1..=big_n {
            if params.a[n].is_zero() {
                return Err(Error::InvalidParams(format!("a_{n} = 0")));
            }
            if n >= 2 && params.c[n].is_zero() {
                return Err(Error::InvalidParams(format!("c_{n} = 0")));
            }
        }
        let linear = |n: usize| Poly::new(descriptor, vec![params.b[n].clone(), params.a[n].clone()]);
        let mut steps = BTreeMap::new();
        for n in 2..=big_n {
            steps.insert(n, StepCoeffs { g: linear(n)?, t_terms: Vec::new(), v: -&params.c[n] });
        }
        Self::new(descriptor, 1, 1, 1, 0, vec![0, 1], vec![Poly::one(descriptor), linear(1)?], steps)
    }

    /// General instance for the linear recurrence with an `x^e` factor:
    /// d = 1, m = 1, `g_n = f_n`, l = e, `v_n -> -v_n`.
    pub fn ulas(params: &UlasParams) -> Result<Self> {
        if params.i > params.j {
            return Err(Error::InvalidParams(format!("i = {} > j = {}", params.i, params.j)));
        }
        if params.x_exponent > params.k {
            return Err(Error::InvalidParams(format!("x exponent {} > k = {}", params.x_exponent, params.k)));
        }
        if params.r0.degree() != Degree::Finite(params.i) || params.r1.degree() != Degree::Finite(params.j) {
            return Err(Error::InvalidParams("initial degrees differ from (i, j)".into()));
        }
        let descriptor = params.r0.descriptor();
        let mut steps = BTreeMap::new();
        for (&n, f) in &params.f {
            if f.degree() != Degree::Finite(params.k) {
                return Err(Error::InvalidParams(format!("f_{n} has degree {}, expected {}", f.degree(), params.k)));
            }
            let v = params.v.get(&n).ok_or_else(|| Error::InvalidParams(format!("missing v_{n}")))?;
            steps.insert(n, StepCoeffs { g: f.clone(), t_terms: Vec::new(), v: -v });
        }
        Self::new(
            descriptor,
            1,
            1,
            params.k,
            params.x_exponent,
            vec![params.i, params.j],
            vec![params.r0.clone(), params.r1.clone()],
            steps,
        )
    }

    /// General d = 1 instance: `t_{0,n} -> g_n`, `t_{m,n} = v_n x^l`, and for
    /// `1 <= s <= m-1` the term `t_{s,n} r_{n-1}^{m-s} r_{n-2}^s` becomes the
    /// t-term with `α = (m-s-1, s)`. Zero `t_{s,n}` are dropped.
    pub fn corollary2(params: &Corollary2Params) -> Result<Self> {
        if params.m == 0 {
            return Err(Error::InvalidParams("m must be nonzero".into()));
        }
        if params.i > params.j || params.l > params.k {
            return Err(Error::InvalidParams("need i <= j and l <= k".into()));
        }
        let descriptor = params.r0.descriptor();
        let mut steps = BTreeMap::new();
        for (&n, ts) in &params.t {
            if ts.len() != params.m {
                return Err(Error::InvalidParams(format!(
                    "step {n}: expected t_0..t_{} ({} polynomials), got {}",
                    params.m - 1,
                    params.m,
                    ts.len()
                )));
            }
            let v = params.v.get(&n).ok_or_else(|| Error::InvalidParams(format!("missing v_{n}")))?;
            let t_terms = ts
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, t)| !t.is_zero())
                .map(|(s, t)| TTerm { alpha: vec![params.m - s - 1, s], poly: t.clone() })
                .collect();
            steps.insert(n, StepCoeffs { g: ts[0].clone(), t_terms, v: v.clone() });
        }
        Self::new(
            descriptor,
            1,
            params.m,
            params.k,
            params.l,
            vec![params.i, params.j],
            vec![params.r0.clone(), params.r1.clone()],
            steps,
        )
    }
}

/// All multi-indices of length `len` with coordinate sum at most `max_order`,
/// in lexicographic order.
pub fn alphas_up_to(len: usize, max_order: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, len: usize, budget: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for a in 0..=budget {
            prefix.push(a);
            rec(prefix, len, budget - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(len), len, max_order, &mut out);
    out
}

impl StepCoeffs {
    /// Same step with `v` replaced.
    pub fn with_v(&self, v: Scalar) -> Self {
        Self { v, ..self.clone() }
    }
}

/// Helper for the common case of an instance with no t-terms.
pub fn simple_step(g: Poly, v: Scalar) -> StepCoeffs {
    StepCoeffs { g, t_terms: Vec::new(), v }
}
