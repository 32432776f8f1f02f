//! Resultant evaluation and cross-checks for one instance, producing a [`Report`].

use std::time::{Duration, Instant};

use recres_core::{
    degree_formula, resultant_euclid, resultant_sylvester, step, validate, Error, FormulaContext, Poly, RecurrenceSpec,
    Scalar, ValidationOptions,
};
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Formula,
    Sylvester,
    Euclid,
    All,
}

impl Method {
    fn formula(self) -> bool {
        matches!(self, Method::Formula | Method::All)
    }

    fn sylvester(self) -> bool {
        matches!(self, Method::Sylvester | Method::All)
    }

    fn euclid(self) -> bool {
        matches!(self, Method::Euclid | Method::All)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceIdentity {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub field: String,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub degrees: Vec<usize>,
    pub edge_branch: bool,
    pub t_terms: usize,
}

impl InstanceIdentity {
    pub fn of(spec: &RecurrenceSpec, name: Option<String>, file: Option<String>) -> Self {
        Self {
            name,
            file,
            field: spec.descriptor().to_string(),
            d: spec.d(),
            m: spec.m(),
            k: spec.k(),
            l: spec.l(),
            degrees: spec.degrees().to_vec(),
            edge_branch: spec.is_edge_branch(),
            t_terms: spec.steps().values().map(|s| s.t_terms.len()).sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationEntry {
    pub code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub ok: bool,
    pub violations: Vec<ViolationEntry>,
    pub warnings: Vec<ViolationEntry>,
}

/// Values for one `n`. Scalars are text encodings; a flag is present only when
/// both of its sides were computed, and is true iff they are exactly equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub degree: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sylvester: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euclid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euclid_matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading_matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_matches: Option<bool>,
}

impl Record {
    pub fn passed(&self) -> bool {
        [self.formula_matches, self.euclid_matches, self.degree_matches, self.leading_matches, self.constant_matches]
            .iter()
            .all(|f| f.unwrap_or(true))
    }

    /// Names of the checks that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("formula", self.formula_matches),
            ("euclid", self.euclid_matches),
            ("degree", self.degree_matches),
            ("leading", self.leading_matches),
            ("constant", self.constant_matches),
        ]
        .into_iter()
        .filter(|(_, f)| *f == Some(false))
        .map(|(name, _)| name)
        .collect()
    }
}

/// Milliseconds spent in each phase.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub generate_ms: f64,
    pub formula_ms: f64,
    pub sylvester_ms: f64,
    pub euclid_ms: f64,
    pub checks_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub instance: InstanceIdentity,
    pub n_range: [usize; 2],
    pub validation: ValidationSummary,
    pub records: Vec<Record>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn validation_failed(&self) -> bool {
        !self.validation.ok
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub method: Method,
    /// Degree, leading-coefficient and constant-term checks.
    pub closed_form_checks: bool,
    pub validation: ValidationOptions,
    pub timings: bool,
}

impl EvalOptions {
    pub fn verify() -> Self {
        Self { method: Method::All, closed_form_checks: true, validation: ValidationOptions::default(), timings: true }
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn timed<T>(slot: &mut f64, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += ms(start.elapsed());
    out
}

fn summarize(report: recres_core::ValidationReport) -> ValidationSummary {
    let entry =
        |v: recres_core::Violation| ViolationEntry { code: v.code.as_str().into(), step: v.step, detail: v.detail };
    ValidationSummary {
        ok: report.ok,
        violations: report.violations.into_iter().map(entry).collect(),
        warnings: report.warnings.into_iter().map(entry).collect(),
    }
}

/// r_0, ..., r_{big_n} by direct recurrence, without any degree assertion.
pub fn sequence(spec: &RecurrenceSpec, big_n: usize) -> recres_core::Result<Vec<Poly>> {
    let d = spec.d();
    let mut seq: Vec<Poly> = spec.initials().iter().take(big_n + 1).cloned().collect();
    for n in d + 1..=big_n {
        let window: Vec<Poly> = seq[n - d - 1..n].iter().rev().cloned().collect();
        seq.push(step(spec, &window, n)?);
    }
    Ok(seq)
}

fn flag(a: &Option<Scalar>, b: &Option<Scalar>) -> Option<bool> {
    Some(a.as_ref()? == b.as_ref()?)
}

/// Validates `spec` up to `n_hi`, then evaluates every `n` in `n_lo..=n_hi`.
/// A failed validation yields a report with no records; computational errors
/// (which a validated instance should not produce) are returned as `Err`.
pub fn evaluate(
    spec: &RecurrenceSpec,
    identity: InstanceIdentity,
    seed: Option<u64>,
    n_lo: usize,
    n_hi: usize,
    options: EvalOptions,
) -> recres_core::Result<Report> {
    let start = Instant::now();
    let mut timings = Timings::default();
    let validation = match validate(spec, n_hi, options.validation) {
        Ok(report) => summarize(report),
        Err(Error::MissingStep(n)) => ValidationSummary {
            ok: false,
            violations: vec![ViolationEntry {
                code: "MissingStep".into(),
                step: Some(n),
                detail: format!("no coefficients for step {n}"),
            }],
            warnings: Vec::new(),
        },
        Err(e) => return Err(e),
    };
    let mut report = Report {
        tool_version: TOOL_VERSION.into(),
        seed,
        instance: identity,
        n_range: [n_lo, n_hi],
        validation,
        records: Vec::new(),
        passed: false,
        first_failure: None,
        timings: None,
    };
    if !report.validation.ok {
        return Ok(report);
    }

    let seq = timed(&mut timings.generate_ms, || sequence(spec, n_hi))?;
    let ctx = FormulaContext::with_options(spec, options.validation);
    let method = options.method;
    for n in n_lo..=n_hi {
        let (f, g) = (&seq[n], &seq[n - 1]);
        let formula =
            if method.formula() { Some(timed(&mut timings.formula_ms, || ctx.resultant_formula(n))?) } else { None };
        let sylvester = if method.sylvester() {
            Some(timed(&mut timings.sylvester_ms, || resultant_sylvester(f, g))?)
        } else {
            None
        };
        let euclid =
            if method.euclid() { Some(timed(&mut timings.euclid_ms, || resultant_euclid(f, g))?) } else { None };
        let mut record = Record {
            n,
            degree: f.degree().to_string(),
            formula_matches: flag(&formula, &sylvester),
            euclid_matches: flag(&euclid, &sylvester),
            formula: formula.map(|s| s.to_string()),
            sylvester: sylvester.map(|s| s.to_string()),
            euclid: euclid.map(|s| s.to_string()),
            ..Record::default()
        };
        if options.closed_form_checks {
            timed(&mut timings.checks_ms, || -> recres_core::Result<()> {
                let expected = degree_formula(spec, n);
                record.degree_matches = Some(f.degree().finite().is_some_and(|d| expected == d.into()));
                record.leading_matches = Some(ctx.leading_term(n)? == f.leading_coeff());
                let constant = f.constant_term();
                let mut constant_ok = ctx.constant_value(n)? == constant;
                if spec.l() > 0 {
                    constant_ok &= ctx.constant_term(n)? == constant;
                }
                record.constant_matches = Some(constant_ok);
                Ok(())
            })?;
        }
        report.records.push(record);
    }
    report.first_failure = report.records.iter().find(|r| !r.passed()).map(|r| r.n);
    report.passed = report.first_failure.is_none();
    timings.total_ms = ms(start.elapsed());
    if options.timings {
        report.timings = Some(timings);
    }
    Ok(report)
}
