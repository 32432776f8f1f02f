//! Seeded instance sampling and batch verification.
//!
//! The generator is SplitMix64 (`rand_xoshiro::SplitMix64`). A master stream
//! seeded with `seed` yields one 64-bit sub-seed per instance index, and each
//! instance is drawn from its own SplitMix64 stream, so instance `i` does not
//! depend on how many retries earlier instances needed. An integer in `[0, n)`
//! is `next_u64() % n`.
//!
//! Per attempt, in this order:
//! 1. `d = 1 + u(d_max)`, `m = 1 + u(m_max)`, `k = u(k_max + 1)`, `l = u(k + 1)`;
//! 2. `d + 1` draws of `u(i_max + 1)`, sorted ascending, as `i_0..i_d`;
//! 3. initial polynomials: coefficients of `x^0..x^{i_s - 1}` uniform in
//!    `[-B, B]`, then a leading coefficient uniform in `[-B, B]`, redrawn
//!    while it is zero in the field;
//! 4. for each `n` in `d+1..=n_max`: `g_n` like an initial of degree `k`; when
//!    `k >= 2` and `m >= 2`, for each `alpha` with `|alpha| < m` in
//!    lexicographic order, with probability 1/3 a t-term of degree
//!    `1 + u(k - 1)` with zero constant term and coefficients uniform in
//!    `[-B, B]` (dropped if it comes out zero); then `v_n` uniform nonzero.
//!
//! An attempt that fails validation is discarded and the same stream continues.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use recres_core::recurrence::alphas_up_to;
use recres_core::{validate, FieldDescriptor, Poly, RecurrenceSpec, Scalar, StepCoeffs, TTerm, ValidationOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::InstanceFile;
use crate::verify::{evaluate, EvalOptions, InstanceIdentity, Report, TOOL_VERSION};

pub const DEFAULT_PRIME: u64 = 10007;
pub const DEFAULT_COEFF_BOUND: i64 = 5;
pub const DEFAULT_MAX_RETRIES: usize = 1000;

/// Last index verified: absolute, relative to `d`, or the default
/// (`d + 3` for `m >= 2`, `d + 6` for `m = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NMax {
    Absolute(usize),
    Relative(usize),
    Default,
}

impl NMax {
    pub fn resolve(self, d: usize, m: usize) -> usize {
        match self {
            NMax::Absolute(n) => n,
            NMax::Relative(k) => d + k,
            NMax::Default if m >= 2 => d + 3,
            NMax::Default => d + 6,
        }
    }
}

impl FromStr for NMax {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad n-max '{s}': {e}"));
        match s.strip_prefix('d') {
            Some(rest) => match rest.trim().strip_prefix('+') {
                Some(k) => parse(k).map(NMax::Relative),
                None if rest.trim().is_empty() => Ok(NMax::Relative(0)),
                None => Err(format!("bad n-max '{s}': expected N or d+K")),
            },
            None => parse(s).map(NMax::Absolute),
        }
    }
}

impl fmt::Display for NMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NMax::Absolute(n) => write!(f, "{n}"),
            NMax::Relative(k) => write!(f, "d+{k}"),
            NMax::Default => f.write_str("default"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub d_max: usize,
    pub m_max: usize,
    pub k_max: usize,
    pub i_max: usize,
    pub coeff_bound: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self { d_max: 2, m_max: 2, k_max: 2, i_max: 2, coeff_bound: DEFAULT_COEFF_BOUND }
    }
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub bounds: Bounds,
    pub n_max: NMax,
    pub field: FieldDescriptor,
    pub max_retries: usize,
    pub timings: bool,
}

impl FuzzConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            bounds: Bounds::default(),
            n_max: NMax::Default,
            field: FieldDescriptor::prime(DEFAULT_PRIME).expect("prime"),
            max_retries: DEFAULT_MAX_RETRIES,
            timings: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum FuzzError {
    #[error("invalid bounds: {0}")]
    Bounds(String),
    #[error("instance {index}: no valid draw after {retries} attempts")]
    RetriesExhausted { index: usize, retries: usize },
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("instance {index}: {source}")]
    Core { index: usize, source: recres_core::Error },
}

struct Draw(SplitMix64);

impl Draw {
    fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    fn int(&mut self, bound: i64) -> i64 {
        (self.0.next_u64() % (2 * bound as u64 + 1)) as i64 - bound
    }

    fn scalar(&mut self, field: FieldDescriptor, bound: i64) -> Scalar {
        Scalar::from_integer(field, self.int(bound))
    }

    fn nonzero(&mut self, field: FieldDescriptor, bound: i64) -> Scalar {
        loop {
            let s = self.scalar(field, bound);
            if !s.is_zero() {
                return s;
            }
        }
    }

    fn poly(&mut self, field: FieldDescriptor, degree: usize, bound: i64) -> Poly {
        let mut c: Vec<Scalar> = (0..degree).map(|_| self.scalar(field, bound)).collect();
        c.push(self.nonzero(field, bound));
        Poly::new(field, c).expect("one field")
    }
}

fn attempt(rng: &mut Draw, field: FieldDescriptor, b: &Bounds, n_max: NMax) -> (RecurrenceSpec, usize) {
    let bound = b.coeff_bound;
    let d = 1 + rng.below(b.d_max);
    let m = 1 + rng.below(b.m_max);
    let k = rng.below(b.k_max + 1);
    let l = rng.below(k + 1);
    let mut degrees: Vec<usize> = (0..=d).map(|_| rng.below(b.i_max + 1)).collect();
    degrees.sort_unstable();
    let initials = degrees.iter().map(|&i| rng.poly(field, i, bound)).collect();
    let top = n_max.resolve(d, m);
    let mut steps = BTreeMap::new();
    for n in d + 1..=top {
        let g = rng.poly(field, k, bound);
        let mut t_terms = Vec::new();
        if k >= 2 && m >= 2 {
            for alpha in alphas_up_to(d + 1, m - 1) {
                if rng.below(3) == 0 {
                    let deg = 1 + rng.below(k - 1);
                    let mut c = vec![field.zero()];
                    c.extend((0..deg).map(|_| rng.scalar(field, bound)));
                    let poly = Poly::new(field, c).expect("one field");
                    if !poly.is_zero() {
                        t_terms.push(TTerm { alpha, poly });
                    }
                }
            }
        }
        steps.insert(n, StepCoeffs { g, t_terms, v: rng.nonzero(field, bound) });
    }
    let spec = RecurrenceSpec::new(field, d, m, k, l, degrees, initials, steps).expect("structurally sound");
    (spec, top)
}

/// A validated instance together with the `n_max` it was drawn for.
#[derive(Clone, Debug)]
pub struct Sampled {
    pub index: usize,
    pub spec: RecurrenceSpec,
    pub n_max: usize,
    pub attempts: usize,
}

/// Draws all `count` instances; deterministic in `config`.
pub fn sample_all(config: &FuzzConfig) -> Result<Vec<Sampled>, FuzzError> {
    check_bounds(&config.bounds)?;
    let mut master = SplitMix64::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.count).map(|_| master.next_u64()).collect();
    seeds
        .into_iter()
        .enumerate()
        .map(|(index, sub)| {
            let mut rng = Draw(SplitMix64::seed_from_u64(sub));
            for attempts in 1..=config.max_retries {
                let (spec, n_max) = attempt(&mut rng, config.field, &config.bounds, config.n_max);
                let report = validate(&spec, n_max, ValidationOptions::default())
                    .map_err(|source| FuzzError::Core { index, source })?;
                if report.ok {
                    return Ok(Sampled { index, spec, n_max, attempts });
                }
            }
            Err(FuzzError::RetriesExhausted { index, retries: config.max_retries })
        })
        .collect()
}

fn check_bounds(b: &Bounds) -> Result<(), FuzzError> {
    if b.d_max == 0 || b.m_max == 0 {
        return Err(FuzzError::Bounds("d-max and m-max must be at least 1".into()));
    }
    if b.coeff_bound <= 0 {
        return Err(FuzzError::Bounds("coefficient bound must be positive".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub edge_branch: usize,
    pub generic_branch: usize,
    pub l_zero: usize,
    pub l_positive: usize,
    pub with_t_terms: usize,
    pub by_d: BTreeMap<usize, usize>,
    pub by_m: BTreeMap<usize, usize>,
}

impl Coverage {
    fn add(&mut self, spec: &RecurrenceSpec) {
        if spec.is_edge_branch() {
            self.edge_branch += 1;
        } else {
            self.generic_branch += 1;
        }
        if spec.l() == 0 {
            self.l_zero += 1;
        } else {
            self.l_positive += 1;
        }
        if spec.steps().values().any(|s| !s.t_terms.is_empty()) {
            self.with_t_terms += 1;
        }
        *self.by_d.entry(spec.d()).or_default() += 1;
        *self.by_m.entry(spec.m()).or_default() += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzSettings {
    pub d_max: usize,
    pub m_max: usize,
    pub k_max: usize,
    pub i_max: usize,
    pub n_max: String,
    pub coeff_bound: i64,
    pub max_retries: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzEntry {
    pub index: usize,
    pub file: String,
    pub attempts: usize,
    pub report: Report,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub tool_version: String,
    pub seed: u64,
    pub count: usize,
    pub field: String,
    pub bounds: FuzzSettings,
    pub coverage: Coverage,
    pub passed: usize,
    pub failed: Vec<String>,
    pub all_passed: bool,
    pub instances: Vec<FuzzEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_ms: Option<f64>,
}

impl FuzzReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn instance_file_name(index: usize) -> String {
    format!("instance_{index:04}.json")
}

pub const REPORT_FILE: &str = "report.json";

fn write(path: &Path, text: &str) -> Result<(), FuzzError> {
    fs::write(path, text).map_err(|source| FuzzError::Io { path: path.display().to_string(), source })
}

/// Samples, dumps every instance into `out`, verifies in parallel and writes
/// `report.json`. Paths inside the report are relative to `out`.
pub fn run(config: &FuzzConfig, out: &Path) -> Result<FuzzReport, FuzzError> {
    let start = Instant::now();
    let sampled = sample_all(config)?;
    fs::create_dir_all(out).map_err(|source| FuzzError::Io { path: out.display().to_string(), source })?;
    let mut coverage = Coverage::default();
    for s in &sampled {
        coverage.add(&s.spec);
        let name = format!("fuzz-{}-{}", config.seed, s.index);
        let file = InstanceFile::from_spec(&s.spec, Some(name), Some(config.seed));
        write(&out.join(instance_file_name(s.index)), &file.to_json())?;
    }

    let options = EvalOptions { timings: config.timings, ..EvalOptions::verify() };
    let mut instances = sampled
        .par_iter()
        .map(|s| {
            let file = instance_file_name(s.index);
            let name = format!("fuzz-{}-{}", config.seed, s.index);
            let identity = InstanceIdentity::of(&s.spec, Some(name), Some(file.clone()));
            let report = evaluate(&s.spec, identity, Some(config.seed), s.spec.d() + 1, s.n_max, options)
                .map_err(|source| FuzzError::Core { index: s.index, source })?;
            Ok(FuzzEntry { index: s.index, file, attempts: s.attempts, report })
        })
        .collect::<Result<Vec<_>, FuzzError>>()?;
    instances.sort_by_key(|e| e.index);

    let failed: Vec<String> = instances.iter().filter(|e| !e.report.passed).map(|e| e.file.clone()).collect();
    let b = config.bounds;
    let report = FuzzReport {
        tool_version: TOOL_VERSION.into(),
        seed: config.seed,
        count: config.count,
        field: config.field.to_string(),
        bounds: FuzzSettings {
            d_max: b.d_max,
            m_max: b.m_max,
            k_max: b.k_max,
            i_max: b.i_max,
            n_max: config.n_max.to_string(),
            coeff_bound: b.coeff_bound,
            max_retries: config.max_retries,
        },
        coverage,
        passed: instances.len() - failed.len(),
        all_passed: failed.is_empty(),
        failed,
        instances,
        total_ms: config.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    write(&out.join(REPORT_FILE), &report.to_json())?;
    Ok(report)
}

/// Path of a dumped instance, for messages.
pub fn instance_path(out: &Path, index: usize) -> PathBuf {
    out.join(instance_file_name(index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_max_forms() {
        assert_eq!("7".parse::<NMax>().unwrap(), NMax::Absolute(7));
        assert_eq!("d+3".parse::<NMax>().unwrap(), NMax::Relative(3));
        assert_eq!("d + 2".parse::<NMax>().unwrap(), NMax::Relative(2));
        assert!("e+3".parse::<NMax>().is_err());
        assert_eq!(NMax::Default.resolve(2, 3), 5);
        assert_eq!(NMax::Default.resolve(2, 1), 8);
        assert_eq!(NMax::Relative(3).to_string(), "d+3");
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let mut config = FuzzConfig::new(9, 12);
        config.bounds = Bounds { d_max: 2, m_max: 3, k_max: 3, i_max: 3, coeff_bound: 5 };
        config.n_max = NMax::Relative(2);
        let a = sample_all(&config).unwrap();
        let b = sample_all(&config).unwrap();
        assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.spec, y.spec);
            assert_eq!(x.n_max, x.spec.d() + 2);
            assert!(validate(&x.spec, x.n_max, ValidationOptions::default()).unwrap().ok);
            assert!(x.spec.degrees().iter().all(|&i| i <= 3));
        }
        // a prefix of the run is the smaller run
        config.count = 5;
        let prefix = sample_all(&config).unwrap();
        assert!(prefix.iter().zip(&a).all(|(x, y)| x.spec == y.spec));
    }

    #[test]
    fn retries_exhaust_on_impossible_bounds() {
        // k = 0 and m = 1 always collide in degree
        let mut config = FuzzConfig::new(1, 1);
        config.bounds = Bounds { d_max: 1, m_max: 1, k_max: 0, i_max: 2, coeff_bound: 5 };
        config.max_retries = 20;
        assert!(matches!(sample_all(&config), Err(FuzzError::RetriesExhausted { index: 0, retries: 20 })));
    }

    #[test]
    fn bad_bounds() {
        let mut config = FuzzConfig::new(1, 1);
        config.bounds.d_max = 0;
        assert!(matches!(sample_all(&config), Err(FuzzError::Bounds(_))));
    }
}
