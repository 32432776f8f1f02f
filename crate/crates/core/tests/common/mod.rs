//! Small seeded instance sampler shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use recres_core::recurrence::alphas_up_to;
use recres_core::{validate, FieldDescriptor, Poly, RecurrenceSpec, Scalar, StepCoeffs, TTerm, ValidationOptions};

/// SplitMix64, enough for test sampling.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn int(&mut self, bound: i64) -> i64 {
        self.below(2 * bound as u64 + 1) as i64 - bound
    }

    pub fn nonzero(&mut self, descriptor: FieldDescriptor, bound: i64) -> Scalar {
        loop {
            let s = Scalar::from_integer(descriptor, self.int(bound));
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn poly(&mut self, descriptor: FieldDescriptor, degree: usize, bound: i64) -> Poly {
        let mut c: Vec<Scalar> = (0..degree).map(|_| Scalar::from_integer(descriptor, self.int(bound))).collect();
        c.push(self.nonzero(descriptor, bound));
        Poly::new(descriptor, c).unwrap()
    }
}

pub struct Bounds {
    pub d_max: usize,
    pub m_max: usize,
    pub k_max: usize,
    pub i_max: usize,
    pub coeff: i64,
}

/// Draws an instance valid up to `d + extra`, resampling until it validates.
pub fn sample(rng: &mut Rng, descriptor: FieldDescriptor, bounds: &Bounds, extra: usize) -> RecurrenceSpec {
    loop {
        let d = 1 + rng.below(bounds.d_max as u64) as usize;
        let m = 1 + rng.below(bounds.m_max as u64) as usize;
        let k = rng.below(bounds.k_max as u64 + 1) as usize;
        let l = rng.below(k as u64 + 1) as usize;
        let mut degrees: Vec<usize> = (0..=d).map(|_| rng.below(bounds.i_max as u64 + 1) as usize).collect();
        degrees.sort_unstable();
        let initials = degrees.iter().map(|&i| rng.poly(descriptor, i, bounds.coeff)).collect();
        let mut steps = BTreeMap::new();
        for n in d + 1..=d + extra {
            let g = rng.poly(descriptor, k, bounds.coeff);
            let mut t_terms = Vec::new();
            if k >= 2 && m >= 2 {
                for alpha in alphas_up_to(d + 1, m - 1) {
                    if rng.below(3) == 0 {
                        let deg = 1 + rng.below(k as u64 - 1) as usize;
                        let mut c = vec![Scalar::from_integer(descriptor, 0)];
                        c.extend((1..=deg).map(|_| Scalar::from_integer(descriptor, rng.int(bounds.coeff))));
                        let poly = Poly::new(descriptor, c).unwrap();
                        if !poly.is_zero() {
                            t_terms.push(TTerm { alpha, poly });
                        }
                    }
                }
            }
            steps.insert(n, StepCoeffs { g, t_terms, v: rng.nonzero(descriptor, bounds.coeff) });
        }
        let spec = RecurrenceSpec::new(descriptor, d, m, k, l, degrees, initials, steps).unwrap();
        if validate(&spec, d + extra, ValidationOptions::default()).unwrap().ok {
            return spec;
        }
    }
}
