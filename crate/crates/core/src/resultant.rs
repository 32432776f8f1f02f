//! Resultants by two independent routes: the Sylvester determinant and a
//! remainder-sequence (Euclidean) recursion.
//!
//! Both agree on their shared domain, which is what the differential checks
//! elsewhere in the crate rely on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{inv_mod, mul_mod, sub_mod, FieldDescriptor, Scalar};
use crate::poly::{Degree, Poly};

/// Dense row-major matrix of scalars from one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    descriptor: FieldDescriptor,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(descriptor: FieldDescriptor, rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch { rows, cols, len: entries.len() });
        }
        if entries.iter().any(|e| e.descriptor() != descriptor) {
            return Err(Error::DescriptorMismatch);
        }
        Ok(Self { descriptor, rows, cols, entries })
    }

    pub fn from_int_rows(descriptor: FieldDescriptor, rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let entries = rows.iter().flat_map(|r| r.iter().map(|&v| Scalar::from_integer(descriptor, v))).collect();
        Self::new(descriptor, rows.len(), cols, entries)
    }

    pub fn identity(descriptor: FieldDescriptor, n: usize) -> Self {
        let mut entries = vec![descriptor.zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = descriptor.one();
        }
        Self { descriptor, rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        self.descriptor
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }
}

/// Sylvester matrix of `f` (degree n) and `g` (degree m).
///
/// The first m rows carry shifted copies of f's coefficients, the last n
/// rows shifted copies of g's, highest degree first:
/// row i < m holds `a_{n-j+i}` in column j, row m+i holds `b_{m-j+i}`.
pub fn sylvester_matrix(f: &Poly, g: &Poly) -> Result<Matrix> {
    if f.descriptor() != g.descriptor() {
        return Err(Error::DescriptorMismatch);
    }
    let (Degree::Finite(n), Degree::Finite(m)) = (f.degree(), g.degree()) else {
        return Err(Error::ZeroPolynomial);
    };
    if n + m == 0 {
        return Err(Error::BothConstant);
    }
    let descriptor = f.descriptor();
    let size = n + m;
    let mut entries = Vec::with_capacity(size * size);
    let mut push_rows = |p: &Poly, deg: usize, count: usize| {
        for i in 0..count {
            for j in 0..size {
                // coefficient index deg - (j - i), zero outside 0..=deg
                let idx = (deg + i).checked_sub(j).filter(|&k| k <= deg);
                entries.push(idx.map_or_else(|| descriptor.zero(), |k| p.coeff(k)));
            }
        }
    };
    push_rows(f, n, m);
    push_rows(g, m, n);
    Matrix::new(descriptor, size, size, entries)
}

/// Exact determinant. The empty matrix has determinant 1.
///
/// Over F_p this is Gaussian elimination on raw residues; over Q each row
/// is scaled to integers and the result comes from fraction-free Bareiss
/// elimination, divided back by the row scales.
pub fn determinant(matrix: &Matrix) -> Result<Scalar> {
    if matrix.rows != matrix.cols {
        return Err(Error::NotSquare { rows: matrix.rows, cols: matrix.cols });
    }
    match matrix.descriptor {
        FieldDescriptor::Prime(p) => {
            let values = matrix.entries.iter().map(|e| e.as_residue().expect("prime field entry")).collect();
            Ok(Scalar::from_residue(p, det_mod_p(values, matrix.rows, p.get())))
        }
        FieldDescriptor::Rational => {
            let n = matrix.rows;
            let mut ints = Vec::with_capacity(n * n);
            let mut scale = BigInt::one();
            for i in 0..n {
                let row = matrix.row(i);
                let lcm = row
                    .iter()
                    .map(|e| e.as_rational().expect("rational entry").denom().clone())
                    .fold(BigInt::one(), |acc, d| acc.lcm(&d));
                for e in row {
                    let q = e.as_rational().expect("rational entry");
                    ints.push(q.numer() * (&lcm / q.denom()));
                }
                scale *= lcm;
            }
            let det = det_bareiss(ints, n);
            Scalar::from_ratio(FieldDescriptor::Rational, &det, &scale)
        }
    }
}

fn det_mod_p(mut a: Vec<u64>, n: usize, p: u64) -> u64 {
    let mut det = 1u64;
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&i| a[i * n + k] != 0) else {
            return 0;
        };
        if pivot != k {
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            det = sub_mod(0, det, p);
        }
        let pv = a[k * n + k];
        det = mul_mod(det, pv, p);
        let pv_inv = inv_mod(pv, p);
        for i in k + 1..n {
            let lead = a[i * n + k];
            if lead == 0 {
                continue;
            }
            let factor = mul_mod(lead, pv_inv, p);
            for j in k..n {
                let t = mul_mod(factor, a[k * n + j], p);
                a[i * n + j] = sub_mod(a[i * n + j], t, p);
            }
        }
    }
    det
}

/// Fraction-free elimination; every division below is exact.
fn det_bareiss(mut a: Vec<BigInt>, n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(pivot) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    let det = a[n * n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Degrees of both arguments after resolving the zero/constant corner cases
/// shared by both algorithms. `Err` carries a final answer or an error.
fn nontrivial_degrees(f: &Poly, g: &Poly) -> Result<(usize, usize), Result<Scalar>> {
    if f.descriptor() != g.descriptor() {
        return Err(Err(Error::DescriptorMismatch));
    }
    match (f.degree(), g.degree()) {
        (Degree::NegInfinity, Degree::NegInfinity) => Err(Err(Error::BothZero)),
        // Res(F, 0) = 0 for nonconstant F; zero against a constant is undefined.
        (Degree::NegInfinity, Degree::Finite(d)) | (Degree::Finite(d), Degree::NegInfinity) => {
            if d == 0 {
                Err(Err(Error::ZeroPolynomial))
            } else {
                Err(Ok(f.descriptor().zero()))
            }
        }
        (Degree::Finite(0), Degree::Finite(0)) => Err(Ok(f.descriptor().one())),
        (Degree::Finite(n), Degree::Finite(m)) => Ok((n, m)),
    }
}

/// `Res(f, g)` as the Sylvester determinant.
pub fn resultant_sylvester(f: &Poly, g: &Poly) -> Result<Scalar> {
    match nontrivial_degrees(f, g) {
        Ok(_) => determinant(&sylvester_matrix(f, g)?),
        Err(done) => done,
    }
}

/// `Res(f, g)` by the remainder sequence.
///
/// Each round orders the pair so `deg f >= deg g` (sign `(-1)^{nm}`), then
/// replaces `Res(g, f)` with `lc(g)^{deg f - deg r} Res(g, r)` where
/// `r = f mod g`, stopping at a constant or a zero remainder.
pub fn resultant_euclid(f: &Poly, g: &Poly) -> Result<Scalar> {
    let (mut n, mut m) = match nontrivial_degrees(f, g) {
        Ok(degrees) => degrees,
        Err(done) => return done,
    };
    let descriptor = f.descriptor();
    let mut acc = descriptor.one();
    let mut f = f.clone();
    let mut g = g.clone();
    loop {
        if n < m {
            std::mem::swap(&mut f, &mut g);
            std::mem::swap(&mut n, &mut m);
            if n * m % 2 == 1 {
                acc = -acc;
            }
        }
        if m == 0 {
            return Ok(&acc * &g.leading_coeff().pow(n as u64));
        }
        let (_, r) = f.divrem(&g)?;
        let Degree::Finite(k) = r.degree() else {
            return Ok(descriptor.zero());
        };
        // Res(f, g) = (-1)^{nm} Res(g, f) = (-1)^{nm} lc(g)^{n-k} Res(g, r)
        let mut factor = g.leading_coeff().pow((n - k) as u64);
        if n * m % 2 == 1 {
            factor = -factor;
        }
        acc = &acc * &factor;
        f = g;
        g = r;
        n = m;
        m = k;
    }
}
