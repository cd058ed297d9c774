//! Exact field arithmetic (rationals and odd prime fields) and dense exact
//! linear algebra: row reduction, rank, kernels, subspace comparison.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The coefficient field every computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    /// Prime fields with p = 2 are rejected (char(K) != 2 throughout).
    pub fn prime_field(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::CharacteristicTwo);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::PrimeField(p))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::Mod { p: *p, value: 0 },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::one()),
            FieldSpec::PrimeField(p) => Scalar::Mod { p: *p, value: 1 },
        }
    }

    pub fn from_integer(&self, k: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from(BigInt::from(k))),
            FieldSpec::PrimeField(p) => {
                let m = k.rem_euclid(*p as i64) as u64;
                Scalar::Mod { p: *p, value: m }
            }
        }
    }

    /// Parse "a/b" or "a" over Q; an integer string reduced mod p over F_p.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        match self {
            FieldSpec::Rationals => {
                let mk = |t: &str| -> Result<BigInt> {
                    BigInt::from_str(t).map_err(|_| Error::Parse(format!("bad rational: {s:?}")))
                };
                if let Some((num, den)) = s.split_once('/') {
                    let d = mk(den.trim())?;
                    if d.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    Ok(Scalar::Rational(BigRational::new(mk(num.trim())?, d)))
                } else {
                    Ok(Scalar::Rational(BigRational::from(mk(s)?)))
                }
            }
            FieldSpec::PrimeField(p) => {
                let v = i128::from_str(s)
                    .map_err(|_| Error::Parse(format!("bad prime-field element: {s:?}")))?;
                Ok(Scalar::Mod {
                    p: *p,
                    value: v.rem_euclid(*p as i128) as u64,
                })
            }
        }
    }
}

/// An exact element of the working field, always in canonical form, so
/// structural equality coincides with field equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Mod { p: u64, value: u64 },
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = base as u128 % p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Mod { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Mod { p, value: a }, Scalar::Mod { p: q, value: b }) if p == q => {
                Ok(Scalar::Mod {
                    p: *p,
                    value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                })
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { p, value } => Scalar::Mod {
                p: *p,
                value: if *value == 0 { 0 } else { p - value },
            },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Mod { p, value: a }, Scalar::Mod { p: q, value: b }) if p == q => {
                Ok(Scalar::Mod {
                    p: *p,
                    value: (*a as u128 * *b as u128 % *p as u128) as u64,
                })
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Scalar::Rational(a) => Ok(Scalar::Rational(a.recip())),
            Scalar::Mod { p, value } => Ok(Scalar::Mod {
                p: *p,
                value: mod_pow(*value, p - 2, *p),
            }),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: i64) -> Result<Scalar> {
        let mut base = self.clone();
        if e < 0 {
            base = base.inv()?;
            e = -e;
        }
        let mut acc = base.field().one();
        for _ in 0..e {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Returns true for rationals with negative numerator; used only for printing.
pub fn display_negative(s: &Scalar) -> bool {
    match s {
        Scalar::Rational(r) => r.is_negative(),
        Scalar::Mod { .. } => false,
    }
}

/// Dense row-major matrix over one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    pub entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, field: FieldSpec, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::SizeMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for e in &entries {
            if e.field() != field {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(Matrix {
            rows,
            cols,
            field,
            entries,
        })
    }

    pub fn zero(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Matrix {
            rows,
            cols,
            field,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Matrix::zero(n, n, field);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Scalar>], field: FieldSpec) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
        }
        Matrix::new(
            rows.len(),
            cols,
            field,
            rows.iter().flatten().cloned().collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }
}

/// Result of deterministic Gauss-Jordan elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReduction {
    pub rref: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row-echelon form with first-nonzero-in-column pivoting, so the
/// output is reproducible byte for byte.
pub fn row_reduce(m: &Matrix) -> Result<RowReduction> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        // first nonzero entry in column c at or below row r
        let Some(pr) = (r..a.rows).find(|&i| !a.at(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..a.cols {
                a.entries.swap(r * a.cols + j, pr * a.cols + j);
            }
        }
        let inv = a.at(r, c).inv()?;
        for j in 0..a.cols {
            let v = a.at(r, j).mul(&inv)?;
            *a.at_mut(r, j) = v;
        }
        for i in 0..a.rows {
            if i != r && !a.at(i, c).is_zero() {
                let f = a.at(i, c).clone();
                for j in 0..a.cols {
                    let v = a.at(i, j).sub(&a.at(r, j).mul(&f)?)?;
                    *a.at_mut(i, j) = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(RowReduction {
        rank: r,
        rref: a,
        pivots,
    })
}

pub fn rank(m: &Matrix) -> Result<usize> {
    Ok(row_reduce(m)?.rank)
}

fn stack(vectors: &[Vec<Scalar>], dim: usize, field: FieldSpec) -> Result<Matrix> {
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} != {}",
                v.len(),
                dim
            )));
        }
    }
    Matrix::new(
        vectors.len(),
        dim,
        field,
        vectors.iter().flatten().cloned().collect(),
    )
}

/// span(a) = span(b), decided by rank comparisons of stacked matrices.
pub fn subspace_equal(a: &[Vec<Scalar>], b: &[Vec<Scalar>], field: FieldSpec) -> Result<bool> {
    if a.is_empty() && b.is_empty() {
        return Ok(true);
    }
    let dim = a
        .first()
        .or_else(|| b.first())
        .map(|v| v.len())
        .unwrap_or(0);
    let ma = stack(a, dim, field)?;
    let mb = stack(b, dim, field)?;
    let ra = rank(&ma)?;
    let rb = rank(&mb)?;
    if ra != rb {
        return Ok(false);
    }
    let mut all: Vec<Vec<Scalar>> = a.to_vec();
    all.extend_from_slice(b);
    Ok(rank(&stack(&all, dim, field)?)? == ra)
}

/// span(a) contains v?
pub fn in_span(vectors: &[Vec<Scalar>], v: &[Scalar], field: FieldSpec) -> Result<bool> {
    if vectors.is_empty() {
        return Ok(v.iter().all(|x| x.is_zero()));
    }
    let dim = vectors[0].len();
    let m = stack(vectors, dim, field)?;
    let r = rank(&m)?;
    let mut all = vectors.to_vec();
    all.push(v.to_vec());
    Ok(rank(&stack(&all, dim, field)?)? == r)
}

/// Solve A x = b exactly; None when inconsistent. Free variables are set to 0.
pub fn solve(a: &Matrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} != {} rows",
            b.len(),
            a.rows
        )));
    }
    let mut aug = Matrix::zero(a.rows, a.cols + 1, a.field);
    for i in 0..a.rows {
        for j in 0..a.cols {
            *aug.at_mut(i, j) = a.at(i, j).clone();
        }
        *aug.at_mut(i, a.cols) = b[i].clone();
    }
    let red = row_reduce(&aug)?;
    if red.pivots.contains(&a.cols) {
        return Ok(None);
    }
    let mut x = vec![a.field.zero(); a.cols];
    for (r, &c) in red.pivots.iter().enumerate() {
        x[c] = red.rref.at(r, a.cols).clone();
    }
    Ok(Some(x))
}

/// Basis of the right kernel of A.
pub fn kernel(a: &Matrix) -> Result<Vec<Vec<Scalar>>> {
    let red = row_reduce(a)?;
    let pivot_set: std::collections::HashSet<usize> = red.pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..a.cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![a.field.zero(); a.cols];
        v[free] = a.field.one();
        for (r, &c) in red.pivots.iter().enumerate() {
            v[c] = red.rref.at(r, free).neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Scalar {
        FieldSpec::Rationals.parse(s).unwrap()
    }

    #[test]
    fn rational_arithmetic() {
        assert_eq!(q("1/2").add(&q("1/3")).unwrap(), q("5/6"));
        assert_eq!(q("-4/6"), q("-2/3"));
        assert_eq!(q("2/3").inv().unwrap(), q("3/2"));
    }

    #[test]
    fn prime_field_inverse() {
        let f7 = FieldSpec::prime_field(7).unwrap();
        let three = f7.parse("3").unwrap();
        assert_eq!(three.inv().unwrap(), f7.parse("5").unwrap());
        assert_eq!(f7.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn char_two_rejected() {
        assert_eq!(FieldSpec::prime_field(2), Err(Error::CharacteristicTwo));
        assert_eq!(FieldSpec::prime_field(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn mixed_fields_rejected() {
        let f5 = FieldSpec::prime_field(5).unwrap();
        assert_eq!(q("1").add(&f5.one()), Err(Error::FieldMismatch));
    }

    #[test]
    fn rref_identity() {
        let f = FieldSpec::Rationals;
        let id = Matrix::identity(2, f);
        let red = row_reduce(&id).unwrap();
        assert_eq!(red.rref, id);
        assert_eq!(red.rank, 2);
    }

    #[test]
    fn rref_rank_one() {
        let f = FieldSpec::Rationals;
        let m = Matrix::from_rows(&[vec![q("1"), q("2")], vec![q("2"), q("4")]], f).unwrap();
        assert_eq!(rank(&m).unwrap(), 1);
    }

    #[test]
    fn rref_skew_pattern() {
        // [[0,1],[mu21,0]] has determinant -mu21 != 0
        let f = FieldSpec::Rationals;
        let m = Matrix::from_rows(&[vec![q("0"), q("1")], vec![q("1/3"), q("0")]], f).unwrap();
        assert_eq!(rank(&m).unwrap(), 2);
    }

    #[test]
    fn subspace_comparisons() {
        let f = FieldSpec::Rationals;
        let e1 = vec![q("1"), q("0")];
        let e1x2 = vec![q("2"), q("0")];
        let e2 = vec![q("0"), q("1")];
        assert!(subspace_equal(&[e1.clone()], &[e1x2], f).unwrap());
        assert!(!subspace_equal(&[e1.clone()], &[e1, e2], f).unwrap());
        assert!(subspace_equal(&[], &[], f).unwrap());
    }

    #[test]
    fn solve_and_kernel() {
        let f = FieldSpec::Rationals;
        let a = Matrix::from_rows(&[vec![q("1"), q("1")], vec![q("0"), q("1")]], f).unwrap();
        let x = solve(&a, &[q("3"), q("1")]).unwrap().unwrap();
        assert_eq!(x, vec![q("2"), q("1")]);
        let b = Matrix::from_rows(&[vec![q("1"), q("2")]], f).unwrap();
        let k = kernel(&b).unwrap();
        assert_eq!(k, vec![vec![q("-2"), q("1")]]);
    }
}
