//! Exact rational scalars, vectors and matrices.
//!
//! Everything here is backed by `num-rational`'s `BigRational`, which keeps
//! each value in lowest terms with a positive denominator. Structural
//! equality of vectors and matrices is therefore value equality.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` in canonical form. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"`, `"n/d"` or a plain decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole = match whole {
            "" | "-" | "+" => BigInt::zero(),
            w => BigInt::from_str(w).map_err(|_| bad())?,
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = whole.abs() * &scale + frac;
        let n = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(n, scale));
    }
    BigInt::from_str(t)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QVector(Vec<Rational>);

impl QVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        QVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        QVector(vec![Rational::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        QVector(xs.iter().map(|&x| int(x)).collect())
    }

    /// Comma-separated rationals, e.g. `"1,-1/2"`. The empty string is the
    /// zero-dimensional vector.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        if t.trim().is_empty() {
            return Ok(QVector(Vec::new()));
        }
        t.split(',').map(parse_rational).collect::<Result<_>>().map(QVector)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &QVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn add(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rational) -> QVector {
        QVector(self.0.iter().map(|a| a * c).collect())
    }

    /// `self + c * other`
    pub fn axpy(&self, c: &Rational, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + c * b).collect())
    }

    pub fn neg(&self) -> QVector {
        QVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// The positive multiple of `self` with coprime integer entries.
    /// The zero vector is returned unchanged.
    pub fn primitive(&self) -> QVector {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        QVector(
            ints.into_iter()
                .map(|x| Rational::from_integer(x / &g))
                .collect(),
        )
    }

    pub fn concat(&self, other: &QVector) -> QVector {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        QVector(v)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> QVector {
        QVector(self.0[range].to_vec())
    }

    pub fn sum<'a>(dim: usize, vs: impl IntoIterator<Item = &'a QVector>) -> QVector {
        vs.into_iter().fold(QVector::zeros(dim), |acc, v| acc.add(v))
    }
}

impl Index<usize> for QVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl From<Vec<Rational>> for QVector {
    fn from(v: Vec<Rational>) -> Self {
        QVector(v)
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts either a JSON string (`"1/2"`) or an integer literal.
#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Text(String),
    Int(i64),
}

pub(crate) fn rational_from_repr<E: serde::de::Error>(r: RationalReprPub) -> Result<Rational, E> {
    match r.0 {
        RationalRepr::Text(s) => parse_rational(&s).map_err(E::custom),
        RationalRepr::Int(n) => Ok(int(n)),
    }
}

#[derive(Deserialize)]
#[serde(transparent)]
pub(crate) struct RationalReprPub(RationalRepr);

impl Serialize for QVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for QVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<RationalReprPub>::deserialize(d)?;
        raw.into_iter()
            .map(rational_from_repr)
            .collect::<Result<Vec<_>, _>>()
            .map(QVector)
    }
}

/// Serde helper for a single rational stored as `"n/d"`.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        rational_from_repr(RationalReprPub::deserialize(d)?)
    }
}

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: Vec<QVector>,
    ncols: usize,
}

/// Result of row reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub reduced: QMatrix,
    pub pivot_cols: Vec<usize>,
}

impl QMatrix {
    pub fn new(rows: Vec<QVector>, ncols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != ncols) {
            return Err(Error::Dimension(format!(
                "row {bad} has length {} but the matrix has {ncols} columns",
                bad.dim()
            )));
        }
        Ok(QMatrix { rows, ncols })
    }

    /// Panicking variant of [`QMatrix::new`] for internally built rows.
    pub fn from_rows(rows: Vec<QVector>, ncols: usize) -> Self {
        Self::new(rows, ncols).expect("rectangular rows")
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| QVector::from_ints(r)).collect(), ncols)
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        QMatrix {
            rows: vec![QVector::zeros(ncols); nrows],
            ncols,
        }
    }

    pub fn identity(n: usize) -> Self {
        QMatrix {
            rows: (0..n).map(|i| QVector::unit(n, i)).collect(),
            ncols: n,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[QVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<QVector> {
        self.rows
    }

    pub fn row(&self, i: usize) -> &QVector {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn column(&self, j: usize) -> QVector {
        QVector::new(self.rows.iter().map(|r| r[j].clone()).collect())
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix {
            rows: (0..self.ncols).map(|j| self.column(j)).collect(),
            ncols: self.nrows(),
        }
    }

    pub fn mul_vec(&self, x: &QVector) -> QVector {
        debug_assert_eq!(x.dim(), self.ncols);
        QVector::new(self.rows.iter().map(|r| r.dot(x)).collect())
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        debug_assert_eq!(self.ncols, other.nrows());
        let cols: Vec<QVector> = (0..other.ncols).map(|j| other.column(j)).collect();
        QMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| QVector::new(cols.iter().map(|c| r.dot(c)).collect()))
                .collect(),
            ncols: other.ncols,
        }
    }

    pub fn scale(&self, c: &Rational) -> QMatrix {
        QMatrix {
            rows: self.rows.iter().map(|r| r.scale(c)).collect(),
            ncols: self.ncols,
        }
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        QMatrix {
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.add(b)).collect(),
            ncols: self.ncols,
        }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        debug_assert_eq!(self.nrows(), other.nrows());
        QMatrix {
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.concat(b)).collect(),
            ncols: self.ncols + other.ncols,
        }
    }

    /// `[self; other]`
    pub fn vstack(&self, other: &QMatrix) -> QMatrix {
        debug_assert_eq!(self.ncols, other.ncols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        QMatrix { rows, ncols: self.ncols }
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.ncols).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn quadratic_form(&self, x: &QVector) -> Rational {
        x.dot(&self.mul_vec(x))
    }

    pub fn rref(&self) -> Rref {
        let mut m: Vec<Vec<Rational>> = self.rows.iter().map(|r| r.entries().to_vec()).collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == m.len() {
                break;
            }
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].recip();
            for x in m[r].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        Rref {
            rank: pivot_cols.len(),
            reduced: QMatrix {
                rows: m.into_iter().map(QVector::new).collect(),
                ncols: self.ncols,
            },
            pivot_cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<QVector> {
        let Rref { reduced, pivot_cols, .. } = self.rref();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivot_cols.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = QVector::zeros(self.ncols);
                x.0[f] = Rational::one();
                for (i, &p) in pivot_cols.iter().enumerate() {
                    x.0[p] = -reduced.get(i, f).clone();
                }
                x
            })
            .collect()
    }

    /// Some `x` with `self * x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &QVector) -> Option<QVector> {
        assert_eq!(self.nrows(), b.dim(), "right-hand side length");
        let aug = QMatrix {
            rows: self
                .rows
                .iter()
                .zip(b.iter())
                .map(|(r, bi)| r.concat(&QVector::new(vec![bi.clone()])))
                .collect(),
            ncols: self.ncols + 1,
        };
        let Rref { reduced, pivot_cols, .. } = aug.rref();
        if pivot_cols.last() == Some(&self.ncols) {
            return None;
        }
        let mut x = QVector::zeros(self.ncols);
        for (i, &p) in pivot_cols.iter().enumerate() {
            x.0[p] = reduced.get(i, self.ncols).clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square());
        let n = self.ncols;
        let mut m: Vec<Vec<Rational>> = self.rows.iter().map(|r| r.entries().to_vec()).collect();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= &m[c][c];
            let pivot_row = m[c].clone();
            for row in m.iter_mut().skip(c + 1) {
                if row[c].is_zero() {
                    continue;
                }
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        det
    }

    /// Inverse of a square nonsingular matrix.
    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.ncols;
        let Rref { rank, reduced, .. } = self.hstack(&QMatrix::identity(n)).rref();
        if rank < n || (0..n).any(|i| reduced.get(i, i).is_zero()) {
            return None;
        }
        Some(QMatrix {
            rows: reduced.rows.iter().map(|r| r.slice(n..2 * n)).collect(),
            ncols: n,
        })
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Basis of `{z : <z, v> = 0 for every v in vectors}` inside R^dim.
pub fn orth_complement(dim: usize, vectors: &[QVector]) -> Vec<QVector> {
    QMatrix::from_rows(vectors.to_vec(), dim).kernel()
}

/// Canonical basis of `span(vectors)`: the nonzero rows of the reduced
/// row-echelon form, each scaled to a primitive integer vector.
pub fn span_basis(dim: usize, vectors: &[QVector]) -> Vec<QVector> {
    let Rref { rank, reduced, .. } = QMatrix::from_rows(vectors.to_vec(), dim).rref();
    reduced.rows[..rank].iter().map(QVector::primitive).collect()
}

/// Orthogonal projection of `x` onto the orthogonal complement of
/// `span(basis)`; `basis` must be linearly independent.
pub fn project_out(x: &QVector, basis: &[QVector]) -> QVector {
    if basis.is_empty() {
        return x.clone();
    }
    let k = basis.len();
    let gram = QMatrix::from_rows(
        basis
            .iter()
            .map(|b| QVector::new(basis.iter().map(|c| b.dot(c)).collect()))
            .collect(),
        k,
    );
    let rhs = QVector::new(basis.iter().map(|b| b.dot(x)).collect());
    let coef = gram.solve(&rhs).expect("independent basis has a nonsingular Gram matrix");
    basis
        .iter()
        .zip(coef.iter())
        .fold(x.clone(), |acc, (b, c)| acc.axpy(&-c.clone(), b))
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

pub fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.rows.iter())
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<QVector>::deserialize(d)?;
        let ncols = rows.first().map_or(0, QVector::dim);
        QMatrix::new(rows, ncols).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> QVector {
        QVector::from_ints(xs)
    }

    #[test]
    fn parses_and_canonicalizes_rationals() {
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("6/-4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1.5").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        let q = rat(10, -4);
        assert!(q.denom() > &BigInt::zero());
        assert_eq!(format_rational(&q), "-5/2");
    }

    #[test]
    fn rref_identity() {
        let r = QMatrix::identity(2).rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.reduced, QMatrix::identity(2));
        assert_eq!(r.pivot_cols, vec![0, 1]);
    }

    #[test]
    fn rref_dependent_rows() {
        let r = QMatrix::from_ints(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.reduced, QMatrix::from_ints(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.pivot_cols, vec![0]);
    }

    #[test]
    fn rref_of_variational_example_jacobian() {
        // d/dx of (x1 - p, -x2 + x2^2) at x = 0.
        let jx = QMatrix::from_ints(&[&[1, 0], &[0, -1]]);
        assert_eq!(jx.rref().rank, 2);
    }

    #[test]
    fn kernel_cases() {
        let k = QMatrix::zeros(2, 2).kernel();
        assert_eq!(k, vec![v(&[1, 0]), v(&[0, 1])]);
        assert!(QMatrix::identity(2).kernel().is_empty());
        // Transposed Jacobian [[0,1],[0,-1]]^T: v1 - v2 = 0.
        let jt = QMatrix::from_ints(&[&[0, 1], &[0, -1]]).transpose();
        assert_eq!(jt, QMatrix::from_ints(&[&[0, 0], &[1, -1]]));
        assert_eq!(jt.kernel(), vec![v(&[1, 1])]);
    }

    #[test]
    fn orth_complement_cases() {
        assert_eq!(orth_complement(2, &[]).len(), 2);
        assert_eq!(orth_complement(2, &[v(&[0, 0])]).len(), 2);
        assert_eq!(orth_complement(2, &[v(&[1, 2])]), vec![v(&[-2, 1])]);
    }

    #[test]
    fn solve_cases() {
        assert_eq!(QMatrix::identity(2).solve(&v(&[3, 5])), Some(v(&[3, 5])));
        let x = QMatrix::from_ints(&[&[1, 1]]).solve(&v(&[2])).unwrap();
        assert_eq!(&x[0] + &x[1], int(2));
        assert_eq!(QMatrix::from_ints(&[&[1], &[1]]).solve(&v(&[1, 2])), None);
    }

    #[test]
    fn primitive_scaling() {
        let x = QVector::new(vec![rat(-1, 2), rat(1, 4)]);
        assert_eq!(x.primitive(), v(&[-2, 1]));
        assert_eq!(v(&[0, -6, 9]).primitive(), v(&[0, -2, 3]));
    }

    #[test]
    fn determinant_and_inverse() {
        let m = QMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.determinant(), int(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert!(QMatrix::from_ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn project_out_removes_component() {
        let p = project_out(&v(&[1, 1]), &[v(&[1, 0])]);
        assert_eq!(p, v(&[0, 1]));
    }

    #[test]
    fn vector_json_accepts_strings_and_integers() {
        let x: QVector = serde_json::from_str(r#"["2/4", 3, "-1"]"#).unwrap();
        assert_eq!(x, QVector::new(vec![rat(1, 2), int(3), int(-1)]));
        assert_eq!(serde_json::to_string(&x).unwrap(), r#"["1/2","3","-1"]"#);
    }
}
