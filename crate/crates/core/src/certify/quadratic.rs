//! Exact sign test for a quadratic form on a polyhedral cone.

use num_traits::{Signed, Zero};

use crate::cone::{strict_region_point, PolyCone};
use crate::linalg::{QMatrix, QVector, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadVerdict {
    /// `uᵀQu < 0` for every nonzero `u` in the cone.
    Negative,
    /// A nonzero `u` in the cone with `uᵀQu ≥ 0`.
    Witness(QVector),
    /// The cone has more rays than the enumeration cap.
    TooLarge,
}

/// Some `x ≠ 0` with `xᵀAx ≥ 0`, or `None` if `A` is negative definite.
/// Symmetric Gaussian elimination: a nonnegative pivot gives a witness
/// directly, otherwise the pivot is eliminated and the witness of the Schur
/// complement is extended.
fn nonnegative_direction(a: &QMatrix) -> Option<QVector> {
    let k = a.nrows();
    if k == 0 {
        return None;
    }
    let a00 = a.get(0, 0).clone();
    if !a00.is_negative() {
        return Some(QVector::unit(k, 0));
    }
    let col = QVector::new((1..k).map(|i| a.get(i, 0).clone()).collect());
    let schur = QMatrix::from_rows(
        (1..k)
            .map(|i| {
                QVector::new(
                    (1..k)
                        .map(|j| a.get(i, j) - a.get(i, 0) * a.get(0, j) / &a00)
                        .collect(),
                )
            })
            .collect(),
        k - 1,
    );
    let tail = nonnegative_direction(&schur)?;
    let x0 = -(col.dot(&tail)) / &a00;
    Some(QVector::new(vec![x0]).concat(&tail))
}

fn columns(vs: &[QVector], dim: usize) -> QMatrix {
    QMatrix::from_rows(vs.to_vec(), dim).transpose()
}

/// Decides whether `uᵀQu < 0` for all nonzero `u` in `cone`.
///
/// Writing `u = Lα + Rλ` with `L` the lineality basis and `R` the rays, the
/// form must be negative definite on `span(L)`. Maximizing over `α` then
/// leaves `λᵀSλ` with `S` a Schur complement, and the question becomes
/// whether the maximum of `λᵀSλ` over the standard simplex is negative. That
/// maximum sits at a stationary point in the relative interior of some face
/// of the simplex, where `S_J x = μ·1` and the value is `μ`.
pub fn strictly_negative_on_cone(q: &QMatrix, cone: &PolyCone, cap: usize) -> QuadVerdict {
    if cone.is_trivial() {
        return QuadVerdict::Negative;
    }
    let dim = cone.dim();
    let lin = cone.lin();
    let rays = cone.rays();
    let lmat = columns(lin, dim);
    let lql = lmat.transpose().mul(q).mul(&lmat);
    if !lin.is_empty() {
        if let Some(x) = nonnegative_direction(&lql) {
            return QuadVerdict::Witness(lmat.mul_vec(&x));
        }
    }
    if rays.is_empty() {
        return QuadVerdict::Negative;
    }
    if rays.len() > cap {
        return QuadVerdict::TooLarge;
    }
    let rmat = columns(rays, dim);
    let rqr = rmat.transpose().mul(q).mul(&rmat);
    // α*(λ) = −(LᵀQL)⁻¹ LᵀQR λ maximizes over the lineality part.
    let (s, shift) = if lin.is_empty() {
        (rqr, None)
    } else {
        let lqr = lmat.transpose().mul(q).mul(&rmat);
        let inv = lql.inverse().expect("negative definite");
        let shift = inv.mul(&lqr).scale(&Rational::from_integer((-1).into()));
        let s = rqr.add(&lqr.transpose().mul(&shift));
        (s, Some(shift))
    };
    let r = rays.len();
    for mask in 1u32..(1u32 << r) {
        let support: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
        let k = support.len();
        // Unknowns (x_J, μ): rows S_J x − μ = 0, with x > 0.
        let eqs: Vec<QVector> = support
            .iter()
            .map(|&i| {
                let mut row: Vec<Rational> = support.iter().map(|&j| s.get(i, j).clone()).collect();
                row.push(Rational::from_integer((-1).into()));
                QVector::new(row)
            })
            .collect();
        let closed = PolyCone::ineqs_unchecked(k + 1, &[], &eqs);
        let positive: Vec<QVector> = (0..k).map(|i| QVector::unit(k + 1, i)).collect();
        let Some(p) = strict_region_point(&closed, &positive) else {
            continue;
        };
        let total = (0..k).fold(Rational::zero(), |acc, i| acc + &p[i]);
        let value = &p[k] / &total;
        if value.is_negative() {
            continue;
        }
        let mut lambda = QVector::zeros(r);
        let mut entries = lambda.clone().into_entries();
        for (pos, &i) in support.iter().enumerate() {
            entries[i] = &p[pos] / &total;
        }
        lambda = QVector::new(entries);
        let mut u = rmat.mul_vec(&lambda);
        if let Some(shift) = &shift {
            u = u.add(&lmat.mul_vec(&shift.mul_vec(&lambda)));
        }
        return QuadVerdict::Witness(u.primitive());
    }
    QuadVerdict::Negative
}
