//! Polyhedral convex cones kept in both H- and V-representation.
//!
//! A [`PolyCone`] is always canonical: equal sets have equal fields, so
//! `==`, hashing and ordering are set operations.
//!
//! Canonical form, for a cone `C` with lineality space `L`:
//! - `lin`: reduced row-echelon basis of `L`, rows scaled to primitive integers;
//! - `rays`: extreme rays of `C ∩ L^⊥` as primitive integer vectors, sorted;
//! - `eqs`: the same canonical basis, for `span(C)^⊥`;
//! - `ineqs`: facet normals projected into `span(C)`, primitive and sorted.
//!
//! With this layout the polar cone is a field swap.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orth_complement, project_out, span_basis, QMatrix, QVector, Rational};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyCone {
    dim: usize,
    ineqs: Vec<QVector>,
    eqs: Vec<QVector>,
    rays: Vec<QVector>,
    lin: Vec<QVector>,
}

/// Index set of the canonical inequalities that hold with equality on a face.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaceId {
    pub active_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub id: FaceId,
    pub cone: PolyCone,
    /// Element of the polar cone exposing this face: sum of the active normals.
    pub witness: QVector,
}

fn check_dims(dim: usize, vs: &[QVector], what: &str) -> Result<()> {
    match vs.iter().find(|v| v.dim() != dim) {
        Some(v) => Err(Error::Dimension(format!(
            "{what} {v} has length {} but the cone lives in R^{dim}",
            v.dim()
        ))),
        None => Ok(()),
    }
}

/// Double description: generators of `{z : ineqs·z ≤ 0, eqs·z = 0}`.
/// Returned rays are extreme modulo the returned lineality basis.
fn double_description(
    dim: usize,
    ineqs: &[QVector],
    eqs: &[QVector],
) -> (Vec<QVector>, Vec<QVector>) {
    let mut lin: Vec<QVector> = (0..dim).map(|i| QVector::unit(dim, i)).collect();

    for e in eqs {
        if let Some(k) = lin.iter().position(|l| !e.dot(l).is_zero()) {
            let l0 = lin.swap_remove(k);
            let d0 = e.dot(&l0);
            for l in lin.iter_mut() {
                let c = e.dot(l) / &d0;
                if !c.is_zero() {
                    *l = l.axpy(&-c, &l0).primitive();
                }
            }
        }
    }

    let mut rows: Vec<QVector> = eqs.to_vec();
    let mut rays: Vec<QVector> = Vec::new();

    for a in ineqs {
        if let Some(k) = lin.iter().position(|l| !a.dot(l).is_zero()) {
            let mut l0 = lin.swap_remove(k);
            if a.dot(&l0).is_positive() {
                l0 = l0.neg();
            }
            let d0 = a.dot(&l0);
            for v in lin.iter_mut().chain(rays.iter_mut()) {
                let c = a.dot(v) / &d0;
                if !c.is_zero() {
                    *v = v.axpy(&-c, &l0).primitive();
                }
            }
            rays.push(l0.primitive());
            rows.push(a.clone());
            continue;
        }

        let vals: Vec<Rational> = rays.iter().map(|r| a.dot(r)).collect();
        let target_rank = dim.saturating_sub(lin.len() + 2);
        let mut next: Vec<QVector> = Vec::new();
        for (r, v) in rays.iter().zip(&vals) {
            if !v.is_positive() {
                next.push(r.clone());
            }
        }
        for (i, p) in rays.iter().enumerate() {
            if !vals[i].is_positive() {
                continue;
            }
            for (j, n) in rays.iter().enumerate() {
                if !vals[j].is_negative() {
                    continue;
                }
                let common: Vec<QVector> = rows
                    .iter()
                    .filter(|row| row.dot(p).is_zero() && row.dot(n).is_zero())
                    .cloned()
                    .collect();
                if QMatrix::from_rows(common, dim).rank() < target_rank {
                    continue;
                }
                let combo = n.scale(&vals[i]).axpy(&-vals[j].clone(), p);
                if !combo.is_zero() {
                    next.push(combo.primitive());
                }
            }
        }
        dedup(&mut next);
        rays = next;
        rows.push(a.clone());
    }
    (rays, lin)
}

fn dedup(vs: &mut Vec<QVector>) {
    vs.sort();
    vs.dedup();
}

/// Canonical generators (rays, lin) of `{z : ineqs·z ≤ 0, eqs·z = 0}`.
fn canonical_generators(
    dim: usize,
    ineqs: &[QVector],
    eqs: &[QVector],
) -> (Vec<QVector>, Vec<QVector>) {
    let (raw_rays, raw_lin) = double_description(dim, ineqs, eqs);
    let lin = span_basis(dim, &raw_lin);
    let target_rank = dim.saturating_sub(lin.len() + 1);
    let mut rays: Vec<QVector> = raw_rays
        .iter()
        .map(|r| project_out(r, &lin).primitive())
        .filter(|r| !r.is_zero())
        .filter(|r| {
            let tight: Vec<QVector> = ineqs
                .iter()
                .chain(eqs)
                .filter(|a| a.dot(r).is_zero())
                .cloned()
                .collect();
            QMatrix::from_rows(tight, dim).rank() >= target_rank
        })
        .collect();
    dedup(&mut rays);
    (rays, lin)
}

impl PolyCone {
    /// `{z : ineqs·z ≤ 0, eqs·z = 0}`.
    pub fn from_ineqs(dim: usize, ineqs: &[QVector], eqs: &[QVector]) -> Result<Self> {
        check_dims(dim, ineqs, "inequality row")?;
        check_dims(dim, eqs, "equation row")?;
        let (rays, lin) = canonical_generators(dim, ineqs, eqs);
        let (facets, eqs) = canonical_generators(dim, &rays, &lin);
        Ok(PolyCone { dim, ineqs: facets, eqs, rays, lin })
    }

    /// `cone(rays) + span(lin)`.
    pub fn from_generators(dim: usize, rays: &[QVector], lin: &[QVector]) -> Result<Self> {
        check_dims(dim, rays, "ray")?;
        check_dims(dim, lin, "lineality vector")?;
        let (facets, eqs) = canonical_generators(dim, rays, lin);
        let (rays, lin) = canonical_generators(dim, &facets, &eqs);
        Ok(PolyCone { dim, ineqs: facets, eqs, rays, lin })
    }

    pub(crate) fn ineqs_unchecked(dim: usize, ineqs: &[QVector], eqs: &[QVector]) -> Self {
        Self::from_ineqs(dim, ineqs, eqs).expect("rows built with matching dimension")
    }

    pub(crate) fn gens_unchecked(dim: usize, rays: &[QVector], lin: &[QVector]) -> Self {
        Self::from_generators(dim, rays, lin).expect("generators built with matching dimension")
    }

    pub fn trivial(dim: usize) -> Self {
        Self::gens_unchecked(dim, &[], &[])
    }

    pub fn whole_space(dim: usize) -> Self {
        Self::ineqs_unchecked(dim, &[], &[])
    }

    pub fn nonneg_orthant(dim: usize) -> Self {
        let rays: Vec<QVector> = (0..dim).map(|i| QVector::unit(dim, i)).collect();
        Self::gens_unchecked(dim, &rays, &[])
    }

    /// The subspace spanned by `vectors`.
    pub fn subspace(dim: usize, vectors: &[QVector]) -> Result<Self> {
        Self::from_generators(dim, &[], vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineqs(&self) -> &[QVector] {
        &self.ineqs
    }

    pub fn eqs(&self) -> &[QVector] {
        &self.eqs
    }

    pub fn rays(&self) -> &[QVector] {
        &self.rays
    }

    pub fn lin(&self) -> &[QVector] {
        &self.lin
    }

    pub fn ineq_matrix(&self) -> QMatrix {
        QMatrix::from_rows(self.ineqs.clone(), self.dim)
    }

    pub fn eq_matrix(&self) -> QMatrix {
        QMatrix::from_rows(self.eqs.clone(), self.dim)
    }

    /// Dimension of the linear hull.
    pub fn span_dim(&self) -> usize {
        self.dim - self.eqs.len()
    }

    pub fn lineality_dim(&self) -> usize {
        self.lin.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lin.is_empty()
    }

    pub fn is_subspace(&self) -> bool {
        self.rays.is_empty()
    }

    /// Every generator direction, with lineality vectors listed in both signs.
    pub fn all_generators(&self) -> Vec<QVector> {
        let mut gens = self.rays.clone();
        for l in &self.lin {
            gens.push(l.clone());
            gens.push(l.neg());
        }
        gens
    }

    pub fn polar(&self) -> PolyCone {
        PolyCone {
            dim: self.dim,
            ineqs: self.rays.clone(),
            eqs: self.lin.clone(),
            rays: self.ineqs.clone(),
            lin: self.eqs.clone(),
        }
    }

    pub fn contains(&self, z: &QVector) -> bool {
        z.dim() == self.dim
            && self.ineqs.iter().all(|a| !a.dot(z).is_positive())
            && self.eqs.iter().all(|e| e.dot(z).is_zero())
    }

    pub fn is_trivial(&self) -> bool {
        self.rays.is_empty() && self.lin.is_empty()
    }

    pub fn is_whole_space(&self) -> bool {
        self.ineqs.is_empty() && self.eqs.is_empty()
    }

    pub fn subcone_of(&self, other: &PolyCone) -> bool {
        self.dim == other.dim && self.all_generators().iter().all(|g| other.contains(g))
    }

    /// A point in the relative interior: the sum of the extreme rays.
    /// The flag is `false` exactly for the trivial cone, where `0` is returned.
    pub fn rel_interior_point(&self) -> (QVector, bool) {
        let p = QVector::sum(self.dim, &self.rays);
        (p, !self.is_trivial())
    }

    /// Whether `z` lies in the relative interior.
    pub fn in_rel_interior(&self, z: &QVector) -> bool {
        self.dim == z.dim()
            && self.eqs.iter().all(|e| e.dot(z).is_zero())
            && self.ineqs.iter().all(|a| a.dot(z).is_negative())
    }

    pub fn intersect(&self, other: &PolyCone) -> PolyCone {
        assert_eq!(self.dim, other.dim, "intersect: dimension mismatch");
        let ineqs = [self.ineqs.clone(), other.ineqs.clone()].concat();
        let eqs = [self.eqs.clone(), other.eqs.clone()].concat();
        Self::ineqs_unchecked(self.dim, &ineqs, &eqs)
    }

    pub fn minkowski_sum(&self, other: &PolyCone) -> PolyCone {
        assert_eq!(self.dim, other.dim, "minkowski_sum: dimension mismatch");
        let rays = [self.rays.clone(), other.rays.clone()].concat();
        let lin = [self.lin.clone(), other.lin.clone()].concat();
        Self::gens_unchecked(self.dim, &rays, &lin)
    }

    /// Intersection with extra inequality and equation rows.
    pub fn with_constraints(&self, ineqs: &[QVector], eqs: &[QVector]) -> PolyCone {
        let all_ineqs = [self.ineqs.clone(), ineqs.to_vec()].concat();
        let all_eqs = [self.eqs.clone(), eqs.to_vec()].concat();
        Self::ineqs_unchecked(self.dim, &all_ineqs, &all_eqs)
    }

    /// `C ∩ [z]^⊥`
    pub fn orth_slice(&self, z: &QVector) -> PolyCone {
        self.with_constraints(&[], std::slice::from_ref(z))
    }

    pub fn neg(&self) -> PolyCone {
        let rays: Vec<QVector> = self.rays.iter().map(QVector::neg).collect();
        Self::gens_unchecked(self.dim, &rays, &self.lin)
    }

    /// `C + span(z)`
    pub fn plus_line(&self, z: &QVector) -> PolyCone {
        let lin = [self.lin.clone(), vec![z.clone()]].concat();
        Self::gens_unchecked(self.dim, &self.rays, &lin)
    }

    /// Image under a linear map.
    pub fn image(&self, m: &QMatrix) -> PolyCone {
        assert_eq!(m.ncols(), self.dim);
        let rays: Vec<QVector> = self.rays.iter().map(|r| m.mul_vec(r)).collect();
        let lin: Vec<QVector> = self.lin.iter().map(|l| m.mul_vec(l)).collect();
        Self::gens_unchecked(m.nrows(), &rays, &lin)
    }

    /// Preimage `{x : m·x ∈ C}`.
    pub fn preimage(&self, m: &QMatrix) -> PolyCone {
        assert_eq!(m.nrows(), self.dim);
        let mt = m.transpose();
        let ineqs: Vec<QVector> = self.ineqs.iter().map(|a| mt.mul_vec(a)).collect();
        let eqs: Vec<QVector> = self.eqs.iter().map(|e| mt.mul_vec(e)).collect();
        Self::ineqs_unchecked(m.ncols(), &ineqs, &eqs)
    }

    /// Canonical indices of the inequalities tight at `z`.
    pub fn active_set(&self, z: &QVector) -> Vec<usize> {
        (0..self.ineqs.len())
            .filter(|&i| self.ineqs[i].dot(z).is_zero())
            .collect()
    }

    /// All closed faces, from the lineality space up to the cone itself,
    /// ordered by dimension and then canonically.
    pub fn faces(&self) -> Vec<Face> {
        let tight: Vec<BTreeSet<usize>> = self
            .ineqs
            .iter()
            .map(|a| {
                (0..self.rays.len())
                    .filter(|&j| a.dot(&self.rays[j]).is_zero())
                    .collect()
            })
            .collect();
        let full: BTreeSet<usize> = (0..self.rays.len()).collect();
        let mut seen: HashSet<BTreeSet<usize>> = HashSet::from([full.clone()]);
        let mut queue = VecDeque::from([full]);
        let mut faces = Vec::new();
        while let Some(set) = queue.pop_front() {
            for t in &tight {
                let next: BTreeSet<usize> = set.intersection(t).copied().collect();
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
            let active: Vec<usize> = (0..self.ineqs.len())
                .filter(|&i| tight[i].is_superset(&set))
                .collect();
            let rays: Vec<QVector> = set.iter().map(|&j| self.rays[j].clone()).collect();
            let witness = QVector::sum(self.dim, active.iter().map(|&i| &self.ineqs[i]));
            faces.push(Face {
                id: FaceId { active_set: active },
                cone: Self::gens_unchecked(self.dim, &rays, &self.lin),
                witness,
            });
        }
        faces.sort_by(|a, b| {
            (a.cone.span_dim(), &a.cone).cmp(&(b.cone.span_dim(), &b.cone))
        });
        faces
    }

    /// The smallest face containing `z`, which must lie in the cone.
    pub fn minimal_face(&self, z: &QVector) -> PolyCone {
        let active: Vec<QVector> = self
            .active_set(z)
            .into_iter()
            .map(|i| self.ineqs[i].clone())
            .collect();
        self.with_constraints(&[], &active)
    }

    /// Whether every generator is orthogonal to `z`.
    pub fn orthogonal_to(&self, z: &QVector) -> bool {
        self.rays.iter().chain(&self.lin).all(|g| g.dot(z).is_zero())
    }
}

/// `F1 − F2` for nested faces `F2 ⊆ F1`.
pub fn face_difference(f1: &PolyCone, f2: &PolyCone) -> Result<PolyCone> {
    if !f2.subcone_of(f1) {
        return Err(Error::NotNested);
    }
    let rays: Vec<QVector> = f1
        .rays
        .iter()
        .cloned()
        .chain(f2.rays.iter().map(QVector::neg))
        .collect();
    let lin = [f1.lin.clone(), f2.lin.clone()].concat();
    PolyCone::from_generators(f1.dim, &rays, &lin)
}

/// Fourier–Motzkin projection of `{z : ineqs·z ≤ 0, eqs·z = 0}` onto the
/// coordinates listed in `keep` (in that order).
pub fn project(dim: usize, ineqs: &[QVector], eqs: &[QVector], keep: &[usize]) -> PolyCone {
    let mut ineqs: Vec<QVector> = ineqs.to_vec();
    let mut eqs: Vec<QVector> = eqs.to_vec();
    for j in (0..dim).filter(|j| !keep.contains(j)) {
        if let Some(k) = eqs.iter().position(|e| !e[j].is_zero()) {
            let pivot = eqs.swap_remove(k);
            let eliminate = |row: &QVector| {
                if row[j].is_zero() {
                    row.clone()
                } else {
                    row.axpy(&-(&row[j] / &pivot[j]), &pivot).primitive()
                }
            };
            ineqs = ineqs.iter().map(eliminate).collect();
            eqs = eqs.iter().map(eliminate).collect();
        } else {
            let mut next = Vec::new();
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for row in ineqs {
                if row[j].is_positive() {
                    pos.push(row);
                } else if row[j].is_negative() {
                    neg.push(row);
                } else {
                    next.push(row);
                }
            }
            for p in &pos {
                for n in &neg {
                    next.push(n.scale(&p[j]).axpy(&-n[j].clone(), p).primitive());
                }
            }
            ineqs = next;
        }
        ineqs.retain(|r| !r.is_zero());
        eqs.retain(|r| !r.is_zero());
        dedup(&mut ineqs);
        dedup(&mut eqs);
    }
    let restrict = |r: &QVector| QVector::new(keep.iter().map(|&j| r[j].clone()).collect());
    let ineqs: Vec<QVector> = ineqs.iter().map(restrict).collect();
    let eqs: Vec<QVector> = eqs.iter().map(restrict).collect();
    PolyCone::ineqs_unchecked(keep.len(), &ineqs, &eqs)
}

/// Projection of a cone onto a subset of coordinates, computed by
/// Fourier–Motzkin elimination on its H-representation.
pub fn project_cone(c: &PolyCone, keep: &[usize]) -> PolyCone {
    project(c.dim, &c.ineqs, &c.eqs, keep)
}

/// A point of `closed ∩ {z : h·z > 0 for every h in strict}`, if any.
///
/// The relative interior point of `closed ∩ {h·z ≥ 0}` works whenever the
/// open set is nonempty: a strict constraint that vanishes there vanishes on
/// the whole closed set.
pub fn strict_region_point(closed: &PolyCone, strict: &[QVector]) -> Option<QVector> {
    let negated: Vec<QVector> = strict.iter().map(QVector::neg).collect();
    let q = closed.with_constraints(&negated, &[]);
    let (p, _) = q.rel_interior_point();
    strict.iter().all(|h| h.dot(&p).is_positive()).then_some(p)
}

/// Strict constraint lists `h` whose open regions `{h·z > 0}` cover the
/// complement of `c`.
pub fn complement_splits(c: &PolyCone) -> Vec<QVector> {
    let mut hs: Vec<QVector> = c.ineqs.clone();
    for e in &c.eqs {
        hs.push(e.clone());
        hs.push(e.neg());
    }
    hs
}

/// A point of `R^dim` outside every piece, if the pieces do not cover.
pub fn uncovered_point(dim: usize, pieces: &[PolyCone]) -> Option<QVector> {
    let whole = PolyCone::whole_space(dim);
    // Open regions of the uncovered part, each a list of strict constraints.
    let mut regions: Vec<Vec<QVector>> = vec![Vec::new()];
    for piece in pieces {
        let mut next = Vec::new();
        for region in &regions {
            for h in complement_splits(piece) {
                let mut r = region.clone();
                r.push(h);
                if strict_region_point(&whole, &r).is_some() {
                    next.push(r);
                }
            }
        }
        regions = next;
        if regions.is_empty() {
            return None;
        }
    }
    regions.first().and_then(|r| strict_region_point(&whole, r))
}

/// Whether the union of `pieces` is all of `R^dim`.
pub fn union_covers_space(dim: usize, pieces: &[PolyCone]) -> bool {
    uncovered_point(dim, pieces).is_none()
}

impl fmt::Display for PolyCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "{{0}}");
        }
        if self.is_whole_space() {
            return write!(f, "R^{}", self.dim);
        }
        let list = |vs: &[QVector]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
        let mut parts = Vec::new();
        if !self.rays.is_empty() {
            parts.push(format!("cone{{{}}}", list(&self.rays)));
        }
        if !self.lin.is_empty() {
            parts.push(format!("span{{{}}}", list(&self.lin)));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for PolyCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyCone({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct ConeRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ineqs: Option<Vec<QVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eqs: Option<Vec<QVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rays: Option<Vec<QVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lin: Option<Vec<QVector>>,
}

impl Serialize for PolyCone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConeRepr {
            dim: Some(self.dim),
            ineqs: Some(self.ineqs.clone()),
            eqs: Some(self.eqs.clone()),
            rays: Some(self.rays.clone()),
            lin: Some(self.lin.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyCone {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ConeRepr::deserialize(d)?;
        let dim = r
            .dim
            .or_else(|| {
                [&r.ineqs, &r.eqs, &r.rays, &r.lin]
                    .into_iter()
                    .flatten()
                    .flatten()
                    .map(QVector::dim)
                    .next()
            })
            .ok_or_else(|| D::Error::custom("cannot infer cone dimension; add `dim`"))?;
        let has_h = r.ineqs.is_some() || r.eqs.is_some();
        let has_v = r.rays.is_some() || r.lin.is_some();
        let h = has_h
            .then(|| {
                PolyCone::from_ineqs(
                    dim,
                    r.ineqs.as_deref().unwrap_or_default(),
                    r.eqs.as_deref().unwrap_or_default(),
                )
            })
            .transpose()
            .map_err(D::Error::custom)?;
        let v = has_v
            .then(|| {
                PolyCone::from_generators(
                    dim,
                    r.rays.as_deref().unwrap_or_default(),
                    r.lin.as_deref().unwrap_or_default(),
                )
            })
            .transpose()
            .map_err(D::Error::custom)?;
        match (h, v) {
            (Some(h), Some(v)) if h != v => Err(D::Error::custom(format!(
                "cone representations disagree: inequalities give {h}, generators give {v}"
            ))),
            (Some(c), _) | (None, Some(c)) => Ok(c),
            (None, None) => Ok(PolyCone::whole_space(dim)),
        }
    }
}

/// Basis of `span(C)^⊥`, exposed for callers composing equations.
pub fn span_complement(c: &PolyCone) -> Vec<QVector> {
    orth_complement(c.dim, &c.all_generators())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn v(xs: &[i64]) -> QVector {
        QVector::from_ints(xs)
    }

    fn example5_gamma() -> PolyCone {
        let a = QVector::new(vec![rat(1, 2), rat(-1, 1)]);
        let b = QVector::new(vec![rat(1, 2), rat(1, 1)]);
        PolyCone::from_ineqs(2, &[a, b], &[]).unwrap()
    }

    #[test]
    fn orthant_from_ineqs() {
        let c = PolyCone::from_ineqs(2, &[v(&[-1, 0]), v(&[0, -1])], &[]).unwrap();
        assert_eq!(c.rays(), &[v(&[0, 1]), v(&[1, 0])]);
        assert!(c.lin().is_empty());
        assert_eq!(c, PolyCone::nonneg_orthant(2));
    }

    #[test]
    fn example5_gamma_generators() {
        let c = example5_gamma();
        assert_eq!(c.rays(), &[v(&[-2, -1]), v(&[-2, 1])]);
        assert!(c.lin().is_empty());
    }

    #[test]
    fn no_constraints_is_whole_space() {
        let c = PolyCone::from_ineqs(2, &[], &[]).unwrap();
        assert!(c.rays().is_empty());
        assert_eq!(c.lin().len(), 2);
        assert!(c.is_whole_space());
    }

    #[test]
    fn opposite_rays_become_a_line() {
        let c = PolyCone::from_generators(2, &[v(&[1, 0]), v(&[-1, 0])], &[]).unwrap();
        assert!(c.rays().is_empty());
        assert_eq!(c.lin(), &[v(&[1, 0])]);
    }

    #[test]
    fn halfline_from_generators() {
        let f2 = PolyCone::from_generators(2, &[QVector::new(vec![rat(-1, 1), rat(1, 2)])], &[])
            .unwrap();
        assert_eq!(f2.rays(), &[v(&[-2, 1])]);
        assert_eq!(f2.eqs().len(), 1);
        assert!(PolyCone::from_generators(2, &[], &[]).unwrap().is_trivial());
    }

    #[test]
    fn polar_cases() {
        let orth = PolyCone::nonneg_orthant(2);
        assert_eq!(orth.polar(), orth.neg());
        // Polar of cone{(-1,1/2),(-1,-1/2)} by brute force: (x,y) with
        // -x + y/2 <= 0 and -x - y/2 <= 0, whose extreme rays are (1,2), (1,-2).
        let k = example5_gamma();
        let expected = PolyCone::from_generators(2, &[v(&[1, 2]), v(&[1, -2])], &[]).unwrap();
        assert_eq!(k.polar(), expected);
        assert_eq!(PolyCone::trivial(2).polar(), PolyCone::whole_space(2));
    }

    #[test]
    fn intersection_and_sum() {
        let pos = PolyCone::nonneg_orthant(2);
        assert!(pos.intersect(&pos.neg()).is_trivial());
        let f2 = PolyCone::from_generators(2, &[v(&[-2, 1])], &[]).unwrap();
        let f3 = PolyCone::from_generators(2, &[v(&[-2, -1])], &[]).unwrap();
        assert_eq!(f2.minkowski_sum(&f3), example5_gamma());
        let e1 = PolyCone::from_generators(2, &[v(&[1, 0])], &[]).unwrap();
        let d = PolyCone::from_generators(2, &[v(&[-1, 1])], &[]).unwrap();
        assert!(e1.intersect(&d).is_trivial());
    }

    #[test]
    fn faces_of_example5_cone() {
        let faces = example5_gamma().faces();
        assert_eq!(faces.len(), 4);
        let cones: Vec<String> = faces.iter().map(|f| f.cone.to_string()).collect();
        assert_eq!(
            cones,
            vec!["{0}", "cone{(-2, 1)}", "cone{(-2, -1)}", "cone{(-2, -1), (-2, 1)}"]
        );
        for f in &faces {
            let k = example5_gamma();
            assert!(k.polar().contains(&f.witness));
            assert_eq!(k.orth_slice(&f.witness), f.cone);
        }
    }

    #[test]
    fn faces_of_orthant_and_line() {
        assert_eq!(PolyCone::nonneg_orthant(2).faces().len(), 4);
        let line = PolyCone::subspace(2, &[v(&[1, 0])]).unwrap();
        let faces = line.faces();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].cone, line);
    }

    #[test]
    fn face_differences() {
        let f2 = PolyCone::from_generators(2, &[v(&[-2, 1])], &[]).unwrap();
        let d = face_difference(&f2, &f2).unwrap();
        assert_eq!(d, PolyCone::subspace(2, &[v(&[-2, 1])]).unwrap());
        let f4 = example5_gamma();
        let k4 = face_difference(&f4, &f2).unwrap();
        let half = PolyCone::from_ineqs(2, &[QVector::new(vec![rat(1, 2), rat(1, 1)])], &[]).unwrap();
        assert_eq!(k4, half);
        let zero = PolyCone::trivial(2);
        assert!(face_difference(&zero, &zero).unwrap().is_trivial());
        assert!(matches!(face_difference(&f2, &f4), Err(Error::NotNested)));
    }

    #[test]
    fn membership_and_interior() {
        assert!(PolyCone::nonneg_orthant(2).contains(&v(&[1, 1])));
        let f2 = PolyCone::from_generators(2, &[QVector::new(vec![rat(-1, 1), rat(1, 2)])], &[])
            .unwrap();
        let (p, nontrivial) = f2.rel_interior_point();
        assert!(nontrivial);
        assert_eq!(p, v(&[-2, 1]));
        let (z, flag) = PolyCone::trivial(3).rel_interior_point();
        assert!(z.is_zero() && !flag);
    }

    #[test]
    fn fm_projection_matches_generator_image() {
        // {(x,y,z): x <= z, y <= -z, z >= 0} projected onto (x,y).
        let ineqs = [v(&[1, 0, -1]), v(&[0, 1, 1]), v(&[0, 0, -1])];
        let c = PolyCone::from_ineqs(3, &ineqs, &[]).unwrap();
        let fm = project_cone(&c, &[0, 1]);
        let drop = QMatrix::from_ints(&[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(fm, c.image(&drop));
    }

    #[test]
    fn union_cover() {
        let h1 = PolyCone::from_ineqs(1, &[v(&[1])], &[]).unwrap();
        let h2 = PolyCone::from_ineqs(1, &[v(&[-1])], &[]).unwrap();
        assert!(union_covers_space(1, &[h1.clone(), h2]));
        assert!(!union_covers_space(1, &[h1]));
        let quadrants: Vec<PolyCone> = [[1, 1], [1, -1], [-1, 1], [-1, -1]]
            .iter()
            .map(|s| PolyCone::from_ineqs(2, &[v(&[-s[0], 0]), v(&[0, -s[1]])], &[]).unwrap())
            .collect();
        assert!(union_covers_space(2, &quadrants));
        assert!(!union_covers_space(2, &quadrants[..3]));
        assert!(union_covers_space(0, &[PolyCone::trivial(0)]));
    }

    #[test]
    fn json_round_trip() {
        let k = example5_gamma();
        let s = serde_json::to_string(&k).unwrap();
        let back: PolyCone = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
        let from_rays: PolyCone = serde_json::from_str(r#"{"rays": [["-1","1/2"]]}"#).unwrap();
        assert_eq!(from_rays.rays(), &[v(&[-2, 1])]);
        let bad = serde_json::from_str::<PolyCone>(r#"{"ineqs": [[1,0]], "rays": [[1,0]]}"#);
        assert!(bad.is_err());
    }
}
