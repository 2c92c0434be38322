//! Convex polyhedra, finite unions of them, and their variational cones.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{complement_splits, strict_region_point, FaceId, PolyCone};
use crate::error::{Error, Result};
use crate::linalg::{QVector, Rational};

/// `{y : a_i·y ≤ b_i, e_j·y = f_j}`, nonempty, stored in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polyhedron {
    dim: usize,
    a: Vec<QVector>,
    b: Vec<Rational>,
    e: Vec<QVector>,
    f: Vec<Rational>,
}

fn homogenize(row: &QVector, rhs: &Rational) -> QVector {
    row.concat(&QVector::new(vec![-rhs.clone()]))
}

fn split_homogeneous(row: &QVector, dim: usize) -> (QVector, Rational) {
    (row.slice(0..dim), -row[dim].clone())
}

impl Polyhedron {
    pub fn new(
        dim: usize,
        a: &[QVector],
        b: &[Rational],
        e: &[QVector],
        f: &[Rational],
    ) -> Result<Self> {
        Self::try_new(dim, a, b, e, f)?.ok_or(Error::EmptyPolyhedron)
    }

    /// Like [`Polyhedron::new`] but reports emptiness as `None`.
    pub fn try_new(
        dim: usize,
        a: &[QVector],
        b: &[Rational],
        e: &[QVector],
        f: &[Rational],
    ) -> Result<Option<Self>> {
        if a.len() != b.len() || e.len() != f.len() {
            return Err(Error::Dimension(format!(
                "{} inequality rows with {} right-hand sides, {} equation rows with {} right-hand sides",
                a.len(),
                b.len(),
                e.len(),
                f.len()
            )));
        }
        if let Some(bad) = a.iter().chain(e).find(|r| r.dim() != dim) {
            return Err(Error::Dimension(format!(
                "row {bad} has length {} in a polyhedron of dimension {dim}",
                bad.dim()
            )));
        }
        let mut ineqs: Vec<QVector> = a.iter().zip(b).map(|(r, s)| homogenize(r, s)).collect();
        ineqs.push(QVector::unit(dim + 1, dim).neg());
        let eqs: Vec<QVector> = e.iter().zip(f).map(|(r, s)| homogenize(r, s)).collect();
        let cone = PolyCone::from_ineqs(dim + 1, &ineqs, &eqs)?;
        if cone.rays().iter().all(|r| r[dim].is_zero()) {
            return Ok(None);
        }
        // The facet `t >= 0` is the one whose rays all sit at t = 0.
        let at_infinity = |row: &QVector| {
            cone.rays()
                .iter()
                .filter(|r| row.dot(r).is_zero())
                .all(|r| r[dim].is_zero())
        };
        let (mut pa, mut pb) = (Vec::new(), Vec::new());
        for row in cone.ineqs().iter().filter(|row| !at_infinity(row)) {
            let (r, s) = split_homogeneous(row, dim);
            pa.push(r);
            pb.push(s);
        }
        let (mut pe, mut pf) = (Vec::new(), Vec::new());
        for row in cone.eqs() {
            let (r, s) = split_homogeneous(row, dim);
            pe.push(r);
            pf.push(s);
        }
        Ok(Some(Polyhedron { dim, a: pa, b: pb, e: pe, f: pf }))
    }

    /// A polyhedral cone viewed as a polyhedron.
    pub fn from_cone(c: &PolyCone) -> Self {
        let zero = vec![Rational::zero(); c.ineqs().len()];
        let zero_e = vec![Rational::zero(); c.eqs().len()];
        Self::new(c.dim(), c.ineqs(), &zero, c.eqs(), &zero_e).expect("cones contain 0")
    }

    pub fn whole_space(dim: usize) -> Self {
        Self::from_cone(&PolyCone::whole_space(dim))
    }

    /// The single point `{y}`.
    pub fn point(y: &QVector) -> Self {
        let n = y.dim();
        let e: Vec<QVector> = (0..n).map(|i| QVector::unit(n, i)).collect();
        Self::new(n, &[], &[], &e, y.entries()).expect("a point is nonempty")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineq_rows(&self) -> &[QVector] {
        &self.a
    }

    pub fn ineq_rhs(&self) -> &[Rational] {
        &self.b
    }

    pub fn eq_rows(&self) -> &[QVector] {
        &self.e
    }

    pub fn eq_rhs(&self) -> &[Rational] {
        &self.f
    }

    pub fn contains(&self, y: &QVector) -> bool {
        y.dim() == self.dim
            && self.a.iter().zip(&self.b).all(|(r, s)| &r.dot(y) <= s)
            && self.e.iter().zip(&self.f).all(|(r, s)| &r.dot(y) == s)
    }

    /// Inequality rows that are violated at `y`, with their index.
    pub fn violations(&self, y: &QVector) -> Vec<String> {
        let mut out = Vec::new();
        for (i, (r, s)) in self.a.iter().zip(&self.b).enumerate() {
            let val = r.dot(y);
            if &val > s {
                out.push(format!("inequality {i}: {r}·y = {val} > {s}"));
            }
        }
        for (i, (r, s)) in self.e.iter().zip(&self.f).enumerate() {
            let val = r.dot(y);
            if &val != s {
                out.push(format!("equation {i}: {r}·y = {val} ≠ {s}"));
            }
        }
        out
    }

    pub fn active_rows(&self, y: &QVector) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| self.a[i].dot(y) == self.b[i]).collect()
    }

    /// Whether the polyhedron is a cone with apex at the origin.
    pub fn is_cone(&self) -> bool {
        self.b.iter().chain(&self.f).all(Zero::is_zero)
    }

    /// The polyhedron as a cone; requires all right-hand sides to be zero.
    pub fn as_cone(&self) -> Option<PolyCone> {
        self.is_cone()
            .then(|| PolyCone::ineqs_unchecked(self.dim, &self.a, &self.e))
    }

    /// A point in the relative interior.
    pub fn rel_interior_point(&self) -> QVector {
        let mut ineqs: Vec<QVector> = self.a.iter().zip(&self.b).map(|(r, s)| homogenize(r, s)).collect();
        ineqs.push(QVector::unit(self.dim + 1, self.dim).neg());
        let eqs: Vec<QVector> = self.e.iter().zip(&self.f).map(|(r, s)| homogenize(r, s)).collect();
        let cone = PolyCone::ineqs_unchecked(self.dim + 1, &ineqs, &eqs);
        let (p, _) = cone.rel_interior_point();
        let t = p[self.dim].clone();
        p.slice(0..self.dim).scale(&(Rational::one() / t))
    }

    fn require_member(&self, y: &QVector) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::NotInSet { point: y.to_string(), set: self.to_string() })
        }
    }

    /// `{y + t·d}` for `t` small stays inside.
    pub fn tangent_cone(&self, y: &QVector) -> Result<PolyCone> {
        self.require_member(y)?;
        let active: Vec<QVector> = self.active_rows(y).into_iter().map(|i| self.a[i].clone()).collect();
        Ok(PolyCone::ineqs_unchecked(self.dim, &active, &self.e))
    }

    pub fn normal_cone(&self, y: &QVector) -> Result<PolyCone> {
        Ok(self.tangent_cone(y)?.polar())
    }

    /// `T(y) ∩ [y*]^⊥`, or `None` when `(y, y*)` is off the graph of the
    /// normal-cone map.
    pub fn critical_cone(&self, y: &QVector, ystar: &QVector) -> Option<PolyCone> {
        let t = self.tangent_cone(y).ok()?;
        if ystar.dim() != self.dim || !t.polar().contains(ystar) {
            return None;
        }
        Some(t.orth_slice(ystar))
    }

    /// The critical cone at a nearby graph point `(y, y*)`, expressed through
    /// the critical cone at the reference pair:
    /// `(K(ȳ,ȳ*) ∩ [y*−ȳ*]^⊥) + [y−ȳ]`.
    pub fn nearby_critical_cone(
        &self,
        ybar: &QVector,
        ybarstar: &QVector,
        y: &QVector,
        ystar: &QVector,
    ) -> Result<Option<PolyCone>> {
        let k = self.critical_cone(ybar, ybarstar).ok_or_else(|| Error::NotInSet {
            point: format!("({ybar}, {ybarstar})"),
            set: "the graph of the normal-cone map".into(),
        })?;
        if self.critical_cone(y, ystar).is_none() {
            return Ok(None);
        }
        Ok(Some(k.orth_slice(&ystar.sub(ybarstar)).plus_line(&y.sub(ybar))))
    }

    /// Restriction to the affine slice where the leading coordinates equal
    /// `prefix`; returns the polyhedron in the remaining coordinates.
    pub fn slice_leading(&self, prefix: &QVector) -> Result<Option<Polyhedron>> {
        let k = prefix.dim();
        let rest = self.dim - k;
        let fix = |rows: &[QVector], rhs: &[Rational]| -> (Vec<QVector>, Vec<Rational>) {
            rows.iter()
                .zip(rhs)
                .map(|(r, s)| (r.slice(k..self.dim), s - r.slice(0..k).dot(prefix)))
                .unzip()
        };
        let (a, b) = fix(&self.a, &self.b);
        let (e, f) = fix(&self.e, &self.f);
        Polyhedron::try_new(rest, &a, &b, &e, &f)
    }
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a.is_empty() && self.e.is_empty() {
            return write!(f, "R^{}", self.dim);
        }
        let mut parts = Vec::new();
        for (r, s) in self.a.iter().zip(&self.b) {
            parts.push(format!("{r}·y <= {s}"));
        }
        for (r, s) in self.e.iter().zip(&self.f) {
            parts.push(format!("{r}·y = {s}"));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polyhedron{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct PolyhedronRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(rename = "A", default)]
    a: Vec<QVector>,
    #[serde(default)]
    b: QVector,
    #[serde(rename = "E", default)]
    e: Vec<QVector>,
    #[serde(rename = "e", default)]
    f: QVector,
}

impl Serialize for Polyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyhedronRepr {
            dim: Some(self.dim),
            a: self.a.clone(),
            b: QVector::new(self.b.clone()),
            e: self.e.clone(),
            f: QVector::new(self.f.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PolyhedronRepr::deserialize(d)?;
        let dim = r
            .dim
            .or_else(|| r.a.iter().chain(&r.e).map(QVector::dim).next())
            .ok_or_else(|| D::Error::custom("cannot infer polyhedron dimension; add `dim`"))?;
        Polyhedron::new(dim, &r.a, r.b.entries(), &r.e, r.f.entries()).map_err(D::Error::custom)
    }
}

/// A finite union of cones, kept irredundant: no piece lies inside another.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConeUnion {
    dim: usize,
    pieces: Vec<PolyCone>,
}

impl ConeUnion {
    pub fn new(dim: usize, pieces: impl IntoIterator<Item = PolyCone>) -> Self {
        let mut all: Vec<PolyCone> = pieces.into_iter().collect();
        all.sort_by(|a, b| (b.span_dim(), b).cmp(&(a.span_dim(), a)));
        all.dedup();
        let mut kept: Vec<PolyCone> = Vec::new();
        for c in all {
            if !kept.iter().any(|k| c.subcone_of(k)) {
                kept.push(c);
            }
        }
        kept.sort();
        ConeUnion { dim, pieces: kept }
    }

    pub fn empty(dim: usize) -> Self {
        ConeUnion { dim, pieces: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[PolyCone] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, z: &QVector) -> bool {
        self.pieces.iter().any(|c| c.contains(z))
    }

    /// Every piece lies inside some piece of `other`.
    pub fn covered_by(&self, other: &ConeUnion) -> bool {
        self.pieces.iter().all(|c| other.pieces.iter().any(|d| c.subcone_of(d)))
    }
}

impl fmt::Display for ConeUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.pieces.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

impl fmt::Debug for ConeUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConeUnion({self})")
    }
}

/// A nonempty finite union of polyhedra of one dimension.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "UnionRepr", into = "UnionRepr")]
pub struct UnionSet {
    pieces: Vec<Polyhedron>,
}

#[derive(Serialize, Deserialize)]
struct UnionRepr {
    pieces: Vec<Polyhedron>,
}

impl TryFrom<UnionRepr> for UnionSet {
    type Error = Error;
    fn try_from(r: UnionRepr) -> Result<Self> {
        UnionSet::new(r.pieces)
    }
}

impl From<UnionSet> for UnionRepr {
    fn from(u: UnionSet) -> Self {
        UnionRepr { pieces: u.pieces }
    }
}

/// One stratum of a union near a reference point, together with the closure
/// of one relatively open region of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// For each piece containing the reference point: its index and either
    /// the face of its tangent cone whose relative interior the stratum
    /// meets, or `None` when the stratum lies outside that piece.
    pub signature: Vec<(usize, Option<FaceId>)>,
    /// Closed cone of directions: closure of the region.
    pub closure: PolyCone,
    /// Regular normal cone at every point of the region.
    pub normal: PolyCone,
}

impl Stratum {
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .signature
            .iter()
            .map(|(i, f)| match f {
                Some(id) => format!("piece {i}: face {:?}", id.active_set),
                None => format!("piece {i}: outside"),
            })
            .collect();
        parts.join("; ")
    }
}

impl UnionSet {
    pub fn new(pieces: Vec<Polyhedron>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidSpec("a union needs at least one piece".into()));
        };
        let dim = first.dim();
        if let Some(bad) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(Error::Dimension(format!(
                "union pieces of dimensions {dim} and {}",
                bad.dim()
            )));
        }
        Ok(UnionSet { pieces })
    }

    pub fn single(p: Polyhedron) -> Self {
        UnionSet { pieces: vec![p] }
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn pieces(&self) -> &[Polyhedron] {
        &self.pieces
    }

    pub fn contains(&self, y: &QVector) -> bool {
        self.pieces.iter().any(|p| p.contains(y))
    }

    pub fn pieces_containing(&self, y: &QVector) -> Vec<usize> {
        (0..self.pieces.len()).filter(|&i| self.pieces[i].contains(y)).collect()
    }

    fn require_member(&self, y: &QVector) -> Result<Vec<usize>> {
        let idx = self.pieces_containing(y);
        if idx.is_empty() {
            let why: Vec<String> = self
                .pieces
                .iter()
                .enumerate()
                .map(|(i, p)| format!("piece {i}: {}", p.violations(y).join(", ")))
                .collect();
            return Err(Error::NotInSet { point: y.to_string(), set: format!("D ({})", why.join("; ")) });
        }
        Ok(idx)
    }

    /// Tangent cones of the pieces through `y`.
    pub fn local_cones(&self, y: &QVector) -> Result<Vec<(usize, PolyCone)>> {
        self.require_member(y)?
            .into_iter()
            .map(|i| Ok((i, self.pieces[i].tangent_cone(y)?)))
            .collect()
    }

    pub fn tangent_cone(&self, y: &QVector) -> Result<ConeUnion> {
        let cones = self.local_cones(y)?;
        Ok(ConeUnion::new(self.dim(), cones.into_iter().map(|(_, c)| c)))
    }

    /// Regular normal cone at a point of the union.
    pub fn regular_normal_cone(&self, y: &QVector) -> Result<PolyCone> {
        let cones = self.local_cones(y)?;
        Ok(cones
            .iter()
            .map(|(_, t)| t.polar())
            .reduce(|a, b| a.intersect(&b))
            .expect("at least one piece"))
    }

    /// Strata of the union near `ybar`, one entry per relatively open
    /// region. Near `ybar` the union minus `ybar` coincides with the union of
    /// the tangent cones of the pieces through `ybar`, and each point of it
    /// has a signature: for every such piece, either "outside" or the
    /// minimal face containing the point. Regular normal cones are constant
    /// on a signature class.
    pub fn direction_strata(&self, ybar: &QVector) -> Result<Vec<Stratum>> {
        let cones = self.local_cones(ybar)?;
        let dim = self.dim();
        let faces: Vec<Vec<crate::cone::Face>> = cones.iter().map(|(_, t)| t.faces()).collect();

        let mut out = Vec::new();
        // choice[i] = 0 means outside, k > 0 means faces[i][k - 1].
        let mut choice = vec![0usize; cones.len()];
        loop {
            if choice.iter().any(|&c| c > 0) {
                self.expand_signature(dim, &cones, &faces, &choice, &mut out);
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(out);
                }
                choice[i] += 1;
                if choice[i] <= faces[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn expand_signature(
        &self,
        dim: usize,
        cones: &[(usize, PolyCone)],
        faces: &[Vec<crate::cone::Face>],
        choice: &[usize],
        out: &mut Vec<Stratum>,
    ) {
        let mut g = PolyCone::whole_space(dim);
        let mut strict: Vec<QVector> = Vec::new();
        let mut normal: Option<PolyCone> = None;
        let mut outside: Vec<&PolyCone> = Vec::new();
        let mut signature = Vec::new();
        for (i, ((piece, t), &c)) in cones.iter().zip(choice).enumerate() {
            if c == 0 {
                outside.push(t);
                signature.push((*piece, None));
                continue;
            }
            let face = &faces[i][c - 1];
            g = g.intersect(&face.cone);
            let active = &face.id.active_set;
            for (k, row) in t.ineqs().iter().enumerate() {
                if !active.contains(&k) {
                    strict.push(row.neg());
                }
            }
            let rows: Vec<QVector> = active.iter().map(|&k| t.ineqs()[k].clone()).collect();
            let n = PolyCone::gens_unchecked(dim, &rows, t.eqs());
            normal = Some(match normal {
                Some(m) => m.intersect(&n),
                None => n,
            });
            signature.push((*piece, Some(face.id.clone())));
        }
        let normal = normal.expect("at least one active piece");
        if strict_region_point(&g, &strict).is_none() {
            return;
        }

        // Each outside piece is left through one of its complement half-spaces.
        let splits: Vec<Vec<QVector>> = outside.iter().map(|t| complement_splits(t)).collect();
        let mut pick = vec![0usize; splits.len()];
        if splits.iter().any(Vec::is_empty) {
            return;
        }
        let mut closures: Vec<PolyCone> = Vec::new();
        loop {
            let mut all_strict = strict.clone();
            all_strict.extend(pick.iter().zip(&splits).map(|(&k, hs)| hs[k].clone()));
            if strict_region_point(&g, &all_strict).is_some() {
                let negated: Vec<QVector> = all_strict.iter().map(QVector::neg).collect();
                let closure = g.with_constraints(&negated, &[]);
                if !closures.contains(&closure) {
                    closures.push(closure);
                }
            }
            let mut i = 0;
            loop {
                if i == pick.len() {
                    closures.sort();
                    for closure in closures {
                        out.push(Stratum { signature: signature.clone(), closure, normal: normal.clone() });
                    }
                    return;
                }
                pick[i] += 1;
                if pick[i] < splits[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }

    /// Directional limiting normal cone `N_D(ȳ; w)`; the zero direction gives
    /// the limiting normal cone.
    pub fn directional_normal_cone(&self, ybar: &QVector, w: &QVector) -> Result<ConeUnion> {
        if w.dim() != self.dim() {
            return Err(Error::Dimension(format!("direction {w} in R^{}", self.dim())));
        }
        let strata = self.direction_strata(ybar)?;
        Ok(ConeUnion::new(
            self.dim(),
            strata.into_iter().filter(|s| s.closure.contains(w)).map(|s| s.normal),
        ))
    }

    pub fn limiting_normal_cone(&self, ybar: &QVector) -> Result<ConeUnion> {
        self.directional_normal_cone(ybar, &QVector::zeros(self.dim()))
    }
}

impl fmt::Display for UnionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pieces.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

impl fmt::Debug for UnionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnionSet({self})")
    }
}

/// Whether every entry is strictly negative; handy for sign tests on values.
pub fn all_negative(vals: &[Rational]) -> bool {
    vals.iter().all(Signed::is_negative)
}
