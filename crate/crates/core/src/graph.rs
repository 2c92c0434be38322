//! Normal cones to the graph of the normal-cone map of a convex polyhedron.
//!
//! Everything is expressed through the critical cone `K` at the reference
//! pair and its faces: the regular normal cone is `K° × K`, and limiting and
//! directional limiting normal cones are unions of `(F1−F2)° × (F1−F2)` over
//! nested faces `F2 ⊆ F1` of `K`, filtered by the direction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cone::{face_difference, Face, FaceId, PolyCone};
use crate::error::{Error, Result};
use crate::linalg::QVector;
use crate::sets::{ConeUnion, Polyhedron};

/// A point `(ȳ, ȳ*)` of the graph of `N_Γ`, with its critical cone.
#[derive(Clone, Debug)]
pub struct GraphPoint {
    gamma: Polyhedron,
    ybar: QVector,
    ybarstar: QVector,
    critical: PolyCone,
}

/// The product set `K° × K` with the face pair it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductPiece {
    pub k: PolyCone,
    pub kpolar: PolyCone,
    #[serde(rename = "f1_active_set")]
    pub f1: FaceId,
    #[serde(rename = "f2_active_set")]
    pub f2: FaceId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphNormalCone {
    pub pieces: Vec<ProductPiece>,
}

/// A nested face pair `F2 ⊆ F1` of a cone and the difference `F1 − F2`.
#[derive(Clone, Debug)]
pub struct FacePair {
    pub f1: Face,
    pub f2: Face,
    pub diff: PolyCone,
}

/// Every nested pair of faces of `k`, in face order.
pub fn face_pairs(k: &PolyCone) -> Vec<FacePair> {
    let faces = k.faces();
    let mut pairs = Vec::new();
    for f1 in &faces {
        for f2 in &faces {
            if f2.cone.subcone_of(&f1.cone) {
                let diff = face_difference(&f1.cone, &f2.cone).expect("nested faces");
                pairs.push(FacePair { f1: f1.clone(), f2: f2.clone(), diff });
            }
        }
    }
    pairs
}

impl GraphNormalCone {
    fn from_pairs<'a>(pairs: impl IntoIterator<Item = &'a FacePair>) -> Self {
        let mut pieces: Vec<ProductPiece> = Vec::new();
        for p in pairs {
            if pieces.iter().any(|q| q.k == p.diff) {
                continue;
            }
            pieces.push(ProductPiece {
                kpolar: p.diff.polar(),
                k: p.diff.clone(),
                f1: p.f1.id.clone(),
                f2: p.f2.id.clone(),
            });
        }
        pieces.sort_by(|a, b| a.k.cmp(&b.k));
        GraphNormalCone { pieces }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// The distinct cones `K`, sorted.
    pub fn k_cones(&self) -> Vec<PolyCone> {
        self.pieces.iter().map(|p| p.k.clone()).collect()
    }

    /// Whether `(z*, z)` lies in the union of the product sets.
    pub fn contains(&self, zstar: &QVector, z: &QVector) -> bool {
        self.pieces.iter().any(|p| p.kpolar.contains(zstar) && p.k.contains(z))
    }

    /// Every product set of `self` lies in some product set of `other`.
    pub fn covered_by(&self, other: &GraphNormalCone) -> bool {
        self.pieces.iter().all(|p| {
            other
                .pieces
                .iter()
                .any(|q| p.k.subcone_of(&q.k) && p.kpolar.subcone_of(&q.kpolar))
        })
    }
}

impl fmt::Display for GraphNormalCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            writeln!(
                f,
                "  [{}] K = {}   K° = {}   (F1 {:?}, F2 {:?})",
                i + 1,
                p.k,
                p.kpolar,
                p.f1.active_set,
                p.f2.active_set
            )?;
        }
        Ok(())
    }
}

impl GraphPoint {
    pub fn new(gamma: Polyhedron, ybar: QVector, ybarstar: QVector) -> Result<Self> {
        let critical = gamma.critical_cone(&ybar, &ybarstar).ok_or_else(|| Error::NotInSet {
            point: format!("({ybar}, {ybarstar})"),
            set: "the graph of the normal-cone map".into(),
        })?;
        Ok(GraphPoint { gamma, ybar, ybarstar, critical })
    }

    pub fn gamma(&self) -> &Polyhedron {
        &self.gamma
    }

    pub fn ybar(&self) -> &QVector {
        &self.ybar
    }

    pub fn ybarstar(&self) -> &QVector {
        &self.ybarstar
    }

    pub fn critical_cone(&self) -> &PolyCone {
        &self.critical
    }

    /// Membership of `(v, v*)` in the tangent cone to the graph, which is the
    /// graph of `N_K`.
    pub fn tangent_member(&self, v: &QVector, vstar: &QVector) -> bool {
        let k = &self.critical;
        v.dim() == k.dim()
            && vstar.dim() == k.dim()
            && k.contains(v)
            && k.polar().contains(vstar)
            && v.dot(vstar) == num_traits::Zero::zero()
    }

    pub fn regular_normal(&self) -> GraphNormalCone {
        let faces = self.critical.faces();
        let full = faces.last().expect("the cone is its own face");
        let lin = faces.first().expect("the lineality space is a face");
        let pair = FacePair { f1: full.clone(), f2: lin.clone(), diff: self.critical.clone() };
        GraphNormalCone::from_pairs([&pair])
    }

    pub fn limiting_normal(&self) -> GraphNormalCone {
        GraphNormalCone::from_pairs(&face_pairs(&self.critical))
    }

    /// Face pairs admissible for the direction `(v, v*)`:
    /// `v ∈ F2 ⊆ F1 ⊆ [v*]^⊥`.
    pub fn directional_pairs(&self, v: &QVector, vstar: &QVector) -> Result<Vec<FacePair>> {
        if !self.tangent_member(v, vstar) {
            return Err(Error::NotTangent(format!("({v}, {vstar})")));
        }
        Ok(face_pairs(&self.critical)
            .into_iter()
            .filter(|p| p.f2.cone.contains(v) && p.f1.cone.orthogonal_to(vstar))
            .collect())
    }

    pub fn directional_limiting_normal(&self, v: &QVector, vstar: &QVector) -> Result<GraphNormalCone> {
        Ok(GraphNormalCone::from_pairs(&self.directional_pairs(v, vstar)?))
    }

    /// Directional limiting coderivative of `N_Γ` applied to `w*`: the union
    /// of `K°` over pieces with `−w* ∈ K`.
    pub fn directional_coderivative(
        &self,
        v: &QVector,
        vstar: &QVector,
        wstar: &QVector,
    ) -> Result<ConeUnion> {
        let g = self.directional_limiting_normal(v, vstar)?;
        let minus = wstar.neg();
        Ok(ConeUnion::new(
            self.critical.dim(),
            g.pieces.into_iter().filter(|p| p.k.contains(&minus)).map(|p| p.kpolar),
        ))
    }
}
