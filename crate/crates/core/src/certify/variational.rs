//! Checks for variational systems `0 ∈ G(p, x) + N_Γ(x)` with `Γ` a convex
//! polyhedron.
//!
//! Near the reference point the graph of `N_Γ` looks like the graph of
//! `N_K`, with `K` the critical cone. A pair of directions `(u, w)` lies in
//! that graph iff `u ∈ F` and `w ∈ K° ∩ F^⊥` for some face `F` of `K`, and the
//! coderivative pieces active along `(u, w)` are indexed by nested face pairs
//! `u ∈ F2 ⊆ F1 ⊆ [w]^⊥`. Every check below enumerates face pairs and writes
//! those conditions as linear constraints on the directions.

use num_traits::Signed;

use super::constraint::adjoint_sign_violation;
use super::spec::second_order_term;
use super::{
    finish, graphical_derivative_note, kind, nonzero_element, verdict_trivial, AubinMode, Certificate, Status, System,
    VariationalSystemSpec, Witness,
};
use crate::cone::{project_cone, uncovered_point, PolyCone};
use crate::error::{Error, Result};
use crate::graph::{face_pairs, FacePair};
use crate::linalg::{int, QMatrix, QVector};

fn wrap(spec: &VariationalSystemSpec) -> System {
    System::Variational(spec.clone())
}

fn describe_pair(p: &FacePair) -> String {
    format!("F1 = {} {:?}, F2 = {} {:?}", p.f1.cone, p.f1.id.active_set, p.f2.cone, p.f2.id.active_set)
}

/// `{v* : −Jxᵀv* ∈ K°, −v* ∈ K}`, the solutions of the adjoint inclusion for
/// the coderivative piece `K° × K`.
fn adjoint_cone(jx: &QMatrix, k: &PolyCone) -> PolyCone {
    let minus_jxt = jx.transpose().scale(&int(-1));
    k.polar().preimage(&minus_jxt).intersect(&k.neg())
}

/// `{(q, u) : u ∈ F2, −Jp·q − Jx·u ∈ K° ∩ F1^⊥}`.
fn pair_directions(spec: &VariationalSystemSpec, k: &PolyCone, f1: &PolyCone, f2: &PolyCone) -> PolyCone {
    let (l, n) = (spec.l, spec.n);
    let pick_u = QMatrix::zeros(n, l).hstack(&QMatrix::identity(n));
    let minus_joint = spec.jp.hstack(&spec.jx).scale(&int(-1));
    let dual = k.polar().with_constraints(&[], &f1.all_generators());
    f2.preimage(&pick_u).intersect(&dual.preimage(&minus_joint))
}

/// Solution pieces `{(q, u) : 0 ∈ Jp·q + Jx·u + N_K(u)}`, one per face of `K`.
pub(super) fn solution_pieces(spec: &VariationalSystemSpec) -> Vec<PolyCone> {
    let k = spec.graph_point().critical_cone().clone();
    k.faces().iter().map(|f| pair_directions(spec, &k, &f.cone, &f.cone)).collect()
}

/// Adjoint solutions along the directions `(u, w)` of the graph of `N_Γ`,
/// one cone per admissible face pair.
fn directional_adjoints(spec: &VariationalSystemSpec, u: &QVector, w: &QVector) -> Result<Vec<(String, PolyCone)>> {
    let gp = spec.graph_point();
    Ok(gp
        .directional_pairs(u, w)?
        .iter()
        .map(|p| (describe_pair(p), adjoint_cone(&spec.jx, &p.diff)))
        .collect())
}

pub(super) fn calmness_polyhedral(spec: &VariationalSystemSpec) -> Result<Certificate> {
    if !spec.param_lipschitz {
        return Err(Error::MissingParamLipschitz("calmness of a polyhedral variational system"));
    }
    let hs = spec.hessians.as_ref().ok_or(Error::MissingHessians)?;
    let mut cert = Certificate::new("calmness");
    cert.trace(kind::ASSUMPTION, "G is Lipschitz in p", Vec::new(), "param_lipschitz: true");
    if hs.iter().all(|h| h.rows().iter().all(|r| r.is_zero())) {
        cert.trace(
            kind::ASSUMPTION,
            "G is affine in x",
            Vec::new(),
            "all hessians vanish, so the frozen map is polyhedral and metrically subregular",
        );
    } else {
        cert.give_up();
        cert.notes.push("G is not affine in x: the polyhedral calmness test does not apply".into());
    }
    finish(&wrap(spec), cert)
}

fn check_name(mode: AubinMode) -> &'static str {
    match mode {
        AubinMode::Corollary => "aubin",
        AubinMode::Theorem => "aubin-theorem",
    }
}

pub(super) fn aubin(spec: &VariationalSystemSpec, mode: AubinMode, assume_subregular: bool) -> Result<Certificate> {
    let mut cert = Certificate::new(check_name(mode));
    if mode == AubinMode::Theorem {
        let verdict = if assume_subregular {
            "asserted by the caller"
        } else if foscms_joint(spec).holds() {
            "joint FOSCMS holds"
        } else {
            return Err(Error::NoSubregularityEvidence);
        };
        cert.trace(kind::EVIDENCE, "metric subregularity of the joint map", Vec::new(), verdict);
    }

    let gp = spec.graph_point();
    let k = gp.critical_cone().clone();
    let l = spec.l;
    let pieces = solution_pieces(spec);
    let keep: Vec<usize> = (0..l).collect();
    let projections: Vec<PolyCone> = pieces.iter().map(|p| project_cone(p, &keep)).collect();
    let uncovered = uncovered_point(l, &projections);
    cert.trace(
        kind::SOLVABILITY,
        "projection of the solution cone onto q",
        projections.iter().map(|p| ("projected piece", p.clone())).collect(),
        if uncovered.is_none() { "covers every q" } else { "misses some q" },
    );
    if let Some(q) = uncovered {
        cert.fail(Witness { stratum: "solvability".into(), direction: q, dual: None });
    }

    let jpt = spec.jp.transpose();
    for pair in face_pairs(&k) {
        let label = describe_pair(&pair);
        let dirs = pair_directions(spec, &k, &pair.f1.cone, &pair.f2.cone);
        if dirs.is_trivial() {
            cert.trace(kind::NO_DIRECTION, label, vec![("K", pair.diff.clone())], "no nonzero direction (q, u)");
            continue;
        }
        let adjoint = adjoint_cone(&spec.jx, &pair.diff);
        cert.trace(
            kind::DIRECTION_CASE,
            label.clone(),
            vec![("directions (q, u)", dirs.clone()), ("K", pair.diff.clone())],
            "nonzero directions",
        );
        let offending = match mode {
            AubinMode::Corollary => nonzero_element(&adjoint),
            AubinMode::Theorem => adjoint.all_generators().into_iter().find(|g| !jpt.mul_vec(g).is_zero()),
        };
        let verdict = match (&offending, mode) {
            (None, AubinMode::Corollary) => "only the trivial solution".to_string(),
            (None, AubinMode::Theorem) => "every solution has q* = Jpᵀv* = 0".to_string(),
            (Some(v), _) => format!("solution v* = {v} with q* = {}", jpt.mul_vec(v)),
        };
        cert.trace(kind::ADJOINT_GE, label.clone(), vec![("solutions v*", adjoint)], verdict);
        if let Some(vstar) = offending {
            let d = nonzero_element(&dirs).expect("nontrivial");
            cert.fail(Witness { stratum: label, direction: d, dual: Some(vstar) });
        }
    }

    let standard: Vec<PolyCone> = gp
        .limiting_normal()
        .pieces
        .iter()
        .map(|p| adjoint_cone(&spec.jx, &p.k))
        .filter(|c| !c.is_trivial())
        .collect();
    let verdict = if standard.is_empty() { "only the trivial solution" } else { "nontrivial solutions" };
    cert.trace(
        kind::STANDARD_ADJOINT_GE,
        "adjoint inclusion without directions",
        standard.into_iter().map(|c| ("solutions v*", c)).collect(),
        verdict,
    );
    let note = graphical_derivative_note(cert.holds());
    cert.notes.push(note);
    finish(&wrap(spec), cert)
}

/// FOSCMS for `(p, x) ↦ G(p, x) + N_Γ(x)`: along every nonzero solution
/// direction, `Jpᵀv* = 0` and the adjoint inclusion force `v* = 0`.
pub(super) fn foscms_joint(spec: &VariationalSystemSpec) -> Certificate {
    let k = spec.graph_point().critical_cone().clone();
    let jpt = spec.jp.transpose();
    let mut cert = Certificate::new("foscms-joint");
    for pair in face_pairs(&k) {
        let dirs = pair_directions(spec, &k, &pair.f1.cone, &pair.f2.cone);
        if dirs.is_trivial() {
            continue;
        }
        let label = describe_pair(&pair);
        let adjoint = adjoint_cone(&spec.jx, &pair.diff).with_constraints(&[], jpt.rows());
        cert.trace(kind::STRATUM, label.clone(), vec![("directions (q, u)", dirs.clone()), ("multipliers", adjoint.clone())], verdict_trivial(&adjoint));
        if let Some(vstar) = nonzero_element(&adjoint) {
            let d = nonzero_element(&dirs).expect("nontrivial");
            cert.fail(Witness { stratum: label, direction: d, dual: Some(vstar) });
        }
    }
    cert
}

fn check_len(name: &str, v: &QVector, len: usize) -> Result<()> {
    if v.dim() != len {
        return Err(Error::Dimension(format!("{name} has length {} but should have {len}", v.dim())));
    }
    Ok(())
}

pub(super) fn directional_regularity(spec: &VariationalSystemSpec, u: &QVector, v: &QVector) -> Result<Certificate> {
    check_len("u", u, spec.n)?;
    check_len("v", v, spec.n)?;
    let mut cert = Certificate::new("dir-reg");
    cert.inputs.insert("u".into(), u.clone());
    cert.inputs.insert("v".into(), v.clone());
    let w = v.sub(&spec.jx.mul_vec(u));
    if !spec.graph_point().tangent_member(u, &w) {
        cert.notes.push(format!(
            "(u, v − Jx·u) = ({u}, {w}) is not tangent to the graph of the normal-cone map, so regularity in this direction is automatic"
        ));
        return finish(&wrap(spec), cert);
    }
    for (label, adjoint) in directional_adjoints(spec, u, &w)? {
        cert.trace(kind::STRATUM, label.clone(), vec![("solutions v*", adjoint.clone())], verdict_trivial(&adjoint));
        if let Some(vstar) = nonzero_element(&adjoint) {
            cert.fail(Witness { stratum: label, direction: u.concat(v), dual: Some(vstar) });
        }
    }
    cert.refuted = cert.status == Status::NotCertified;
    finish(&wrap(spec), cert)
}

pub(super) fn second_order_subregularity(spec: &VariationalSystemSpec, u: &QVector, gpp: Option<&QVector>) -> Result<Certificate> {
    check_len("u", u, spec.n)?;
    if u.is_zero() {
        return Err(Error::InvalidSpec("the direction u must be nonzero".into()));
    }
    let gpp = match gpp {
        Some(g) => g.clone(),
        None => second_order_term(spec.hessians.as_ref().ok_or(Error::MissingHessians)?, u),
    };
    check_len("gpp", &gpp, spec.n)?;
    let mut cert = Certificate::new("dir-subreg");
    cert.inputs.insert("u".into(), u.clone());
    cert.inputs.insert("gpp".into(), gpp.clone());
    let w = spec.jx.mul_vec(u).neg();
    if !spec.graph_point().tangent_member(u, &w) {
        cert.notes.push(format!("(u, −Jx·u) = ({u}, {w}) is not tangent to the graph: no multiplier exists in this direction"));
        return finish(&wrap(spec), cert);
    }
    for (label, adjoint) in directional_adjoints(spec, u, &w)? {
        let bad = adjoint_sign_violation(&adjoint, &gpp);
        let verdict = match &bad {
            None => "⟨v*, G''⟩ < 0 on every nonzero solution".to_string(),
            Some(v) => format!("solution {v} with ⟨v*, G''⟩ ≥ 0"),
        };
        cert.trace(kind::STRATUM, label.clone(), vec![("solutions v*", adjoint)], verdict);
        if let Some(vstar) = bad {
            cert.fail(Witness { stratum: label, direction: u.clone(), dual: Some(vstar) });
        }
    }
    finish(&wrap(spec), cert)
}

pub(super) fn replay(spec: &VariationalSystemSpec, cert: &Certificate, w: &Witness) -> Result<bool> {
    let (l, n) = (spec.l, spec.n);
    let gp = spec.graph_point();
    let jpt = spec.jp.transpose();
    let Some(vstar) = &w.dual else {
        return Ok(cert.check.starts_with("aubin")
            && super::graphical_derivative_s(&wrap(spec), &w.direction)?.is_empty());
    };
    if vstar.is_zero() || w.direction.is_zero() {
        return Ok(false);
    }
    // v* solves the adjoint inclusion along (u, z) for some graph normal piece.
    let solves = |u: &QVector, z: &QVector| -> Result<bool> {
        if !gp.tangent_member(u, z) {
            return Ok(false);
        }
        let minus = vstar.neg();
        let image = spec.jx.transpose().mul_vec(vstar).neg();
        Ok(gp
            .directional_limiting_normal(u, z)?
            .pieces
            .iter()
            .any(|p| p.k.contains(&minus) && p.kpolar.contains(&image)))
    };
    let ok = match cert.check.as_str() {
        "aubin" | "aubin-theorem" | "foscms-joint" => {
            let q = w.direction.slice(0..l);
            let u = w.direction.slice(l..l + n);
            let z = spec.jp.mul_vec(&q).add(&spec.jx.mul_vec(&u)).neg();
            solves(&u, &z)?
                && match cert.check.as_str() {
                    "aubin-theorem" => !jpt.mul_vec(vstar).is_zero(),
                    "foscms-joint" => jpt.mul_vec(vstar).is_zero(),
                    _ => true,
                }
        }
        "dir-reg" => {
            let u = w.direction.slice(0..n);
            let v = w.direction.slice(n..2 * n);
            solves(&u, &v.sub(&spec.jx.mul_vec(&u)))?
        }
        "dir-subreg" => {
            let gpp = cert.inputs.get("gpp").ok_or_else(|| Error::InvalidSpec("missing gpp input".into()))?;
            solves(&w.direction, &spec.jx.mul_vec(&w.direction).neg())? && !vstar.dot(gpp).is_negative()
        }
        _ => false,
    };
    Ok(ok)
}
