//! Checks for constraint systems `G(p, x) ∈ D` with `D` a finite union of
//! polyhedra.
//!
//! Every check walks the strata of `D` at `g0 = G(p̄, x̄)`. A stratum comes
//! with a closed cone `C` of directions `w` (in `R^m`) and the regular normal
//! cone `N` valid along it, so that `N_D(g0; w)` is the union of `N` over
//! strata with `w ∈ C`. Primal directions are the preimage of `C` under the
//! Jacobian; multipliers are `N` cut by the adjoint equations.

use num_traits::Signed;

use super::quadratic::{strictly_negative_on_cone, QuadVerdict};
use super::spec::second_order_term;
use super::{
    finish, graphical_derivative_note, kind, nonzero_element, verdict_trivial, AubinMode, Certificate, ConstraintSystemSpec,
    Order, Rates, System, Witness, QUADRATIC_GENERATOR_CAP,
};
use crate::cone::{project_cone, uncovered_point, PolyCone};
use crate::error::{Error, Result};
use crate::linalg::{QMatrix, QVector};
use crate::sets::Stratum;

fn wrap(spec: &ConstraintSystemSpec) -> System {
    System::Constraint(spec.clone())
}

/// `{v : Mᵀ v = 0}` intersected with `c`.
fn adjoint_kernel(c: &PolyCone, m: &QMatrix) -> PolyCone {
    c.with_constraints(&[], m.transpose().rows())
}

struct StratumCones {
    stratum: Stratum,
    directions: PolyCone,
    adjoint: PolyCone,
}

/// Strata with their primal direction cones under `jac` and adjoint cones
/// `N ∩ ker jacᵀ`.
fn strata_cones(spec: &ConstraintSystemSpec, jac: &QMatrix) -> Result<Vec<StratumCones>> {
    Ok(spec
        .d
        .direction_strata(&spec.g0)?
        .into_iter()
        .map(|s| StratumCones {
            directions: s.closure.preimage(jac),
            adjoint: adjoint_kernel(&s.normal, jac),
            stratum: s,
        })
        .collect())
}

fn first_order(spec: &ConstraintSystemSpec, jac: &QMatrix, check: &str) -> Result<Certificate> {
    let mut cert = Certificate::new(check);
    for sc in strata_cones(spec, jac)? {
        let label = sc.stratum.describe();
        if sc.directions.is_trivial() {
            cert.trace(kind::STRATUM, label, vec![("closure", sc.stratum.closure)], "no nonzero direction");
            continue;
        }
        let verdict = verdict_trivial(&sc.adjoint);
        cert.trace(
            kind::STRATUM,
            label.clone(),
            vec![
                ("directions", sc.directions.clone()),
                ("normal cone", sc.stratum.normal.clone()),
                ("multipliers", sc.adjoint.clone()),
            ],
            verdict,
        );
        if let Some(vstar) = nonzero_element(&sc.adjoint) {
            let u = nonzero_element(&sc.directions).expect("nontrivial");
            cert.fail(Witness { stratum: label, direction: u, dual: Some(vstar) });
        }
    }
    Ok(cert)
}

pub(super) fn foscms(spec: &ConstraintSystemSpec) -> Result<Certificate> {
    finish(&wrap(spec), first_order(spec, &spec.jx, "foscms")?)
}

pub(super) fn foscms_joint(spec: &ConstraintSystemSpec) -> Result<Certificate> {
    finish(&wrap(spec), first_order(spec, &spec.joint_jacobian(), "foscms-joint")?)
}

fn second_order(spec: &ConstraintSystemSpec, check: &str) -> Result<Certificate> {
    let hs = spec.hessians.as_ref().ok_or(Error::MissingHessians)?;
    let mut cert = Certificate::new(check);
    for sc in strata_cones(spec, &spec.jx)? {
        let label = sc.stratum.describe();
        if sc.directions.is_trivial() || sc.adjoint.is_trivial() {
            let verdict = if sc.directions.is_trivial() { "no nonzero direction" } else { "only the trivial multiplier" };
            cert.trace(kind::STRATUM, label, vec![("directions", sc.directions), ("multipliers", sc.adjoint)], verdict);
            continue;
        }
        let cones = vec![("directions", sc.directions.clone()), ("multipliers", sc.adjoint.clone())];
        if let Some(l) = sc.adjoint.lin().first() {
            // Both l and -l are multipliers, and one of them gives a
            // nonnegative curvature term.
            let u = nonzero_element(&sc.directions).expect("nontrivial");
            let h = super::spec::contract(hs, l, spec.n);
            let vstar = if h.quadratic_form(&u).is_negative() { l.neg() } else { l.clone() };
            cert.trace(kind::STRATUM, label.clone(), cones, "multiplier line: curvature of one sign is nonnegative");
            cert.fail(Witness { stratum: label, direction: u, dual: Some(vstar) });
            continue;
        }
        let mut verdict = "curvature negative on every multiplier ray".to_string();
        for r in sc.adjoint.rays() {
            let h = super::spec::contract(hs, r, spec.n);
            match strictly_negative_on_cone(&h, &sc.directions, QUADRATIC_GENERATOR_CAP) {
                QuadVerdict::Negative => {}
                QuadVerdict::Witness(u) => {
                    verdict = format!("curvature nonnegative for multiplier {r}");
                    cert.fail(Witness { stratum: label.clone(), direction: u, dual: Some(r.clone()) });
                    break;
                }
                QuadVerdict::TooLarge => {
                    verdict = format!("undecided: more than {QUADRATIC_GENERATOR_CAP} direction rays");
                    cert.give_up();
                    cert.notes.push(format!("{label}: {verdict}"));
                    break;
                }
            }
        }
        cert.trace(kind::STRATUM, label, cones, verdict);
    }
    Ok(cert)
}

pub(super) fn soscms(spec: &ConstraintSystemSpec) -> Result<Certificate> {
    finish(&wrap(spec), second_order(spec, "soscms")?)
}

pub(super) fn calmness(spec: &ConstraintSystemSpec, order: Order) -> Result<Certificate> {
    let (check, what) = match order {
        Order::First => ("calmness", "first-order calmness"),
        Order::Second => ("calmness2", "second-order calmness"),
    };
    if !spec.param_lipschitz {
        return Err(Error::MissingParamLipschitz(what));
    }
    let mut cert = match order {
        Order::First => first_order(spec, &spec.jx, check)?,
        Order::Second => second_order(spec, check)?,
    };
    cert.trace.insert(
        0,
        super::TraceEntry {
            kind: kind::ASSUMPTION.into(),
            label: "restricted calmness with respect to p".into(),
            cones: Vec::new(),
            verdict: "G is Lipschitz in p (param_lipschitz: true)".into(),
        },
    );
    if cert.holds() {
        let mut found = None;
        for (i, t) in spec.d.local_cones(&spec.g0)? {
            let pre = t.preimage(&spec.jx);
            if let Some(u) = nonzero_element(&pre) {
                found = Some((i, u, t));
                break;
            }
        }
        let linear = order == Order::First && found.is_some();
        let hoelder = order == Order::Second && found.is_some();
        match found {
            Some((i, u, t)) => {
                let image = spec.jx.mul_vec(&u);
                cert.trace(
                    kind::RATE,
                    format!("solvability direction u = {u}, Jx·u = {image} in the tangent cone of piece {i}"),
                    vec![("tangent cone", t)],
                    "tangent to a convex piece, hence derivable",
                );
            }
            None => cert.trace(kind::RATE, "solvability direction", Vec::new(), "no nonzero u with Jx·u tangent to D"),
        }
        cert.rates = Some(Rates { linear_solvability: linear, hoelder_half_solvability: hoelder });
    }
    finish(&wrap(spec), cert)
}

/// Pieces of `{(q, u) : Jp·q + Jx·u ∈ T_D(g0)}`, one per piece of `D` through `g0`.
pub(super) fn solution_pieces(spec: &ConstraintSystemSpec) -> Vec<PolyCone> {
    let joint = spec.joint_jacobian();
    spec.d
        .local_cones(&spec.g0)
        .expect("g0 lies in D")
        .into_iter()
        .map(|(_, t)| t.preimage(&joint))
        .collect()
}

pub(super) fn aubin(spec: &ConstraintSystemSpec, mode: AubinMode, assume_subregular: bool) -> Result<Certificate> {
    let check = match mode {
        AubinMode::Corollary => "aubin",
        AubinMode::Theorem => "aubin-theorem",
    };
    let mut cert = Certificate::new(check);
    if mode == AubinMode::Theorem {
        if assume_subregular {
            cert.trace(kind::EVIDENCE, "metric subregularity of the joint map", Vec::new(), "asserted by the caller");
        } else {
            let joint = foscms_joint(spec)?;
            if !joint.holds() {
                return Err(Error::NoSubregularityEvidence);
            }
            cert.trace(kind::EVIDENCE, "metric subregularity of the joint map", Vec::new(), "joint FOSCMS holds");
        }
    }

    let l = spec.l;
    let pieces = solution_pieces(spec);
    let projections: Vec<PolyCone> = pieces.iter().map(|p| project_cone(p, &(0..l).collect::<Vec<_>>())).collect();
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

    let joint = spec.joint_jacobian();
    for s in spec.d.direction_strata(&spec.g0)? {
        let label = s.describe();
        let dirs = s.closure.preimage(&joint);
        if dirs.is_trivial() {
            cert.trace(kind::NO_DIRECTION, label, vec![("closure", s.closure.clone())], "no nonzero direction (q, u)");
            continue;
        }
        let adjoint = adjoint_kernel(&s.normal, &spec.jx);
        cert.trace(kind::DIRECTION_CASE, label.clone(), vec![("directions (q, u)", dirs.clone()), ("normal cone", s.normal.clone())], "nonzero directions");
        let offending = match mode {
            AubinMode::Corollary => nonzero_element(&adjoint),
            AubinMode::Theorem => {
                let jpt = spec.jp.transpose();
                adjoint.all_generators().into_iter().find(|g| !jpt.mul_vec(g).is_zero())
            }
        };
        let verdict = match (&offending, mode) {
            (None, AubinMode::Corollary) => "only the trivial solution".to_string(),
            (None, AubinMode::Theorem) => "every solution has q* = Jpᵀv* = 0".to_string(),
            (Some(v), _) => format!("solution v* = {v} with q* = {}", spec.jp.transpose().mul_vec(v)),
        };
        cert.trace(kind::ADJOINT_GE, label.clone(), vec![("solutions v*", adjoint)], verdict);
        if let Some(vstar) = offending {
            let d = nonzero_element(&dirs).expect("nontrivial");
            cert.fail(Witness { stratum: label, direction: d, dual: Some(vstar) });
        }
    }

    let standard: Vec<PolyCone> = spec
        .d
        .limiting_normal_cone(&spec.g0)?
        .pieces()
        .iter()
        .map(|n| adjoint_kernel(n, &spec.jx))
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

fn check_len(name: &str, v: &QVector, len: usize) -> Result<()> {
    if v.dim() != len {
        return Err(Error::Dimension(format!("{name} has length {} but should have {len}", v.dim())));
    }
    Ok(())
}

pub(super) fn directional_regularity(spec: &ConstraintSystemSpec, u: &QVector, v: &QVector) -> Result<Certificate> {
    check_len("u", u, spec.n)?;
    check_len("v", v, spec.m)?;
    let mut cert = Certificate::new("dir-reg");
    cert.inputs.insert("u".into(), u.clone());
    cert.inputs.insert("v".into(), v.clone());
    let w = spec.jx.mul_vec(u).sub(v);
    if !spec.d.tangent_cone(&spec.g0)?.contains(&w) {
        cert.notes.push(format!(
            "(u, v) is not tangent to the graph (Jx·u − v = {w} is not tangent to D), so regularity in this direction is automatic"
        ));
        return finish(&wrap(spec), cert);
    }
    for s in spec.d.direction_strata(&spec.g0)?.into_iter().filter(|s| s.closure.contains(&w)) {
        let label = s.describe();
        let adjoint = adjoint_kernel(&s.normal, &spec.jx);
        cert.trace(kind::STRATUM, label.clone(), vec![("normal cone", s.normal.clone()), ("multipliers", adjoint.clone())], verdict_trivial(&adjoint));
        if let Some(vstar) = nonzero_element(&adjoint) {
            cert.fail(Witness { stratum: label, direction: u.concat(v), dual: Some(vstar) });
        }
    }
    cert.refuted = cert.status == super::Status::NotCertified;
    finish(&wrap(spec), cert)
}

pub(super) fn second_order_subregularity(spec: &ConstraintSystemSpec, u: &QVector, gpp: Option<&QVector>) -> Result<Certificate> {
    check_len("u", u, spec.n)?;
    if u.is_zero() {
        return Err(Error::InvalidSpec("the direction u must be nonzero".into()));
    }
    let gpp = match gpp {
        Some(g) => g.clone(),
        None => second_order_term(spec.hessians.as_ref().ok_or(Error::MissingHessians)?, u),
    };
    check_len("gpp", &gpp, spec.m)?;
    let mut cert = Certificate::new("dir-subreg");
    cert.inputs.insert("u".into(), u.clone());
    cert.inputs.insert("gpp".into(), gpp.clone());
    let w = spec.jx.mul_vec(u);
    if !spec.d.tangent_cone(&spec.g0)?.contains(&w) {
        cert.notes.push(format!("Jx·u = {w} is not tangent to D: no multiplier exists in this direction"));
        return finish(&wrap(spec), cert);
    }
    for s in spec.d.direction_strata(&spec.g0)?.into_iter().filter(|s| s.closure.contains(&w)) {
        let label = s.describe();
        let adjoint = adjoint_kernel(&s.normal, &spec.jx);
        let bad = adjoint_sign_violation(&adjoint, &gpp);
        let verdict = match &bad {
            None => "⟨v*, G''⟩ < 0 on every nonzero multiplier".to_string(),
            Some(v) => format!("multiplier {v} with ⟨v*, G''⟩ ≥ 0"),
        };
        cert.trace(kind::STRATUM, label.clone(), vec![("multipliers", adjoint)], verdict);
        if let Some(vstar) = bad {
            cert.fail(Witness { stratum: label, direction: u.clone(), dual: Some(vstar) });
        }
    }
    finish(&wrap(spec), cert)
}

/// A nonzero element `v*` of `c` with `⟨v*, g⟩ ≥ 0`, if any. A linear
/// functional is negative on the nonzero part of a cone exactly when the cone
/// is pointed and the functional is negative on every ray.
pub(super) fn adjoint_sign_violation(c: &PolyCone, g: &QVector) -> Option<QVector> {
    if let Some(l) = c.lin().first() {
        return Some(if l.dot(g).is_negative() { l.neg() } else { l.clone() });
    }
    c.rays().iter().find(|r| !r.dot(g).is_negative()).cloned()
}

pub(super) fn replay(spec: &ConstraintSystemSpec, cert: &Certificate, w: &Witness) -> Result<bool> {
    let (l, n) = (spec.l, spec.n);
    let jxt = spec.jx.transpose();
    let jpt = spec.jp.transpose();
    let in_normal = |dir: &QVector, vstar: &QVector| -> Result<bool> {
        Ok(spec.d.directional_normal_cone(&spec.g0, dir)?.contains(vstar))
    };
    let Some(vstar) = &w.dual else {
        // Solvability failure: nothing solves the linearized system at q.
        return Ok(cert.check.starts_with("aubin")
            && super::graphical_derivative_s(&System::Constraint(spec.clone()), &w.direction)?.is_empty());
    };
    if vstar.is_zero() || w.direction.is_zero() {
        return Ok(false);
    }
    let ok = match cert.check.as_str() {
        "foscms" | "calmness" => {
            let u = &w.direction;
            jxt.mul_vec(vstar).is_zero() && in_normal(&spec.jx.mul_vec(u), vstar)?
        }
        "soscms" | "calmness2" => {
            let u = &w.direction;
            let h = spec.contracted_hessian(vstar)?;
            jxt.mul_vec(vstar).is_zero()
                && in_normal(&spec.jx.mul_vec(u), vstar)?
                && !h.quadratic_form(u).is_negative()
        }
        "foscms-joint" | "aubin" | "aubin-theorem" => {
            let q = w.direction.slice(0..l);
            let u = w.direction.slice(l..l + n);
            let dir = spec.jp.mul_vec(&q).add(&spec.jx.mul_vec(&u));
            let base = jxt.mul_vec(vstar).is_zero() && in_normal(&dir, vstar)?;
            base && match cert.check.as_str() {
                "foscms-joint" => jpt.mul_vec(vstar).is_zero(),
                "aubin-theorem" => !jpt.mul_vec(vstar).is_zero(),
                _ => true,
            }
        }
        "dir-reg" => {
            let u = w.direction.slice(0..n);
            let v = w.direction.slice(n..n + spec.m);
            jxt.mul_vec(vstar).is_zero() && in_normal(&spec.jx.mul_vec(&u).sub(&v), vstar)?
        }
        "dir-subreg" => {
            let gpp = cert.inputs.get("gpp").ok_or_else(|| Error::InvalidSpec("missing gpp input".into()))?;
            jxt.mul_vec(vstar).is_zero()
                && in_normal(&spec.jx.mul_vec(&w.direction), vstar)?
                && !vstar.dot(gpp).is_negative()
        }
        _ => false,
    };
    Ok(ok)
}
