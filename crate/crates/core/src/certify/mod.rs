//! Decision procedures for calmness, metric (sub)regularity and the Aubin
//! property of parameterized constraint and variational systems.
//!
//! Each check returns a [`Certificate`]: a status, witnesses for failures,
//! and a trace of every stratum examined with the cones involved.

mod constraint;
mod quadratic;
mod spec;
mod variational;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cone::PolyCone;
use crate::error::{Error, Result};
use crate::linalg::QVector;
use crate::sets::Polyhedron;

pub use quadratic::{strictly_negative_on_cone, QuadVerdict};
pub use spec::{ConstraintSystemSpec, System, VariationalSystemSpec};

/// Rays above this count make the second-order test give up.
pub const QUADRATIC_GENERATOR_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Holds,
    NotCertified,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "Holds",
            Status::NotCertified => "NotCertified",
            Status::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AubinMode {
    Corollary,
    Theorem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Which stratum or face pair failed.
    pub stratum: String,
    /// Primal direction: `u`, or `(q, u)` for parameterized checks.
    pub direction: QVector,
    /// Offending multiplier `v*`; absent for solvability failures, where
    /// `direction` is an uncovered parameter direction `q`.
    pub dual: Option<QVector>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rates {
    pub linear_solvability: bool,
    pub hoelder_half_solvability: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCone {
    pub name: String,
    pub cone: PolyCone,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub kind: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cones: Vec<NamedCone>,
    pub verdict: String,
}

/// Trace entry kinds.
pub mod kind {
    pub const ASSUMPTION: &str = "assumption";
    pub const STRATUM: &str = "stratum";
    pub const SOLVABILITY: &str = "solvability";
    pub const DIRECTION_CASE: &str = "direction-case";
    pub const ADJOINT_GE: &str = "adjoint-ge";
    pub const NO_DIRECTION: &str = "no-direction";
    pub const STANDARD_ADJOINT_GE: &str = "standard-adjoint-ge";
    pub const EVIDENCE: &str = "evidence";
    pub const RATE: &str = "rate";
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub check: String,
    pub status: Status,
    /// Set when the criterion is exact, so that `NotCertified` disproves the
    /// property.
    #[serde(default)]
    pub refuted: bool,
    #[serde(default)]
    pub inputs: BTreeMap<String, QVector>,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Rates>,
    #[serde(default)]
    pub trace: Vec<TraceEntry>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Certificate {
    pub(crate) fn new(check: &str) -> Self {
        Certificate {
            check: check.to_string(),
            status: Status::Holds,
            refuted: false,
            inputs: BTreeMap::new(),
            witnesses: Vec::new(),
            rates: None,
            trace: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn trace(&mut self, kind: &str, label: impl Into<String>, cones: Vec<(&str, PolyCone)>, verdict: impl Into<String>) {
        self.trace.push(TraceEntry {
            kind: kind.to_string(),
            label: label.into(),
            cones: cones
                .into_iter()
                .map(|(name, cone)| NamedCone { name: name.to_string(), cone })
                .collect(),
            verdict: verdict.into(),
        });
    }

    pub(crate) fn fail(&mut self, w: Witness) {
        self.status = Status::NotCertified;
        self.witnesses.push(w);
    }

    pub(crate) fn give_up(&mut self) {
        if self.status == Status::Holds {
            self.status = Status::Inconclusive;
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn entries(&self, kind: &str) -> impl Iterator<Item = &TraceEntry> {
        let kind = kind.to_string();
        self.trace.iter().filter(move |e| e.kind == kind)
    }
}

/// Some nonzero element of a nontrivial cone.
pub(crate) fn nonzero_element(c: &PolyCone) -> Option<QVector> {
    c.rays().first().or_else(|| c.lin().first()).cloned()
}

pub(crate) fn verdict_trivial(c: &PolyCone) -> &'static str {
    if c.is_trivial() {
        "only the trivial solution"
    } else {
        "nontrivial solutions"
    }
}

fn constraint_only(sys: &System, check: &str) -> Result<ConstraintSystemSpec> {
    match sys {
        System::Constraint(s) => Ok(s.clone()),
        System::Variational(_) => Err(Error::InvalidSpec(format!("{check} applies to constraint systems only"))),
    }
}

/// First-order sufficient condition for metric subregularity of the
/// frozen constraint system.
pub fn check_foscms(spec: &ConstraintSystemSpec) -> Result<Certificate> {
    constraint::foscms(spec)
}

/// Second-order sufficient condition for metric subregularity.
pub fn check_soscms(spec: &ConstraintSystemSpec) -> Result<Certificate> {
    constraint::soscms(spec)
}

/// Calmness of the solution map of a constraint system, with solvability
/// rates.
pub fn check_calmness_constraint(spec: &ConstraintSystemSpec, order: Order) -> Result<Certificate> {
    constraint::calmness(spec, order)
}

/// Calmness of a variational system whose map is affine in `x`: such systems
/// are polyhedral, hence calm, whenever the data depend Lipschitz
/// continuously on the parameter.
pub fn check_calmness_polyhedral(spec: &VariationalSystemSpec) -> Result<Certificate> {
    variational::calmness_polyhedral(spec)
}

/// Aubin property of the solution map.
pub fn check_aubin(sys: &System, mode: AubinMode, assume_subregular: bool) -> Result<Certificate> {
    match sys {
        System::Constraint(s) => constraint::aubin(s, mode, assume_subregular),
        System::Variational(s) => variational::aubin(s, mode, assume_subregular),
    }
}

/// FOSCMS for the joint map `(p, x) ↦ M(p, x)`.
pub fn check_foscms_joint(sys: &System) -> Result<Certificate> {
    match sys {
        System::Constraint(s) => constraint::foscms_joint(s),
        System::Variational(s) => Ok(variational::foscms_joint(s)),
    }
}

/// Slice at `q` of the solution cone `{(q, u) : 0 ∈ DM(p̄, x̄, 0)(q, u)}`.
pub fn graphical_derivative_s(sys: &System, q: &QVector) -> Result<Vec<Polyhedron>> {
    if q.dim() != sys.param_dim() {
        return Err(Error::Dimension(format!("q has length {} but l = {}", q.dim(), sys.param_dim())));
    }
    let pieces = match sys {
        System::Constraint(s) => constraint::solution_pieces(s),
        System::Variational(s) => variational::solution_pieces(s),
    };
    let mut out: Vec<Polyhedron> = Vec::new();
    for piece in pieces {
        if let Some(p) = Polyhedron::from_cone(&piece).slice_leading(q)? {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Exact criterion for metric regularity of the frozen map in direction
/// `(u, v)`.
pub fn check_directional_metric_regularity(sys: &System, u: &QVector, v: &QVector) -> Result<Certificate> {
    match sys {
        System::Constraint(s) => constraint::directional_regularity(s, u, v),
        System::Variational(s) => variational::directional_regularity(s, u, v),
    }
}

/// Second-order sufficient condition for metric subregularity in direction
/// `u`; `gpp` defaults to `(uᵀ H_i u)_i` computed from the hessians.
pub fn check_second_order_directional_subregularity(
    sys: &System,
    u: &QVector,
    gpp: Option<&QVector>,
) -> Result<Certificate> {
    match sys {
        System::Constraint(s) => constraint::second_order_subregularity(s, u, gpp),
        System::Variational(s) => variational::second_order_subregularity(s, u, gpp),
    }
}

/// Runs a check by its command-line name.
pub fn run_check(
    sys: &System,
    check: &str,
    u: Option<&QVector>,
    v: Option<&QVector>,
    gpp: Option<&QVector>,
    assume_subregular: bool,
) -> Result<Certificate> {
    let need_u = || u.cloned().ok_or_else(|| Error::InvalidSpec(format!("{check} needs a direction u")));
    match check {
        "foscms" => check_foscms(&constraint_only(sys, check)?),
        "soscms" => check_soscms(&constraint_only(sys, check)?),
        "calmness" | "calmness2" => {
            let order = if check == "calmness" { Order::First } else { Order::Second };
            match sys {
                System::Constraint(s) => check_calmness_constraint(s, order),
                System::Variational(s) => check_calmness_polyhedral(s),
            }
        }
        "aubin" => check_aubin(sys, AubinMode::Corollary, assume_subregular),
        "aubin-theorem" => check_aubin(sys, AubinMode::Theorem, assume_subregular),
        "foscms-joint" => check_foscms_joint(sys),
        "dir-reg" => {
            let u = need_u()?;
            let zero = QVector::zeros(match sys {
                System::Constraint(s) => s.m,
                System::Variational(s) => s.n,
            });
            check_directional_metric_regularity(sys, &u, v.unwrap_or(&zero))
        }
        "dir-subreg" => check_second_order_directional_subregularity(sys, &need_u()?, gpp),
        other => Err(Error::InvalidSpec(format!("unknown check {other:?}"))),
    }
}

/// Replays every witness of a certificate against the cone layer.
pub fn replay_witnesses(sys: &System, cert: &Certificate) -> Result<bool> {
    for w in &cert.witnesses {
        let ok = match sys {
            System::Constraint(s) => constraint::replay(s, cert, w)?,
            System::Variational(s) => variational::replay(s, cert, w)?,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `graphical_derivative_s` is always the Phase-A slice; whether it equals
/// `DS(p̄, x̄)(q)` depends on the Aubin hypotheses.
pub(crate) fn graphical_derivative_note(certified: bool) -> String {
    if certified {
        "the graphical derivative of S is the slice of the solution cone at q (hypotheses certified)".into()
    } else {
        "the slice of the solution cone at q is reported as the graphical derivative of S, but its hypotheses were not certified".into()
    }
}

/// Self-check run before a certificate leaves this module.
pub(crate) fn finish(sys: &System, cert: Certificate) -> Result<Certificate> {
    if cert.status == Status::NotCertified && cert.witnesses.is_empty() {
        return Err(Error::WitnessReplay(format!("{}: failure without witness", cert.check)));
    }
    if !replay_witnesses(sys, &cert)? {
        return Err(Error::WitnessReplay(cert.check.clone()));
    }
    Ok(cert)
}
