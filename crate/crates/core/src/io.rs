//! JSON problem files.
//!
//! A file describes one linearized system. Matrices are row-major arrays of
//! rational strings (`"3"`, `"-1/2"`); plain JSON integers are accepted too.
//!
//! ```json
//! {
//!   "kind": "constraint",
//!   "label": "two inequalities",
//!   "dims": {"l": 1, "n": 2, "m": 2},
//!   "Jp": [["1"], ["1"]],
//!   "Jx": [["0", "1"], ["0", "-1"]],
//!   "g0": ["0", "0"],
//!   "D": {"pieces": [{"A": [["1", "0"], ["0", "1"]], "b": ["0", "0"]}]},
//!   "hessians": [[["-1", "0"], ["0", "0"]], [["-1", "0"], ["0", "0"]]],
//!   "param_lipschitz": true
//! }
//! ```
//!
//! Variational files replace `g0`/`D` by `xbar`, `ybarstar` and `gamma`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certify::{ConstraintSystemSpec, System, VariationalSystemSpec};
use crate::error::{Error, Result};
use crate::linalg::{QMatrix, QVector};
use crate::sets::{Polyhedron, UnionSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub l: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

/// `{y : A y ≤ b, E y = e}` exactly as written in the file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPolyhedron {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(rename = "A", default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<QVector>,
    #[serde(default, skip_serializing_if = "is_empty")]
    pub b: QVector,
    #[serde(rename = "E", default, skip_serializing_if = "Vec::is_empty")]
    pub e: Vec<QVector>,
    #[serde(rename = "e", default, skip_serializing_if = "is_empty")]
    pub f: QVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawUnion {
    pub pieces: Vec<RawPolyhedron>,
}

/// The file contents before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: String,
    #[serde(default)]
    pub label: String,
    pub dims: Dims,
    #[serde(rename = "Jp")]
    pub jp: Vec<QVector>,
    #[serde(rename = "Jx")]
    pub jx: Vec<QVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0: Option<QVector>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<RawUnion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xbar: Option<QVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ybarstar: Option<QVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<RawPolyhedron>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessians: Option<Vec<Vec<QVector>>>,
    #[serde(default)]
    pub param_lipschitz: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub file: ProblemFile,
    pub system: System,
}

fn field<T>(v: Option<T>, name: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| Error::Format(format!("{kind} problem is missing field `{name}`")))
}

fn matrix(name: &str, rows: &[QVector], nrows: usize, ncols: usize) -> Result<QMatrix> {
    if rows.len() != nrows {
        return Err(Error::Format(format!("{name}: expected {nrows} rows, found {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.dim() != ncols {
            return Err(Error::Format(format!("{name}[{i}]: expected {ncols} entries, found {}", r.dim())));
        }
    }
    Ok(QMatrix::from_rows(rows.to_vec(), ncols))
}

fn vector(name: &str, v: QVector, len: usize) -> Result<QVector> {
    if v.dim() != len {
        return Err(Error::Format(format!("{name}: expected {len} entries, found {}", v.dim())));
    }
    Ok(v)
}

fn is_empty(v: &QVector) -> bool {
    v.dim() == 0
}

impl RawPolyhedron {
    pub fn to_polyhedron(&self, name: &str, dim: usize) -> Result<Polyhedron> {
        if let Some(d) = self.dim {
            if d != dim {
                return Err(Error::Format(format!("{name}.dim is {d} but should be {dim}")));
            }
        }
        let a = matrix(&format!("{name}.A"), &self.a, self.a.len(), dim)?;
        let e = matrix(&format!("{name}.E"), &self.e, self.e.len(), dim)?;
        let b = vector(&format!("{name}.b"), self.b.clone(), self.a.len())?;
        let f = vector(&format!("{name}.e"), self.f.clone(), self.e.len())?;
        Polyhedron::new(dim, a.rows(), b.entries(), e.rows(), f.entries()).map_err(|err| Error::Format(format!("{name}: {err}")))
    }
}

impl ProblemFile {
    fn hessians(&self, n: usize) -> Result<Option<Vec<QMatrix>>> {
        self.hessians
            .as_ref()
            .map(|hs| {
                hs.iter()
                    .enumerate()
                    .map(|(i, h)| matrix(&format!("hessians[{i}]"), h, n, n))
                    .collect()
            })
            .transpose()
    }

    /// Validates the file into a system.
    pub fn to_system(&self) -> Result<System> {
        let Dims { l, n, m } = self.dims;
        let label = self.label.clone();
        match self.kind.as_str() {
            "constraint" => {
                let m = field(m, "dims.m", "constraint")?;
                let raw = field(self.d.as_ref(), "D", "constraint")?;
                let pieces = raw
                    .pieces
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.to_polyhedron(&format!("D.pieces[{i}]"), m))
                    .collect::<Result<Vec<_>>>()?;
                let d = UnionSet::new(pieces)?;
                let jp = matrix("Jp", &self.jp, m, l)?;
                let jx = matrix("Jx", &self.jx, m, n)?;
                let g0 = vector("g0", field(self.g0.clone(), "g0", "constraint")?, m)?;
                let spec = ConstraintSystemSpec::new(label, l, n, jp, jx, g0, d, self.hessians(n)?, self.param_lipschitz)?;
                Ok(System::Constraint(spec))
            }
            "variational" => {
                if let Some(m) = m {
                    if m != n {
                        return Err(Error::Format(format!("dims.m = {m} must equal dims.n = {n} for a variational system")));
                    }
                }
                let gamma = field(self.gamma.as_ref(), "gamma", "variational")?.to_polyhedron("gamma", n)?;
                let jp = matrix("Jp", &self.jp, n, l)?;
                let jx = matrix("Jx", &self.jx, n, n)?;
                let xbar = vector("xbar", field(self.xbar.clone(), "xbar", "variational")?, n)?;
                let ybarstar = vector("ybarstar", field(self.ybarstar.clone(), "ybarstar", "variational")?, n)?;
                let spec = VariationalSystemSpec::new(label, l, jp, jx, gamma, xbar, ybarstar, self.hessians(n)?, self.param_lipschitz)?;
                Ok(System::Variational(spec))
            }
            other => Err(Error::Format(format!("kind must be \"constraint\" or \"variational\", found {other:?}"))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }
}

/// Parses and validates a problem from JSON text.
pub fn parse_problem_str(text: &str) -> Result<Problem> {
    let file: ProblemFile = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let system = file.to_system()?;
    Ok(Problem { file, system })
}

/// Reads, parses and validates a problem file.
pub fn parse_problem(path: impl AsRef<Path>) -> Result<Problem> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_problem_str(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// The bundled examples, by number.
pub fn bundled_example(number: u32) -> Option<&'static str> {
    match number {
        3 => Some(include_str!("../problems/ex3.json")),
        4 => Some(include_str!("../problems/ex4.json")),
        5 => Some(include_str!("../problems/ex5.json")),
        _ => None,
    }
}
