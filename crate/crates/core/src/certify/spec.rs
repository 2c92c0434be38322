//! Problem data for the certifiers, validated at construction.

use crate::error::{Error, Result};
use crate::graph::GraphPoint;
use crate::linalg::{QMatrix, QVector};
use crate::sets::{Polyhedron, UnionSet};

/// `S(p) = {x : G(p, x) ∈ D}` linearized at the reference point.
#[derive(Clone, Debug)]
pub struct ConstraintSystemSpec {
    pub label: String,
    pub l: usize,
    pub n: usize,
    pub m: usize,
    /// `∇_p G(p̄, x̄)`, m × l.
    pub jp: QMatrix,
    /// `∇_x G(p̄, x̄)`, m × n.
    pub jx: QMatrix,
    /// `G(p̄, x̄)`, which must lie in `D`.
    pub g0: QVector,
    pub d: UnionSet,
    /// `∇²_xx G_i(p̄, x̄)` for each component.
    pub hessians: Option<Vec<QMatrix>>,
    pub param_lipschitz: bool,
}

/// `S(p) = {x : 0 ∈ G(p, x) + N_Γ(x)}` linearized at the reference point.
#[derive(Clone, Debug)]
pub struct VariationalSystemSpec {
    pub label: String,
    pub l: usize,
    pub n: usize,
    pub jp: QMatrix,
    pub jx: QMatrix,
    pub gamma: Polyhedron,
    pub xbar: QVector,
    /// `−G(p̄, x̄)`, a normal to `Γ` at `x̄`.
    pub ybarstar: QVector,
    pub hessians: Option<Vec<QMatrix>>,
    pub param_lipschitz: bool,
}

fn check_shape(name: &str, m: &QMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.nrows() != rows || (rows > 0 && m.ncols() != cols) {
        return Err(Error::Dimension(format!(
            "{name} is {}×{} but should be {rows}×{cols}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Rebuilds a possibly empty matrix with the intended column count.
fn with_cols(m: QMatrix, cols: usize) -> QMatrix {
    if m.nrows() == 0 {
        QMatrix::zeros(0, cols)
    } else {
        m
    }
}

fn check_hessians(hessians: &Option<Vec<QMatrix>>, count: usize, n: usize) -> Result<()> {
    let Some(hs) = hessians else { return Ok(()) };
    if hs.len() != count {
        return Err(Error::InvalidSpec(format!("expected {count} hessians, found {}", hs.len())));
    }
    for (i, h) in hs.iter().enumerate() {
        check_shape(&format!("hessian {i}"), h, n, n)?;
        if !h.is_symmetric() {
            return Err(Error::InvalidSpec(format!("hessian {i} is not symmetric")));
        }
    }
    Ok(())
}

impl ConstraintSystemSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        l: usize,
        n: usize,
        jp: QMatrix,
        jx: QMatrix,
        g0: QVector,
        d: UnionSet,
        hessians: Option<Vec<QMatrix>>,
        param_lipschitz: bool,
    ) -> Result<Self> {
        let m = d.dim();
        let jp = with_cols(jp, l);
        let jx = with_cols(jx, n);
        check_shape("Jp", &jp, m, l)?;
        check_shape("Jx", &jx, m, n)?;
        if g0.dim() != m {
            return Err(Error::Dimension(format!("g0 has length {} but D lives in R^{m}", g0.dim())));
        }
        if !d.contains(&g0) {
            let why: Vec<String> = d
                .pieces()
                .iter()
                .enumerate()
                .map(|(i, p)| format!("piece {i}: {}", p.violations(&g0).join(", ")))
                .collect();
            return Err(Error::InvalidSpec(format!("g0 = {g0} is not in D ({})", why.join("; "))));
        }
        check_hessians(&hessians, m, n)?;
        Ok(ConstraintSystemSpec { label: label.into(), l, n, m, jp, jx, g0, d, hessians, param_lipschitz })
    }

    /// `[Jp | Jx]`, the Jacobian in the joint variable `(p, x)`.
    pub fn joint_jacobian(&self) -> QMatrix {
        self.jp.hstack(&self.jx)
    }

    /// `Σ v*_i ∇²G_i`.
    pub fn contracted_hessian(&self, vstar: &QVector) -> Result<QMatrix> {
        let hs = self.hessians.as_ref().ok_or(Error::MissingHessians)?;
        Ok(contract(hs, vstar, self.n))
    }
}

pub(crate) fn contract(hs: &[QMatrix], vstar: &QVector, n: usize) -> QMatrix {
    hs.iter()
        .zip(vstar.iter())
        .fold(QMatrix::zeros(n, n), |acc, (h, c)| acc.add(&h.scale(c)))
}

/// The vector with entries `uᵀ H_i u`.
pub(crate) fn second_order_term(hs: &[QMatrix], u: &QVector) -> QVector {
    QVector::new(hs.iter().map(|h| h.quadratic_form(u)).collect())
}

impl VariationalSystemSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        l: usize,
        jp: QMatrix,
        jx: QMatrix,
        gamma: Polyhedron,
        xbar: QVector,
        ybarstar: QVector,
        hessians: Option<Vec<QMatrix>>,
        param_lipschitz: bool,
    ) -> Result<Self> {
        let n = gamma.dim();
        let jp = with_cols(jp, l);
        let jx = with_cols(jx, n);
        check_shape("Jp", &jp, n, l)?;
        check_shape("Jx", &jx, n, n)?;
        if xbar.dim() != n || ybarstar.dim() != n {
            return Err(Error::Dimension(format!("xbar and ybarstar must have length {n}")));
        }
        if gamma.critical_cone(&xbar, &ybarstar).is_none() {
            return Err(Error::InvalidSpec(format!(
                "ybarstar = {ybarstar} is not a normal to gamma at xbar = {xbar}"
            )));
        }
        check_hessians(&hessians, n, n)?;
        Ok(VariationalSystemSpec {
            label: label.into(),
            l,
            n,
            jp,
            jx,
            gamma,
            xbar,
            ybarstar,
            hessians,
            param_lipschitz,
        })
    }

    pub fn graph_point(&self) -> GraphPoint {
        GraphPoint::new(self.gamma.clone(), self.xbar.clone(), self.ybarstar.clone())
            .expect("validated at construction")
    }
}

/// Either kind of parameterized system.
#[derive(Clone, Debug)]
pub enum System {
    Constraint(ConstraintSystemSpec),
    Variational(VariationalSystemSpec),
}

impl System {
    pub fn label(&self) -> &str {
        match self {
            System::Constraint(s) => &s.label,
            System::Variational(s) => &s.label,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            System::Constraint(_) => "constraint",
            System::Variational(_) => "variational",
        }
    }

    pub fn param_dim(&self) -> usize {
        match self {
            System::Constraint(s) => s.l,
            System::Variational(s) => s.l,
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            System::Constraint(s) => s.n,
            System::Variational(s) => s.n,
        }
    }
}
