//! Brute-force sampling of directional limiting normal cones.
//!
//! These routines work straight from the definition: they evaluate regular
//! normal cones at concrete points `ȳ + t·w'` for perturbed directions `w'`
//! near `w` and small `t`, and collect the distinct cones. They share no
//! enumeration logic with [`crate::sets`] or [`crate::graph`] and exist to
//! cross-check them.

use num_traits::{One, Signed, Zero};

use crate::cone::PolyCone;
use crate::error::{Error, Result};
use crate::linalg::{int, orth_complement, span_basis, QVector, Rational};
use crate::sets::{ConeUnion, Polyhedron, UnionSet};

/// Perturbation coefficients per basis vector of a flat.
const GRID: [i64; 5] = [-2, -1, 0, 1, 2];

fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Largest `t ≤ 1` keeping every row that is not tight at `ybar` on the
/// same strict side along `ybar + t·dir`, halved once for margin.
fn step_bound(rows: &[(QVector, Rational)], ybar: &QVector, dir: &QVector) -> Rational {
    let mut t = Rational::one();
    for (a, b) in rows {
        let residual = b - a.dot(ybar);
        let rate = a.dot(dir);
        if residual.is_zero() || rate.is_zero() {
            continue;
        }
        let limit = abs(&residual) / abs(&rate);
        if limit < t {
            t = limit;
        }
    }
    t / int(2)
}

fn all_rows(p: &Polyhedron) -> Vec<(QVector, Rational)> {
    let mut rows: Vec<(QVector, Rational)> = p
        .ineq_rows()
        .iter()
        .cloned()
        .zip(p.ineq_rhs().iter().cloned())
        .collect();
    rows.extend(p.eq_rows().iter().cloned().zip(p.eq_rhs().iter().cloned()));
    rows
}

fn grid_points(k: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                GRID.iter().map(move |&g| {
                    let mut q = p.clone();
                    q.push(g);
                    q
                })
            })
            .collect();
    }
    out
}

/// Linear subspaces cut out by subsets of `hyperplanes`, each given by a
/// canonical basis of its normal space.
fn flats(dim: usize, hyperplanes: &[QVector]) -> Vec<Vec<QVector>> {
    let mut found: Vec<Vec<QVector>> = vec![Vec::new()];
    let mut i = 0;
    while i < found.len() {
        let current = found[i].clone();
        for h in hyperplanes {
            let mut rows = current.clone();
            rows.push(h.clone());
            let basis = span_basis(dim, &rows);
            if !found.contains(&basis) {
                found.push(basis);
            }
        }
        i += 1;
    }
    found
}

/// Sampled `N_D(ȳ; w)`: union of regular normal cones of `D` at points
/// `ȳ + t·w'`, where `w'` runs over a grid around `w` inside every flat of
/// the local hyperplane arrangement that contains `w`.
pub fn sample_directional_normal_cone(d: &UnionSet, ybar: &QVector, w: &QVector) -> Result<ConeUnion> {
    let dim = d.dim();
    if w.dim() != dim {
        return Err(Error::Dimension(format!("direction {w} in R^{dim}")));
    }
    let local = d.local_cones(ybar)?;
    let mut hyperplanes: Vec<QVector> = Vec::new();
    for (_, t) in &local {
        for h in t.ineqs().iter().chain(t.eqs()) {
            let h = h.primitive();
            if !hyperplanes.contains(&h) {
                hyperplanes.push(h);
            }
        }
    }
    let through_w: Vec<QVector> = hyperplanes.iter().filter(|h| h.dot(w).is_zero()).cloned().collect();
    let off_w: Vec<&QVector> = hyperplanes.iter().filter(|h| !h.dot(w).is_zero()).collect();
    let rows: Vec<(QVector, Rational)> = d.pieces().iter().flat_map(all_rows).collect();

    let mut cones: Vec<PolyCone> = Vec::new();
    for normals in flats(dim, &through_w) {
        let basis = orth_complement(dim, &normals);
        for coeffs in grid_points(basis.len()) {
            let delta = basis
                .iter()
                .zip(&coeffs)
                .fold(QVector::zeros(dim), |acc, (b, &c)| acc.axpy(&int(c), b));
            // Keep w' on the same strict side as w of every hyperplane missing w.
            let mut eps = Rational::one();
            for h in &off_w {
                let bound = abs(&h.dot(w)) / (int(2) * (abs(&h.dot(&delta)) + Rational::one()));
                if bound < eps {
                    eps = bound;
                }
            }
            let wp = w.axpy(&eps, &delta);
            let t0 = step_bound(&rows, ybar, &wp);
            for j in 1..=3 {
                let t = &t0 / int(1 << j);
                let y = ybar.axpy(&t, &wp);
                if d.contains(&y) {
                    let n = d.regular_normal_cone(&y)?;
                    if !cones.contains(&n) {
                        cones.push(n);
                    }
                }
            }
        }
    }
    Ok(ConeUnion::new(dim, cones))
}

fn rel_interior(c: &PolyCone) -> QVector {
    QVector::sum(c.dim(), c.rays().iter().chain(c.lin()))
}

/// Sampled directional limiting normal cone to the graph of `N_Γ` at
/// `(ȳ, ȳ*)` in direction `(v, v*)`. Returns the distinct cones `K` such
/// that `K° × K` is the regular normal cone `N̂(y, y*)` at some sampled graph
/// point `(ȳ + t·w, ȳ* + t·w*)`, with `K` computed directly as the critical
/// cone `T_Γ(y) ∩ [y*]^⊥` at that point.
pub fn sample_graph_normal(
    gamma: &Polyhedron,
    ybar: &QVector,
    ybarstar: &QVector,
    v: &QVector,
    vstar: &QVector,
) -> Result<Vec<PolyCone>> {
    let k = gamma.critical_cone(ybar, ybarstar).ok_or_else(|| Error::NotInSet {
        point: format!("({ybar}, {ybarstar})"),
        set: "the graph of the normal-cone map".into(),
    })?;
    let kp = k.polar();
    let in_graph = |w: &QVector, ws: &QVector| k.contains(w) && kp.contains(ws) && w.dot(ws).is_zero();
    if !in_graph(v, vstar) {
        return Err(Error::NotTangent(format!("({v}, {vstar})")));
    }
    let shifts: Vec<QVector> = k.faces().iter().map(|f| rel_interior(&f.cone)).collect();
    let dual_shifts: Vec<QVector> = kp.faces().iter().map(|f| rel_interior(&f.cone)).collect();
    let rows = all_rows(gamma);

    let mut found: Vec<PolyCone> = Vec::new();
    for s in &shifts {
        for ss in &dual_shifts {
            for eps in [Rational::new(1.into(), 2.into()), Rational::new(1.into(), 4.into())] {
                let w = v.axpy(&eps, s);
                let ws = vstar.axpy(&eps, ss);
                if !in_graph(&w, &ws) {
                    continue;
                }
                if let Some(kk) = settle(gamma, &rows, ybar, ybarstar, &w, &ws) {
                    if !found.contains(&kk) {
                        found.push(kk);
                    }
                }
            }
        }
    }
    found.sort();
    Ok(found)
}

/// Critical cone at `(ȳ + t·w, ȳ* + t·w*)` once it no longer changes as `t`
/// is halved.
fn settle(
    gamma: &Polyhedron,
    rows: &[(QVector, Rational)],
    ybar: &QVector,
    ybarstar: &QVector,
    w: &QVector,
    ws: &QVector,
) -> Option<PolyCone> {
    let mut t = step_bound(rows, ybar, w);
    let mut streak: Option<(PolyCone, usize)> = None;
    for _ in 0..64 {
        let y = ybar.axpy(&t, w);
        let ys = ybarstar.axpy(&t, ws);
        match (gamma.critical_cone(&y, &ys), streak.take()) {
            (Some(c), Some((prev, n))) if c == prev => {
                if n + 1 >= 3 {
                    return Some(c);
                }
                streak = Some((c, n + 1));
            }
            (Some(c), _) => streak = Some((c, 1)),
            (None, _) => {}
        }
        t /= int(2);
    }
    None
}
