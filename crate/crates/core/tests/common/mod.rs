//! Seeded random instances shared by the property and acceptance tests.

#![allow(dead_code)]

use polyvar::certify::{ConstraintSystemSpec, System, VariationalSystemSpec};
use polyvar::cone::PolyCone;
use polyvar::graph::GraphPoint;
use polyvar::io::{bundled_example, parse_problem_str};
use polyvar::linalg::{int, QMatrix, QVector};
use polyvar::sets::{Polyhedron, UnionSet};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int_vector(rng: &mut ChaCha8Rng, dim: usize, lo: i64, hi: i64) -> QVector {
    QVector::from_ints(&(0..dim).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<_>>())
}

fn nonzero_vector(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> QVector {
    loop {
        let v = int_vector(rng, dim, -bound, bound);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> QMatrix {
    QMatrix::from_rows((0..rows).map(|_| int_vector(rng, cols, -bound, bound)).collect(), cols)
}

pub fn symmetric(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> QMatrix {
    let a = int_matrix(rng, n, n, bound);
    a.add(&a.transpose())
}

/// A random element of `c`: nonnegative combination of the rays plus any
/// combination of the lineality basis.
pub fn cone_element(rng: &mut ChaCha8Rng, c: &PolyCone) -> QVector {
    let mut z = QVector::zeros(c.dim());
    for r in c.rays() {
        z = z.axpy(&int(rng.gen_range(0..=3)), r);
    }
    for l in c.lin() {
        z = z.axpy(&int(rng.gen_range(-2..=2)), l);
    }
    z
}

/// A random cone in `R^dim` from up to `gens` integer generators.
pub fn random_cone(rng: &mut ChaCha8Rng, dim: usize, gens: usize) -> PolyCone {
    let k = rng.gen_range(0..=gens);
    let rays: Vec<QVector> = (0..k).map(|_| nonzero_vector(rng, dim, 3)).collect();
    PolyCone::from_generators(dim, &rays, &[]).expect("generators have the right length")
}

/// A random polyhedron `Γ` with a reference pair `(ȳ, ȳ*)` in the graph of
/// its normal-cone map.
pub struct GammaInstance {
    pub gamma: Polyhedron,
    pub ybar: QVector,
    pub ybarstar: QVector,
}

impl GammaInstance {
    pub fn graph_point(&self) -> GraphPoint {
        GraphPoint::new(self.gamma.clone(), self.ybar.clone(), self.ybarstar.clone()).expect("reference pair is on the graph")
    }
}

/// `Γ` in dimension 2 or 3 with at most 6 facets. Between one and all of the
/// rows are active at `ȳ`.
pub fn gamma_instance(rng: &mut ChaCha8Rng) -> GammaInstance {
    let dim = rng.gen_range(2..=3);
    let facets = rng.gen_range(1..=6);
    let active = rng.gen_range(1..=facets);
    let ybar = int_vector(rng, dim, -2, 2);
    let rows: Vec<QVector> = (0..facets).map(|_| nonzero_vector(rng, dim, 3)).collect();
    let rhs: Vec<_> = rows
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let slack = if i < active { 0 } else { rng.gen_range(1..=3) };
            a.dot(&ybar) + int(slack)
        })
        .collect();
    let gamma = Polyhedron::new(dim, &rows, &rhs, &[], &[]).expect("ȳ lies in Γ");
    let normal = gamma.normal_cone(&ybar).expect("ȳ lies in Γ");
    let ybarstar = cone_element(rng, &normal);
    GammaInstance { gamma, ybar, ybarstar }
}

/// A random direction `(v, v*)` in the graph tangent: `v` in a face `F` of the
/// critical cone `K`, `v*` in `K° ∩ F^⊥`. Either half is zeroed with
/// probability 1/3 each so that degenerate directions, which have the most
/// pieces, show up often.
pub fn tangent_direction(rng: &mut ChaCha8Rng, gp: &GraphPoint) -> (QVector, QVector) {
    let k = gp.critical_cone();
    let faces = k.faces();
    let f = &faces[rng.gen_range(0..faces.len())];
    let dual = k.polar().with_constraints(&[], &f.cone.all_generators());
    let (mut v, mut vs) = (cone_element(rng, &f.cone), cone_element(rng, &dual));
    if rng.gen_bool(1.0 / 3.0) {
        v = QVector::zeros(k.dim());
    }
    if rng.gen_bool(1.0 / 3.0) {
        vs = QVector::zeros(k.dim());
    }
    (v, vs)
}

pub fn random_variational(rng: &mut ChaCha8Rng) -> System {
    let inst = gamma_instance(rng);
    let n = inst.gamma.dim();
    let l = rng.gen_range(1..=2);
    let jp = int_matrix(rng, n, l, 2);
    let jx = int_matrix(rng, n, n, 2);
    let hessians = (0..n).map(|_| symmetric(rng, n, 1)).collect();
    let spec = VariationalSystemSpec::new("random", l, jp, jx, inst.gamma, inst.ybar, inst.ybarstar, Some(hessians), true)
        .expect("random variational spec is valid");
    System::Variational(spec)
}

/// Constraint system with `D` a union of one or two polyhedral cones in
/// `R^m`, `m` in 2..=3, `n = 2`, and `g0 = 0`.
pub fn random_constraint(rng: &mut ChaCha8Rng) -> System {
    loop {
        let m = rng.gen_range(2..=3);
        let n = 2;
        let l = rng.gen_range(1..=2);
        let npieces = rng.gen_range(1..=2);
        let pieces: Vec<Polyhedron> = (0..npieces)
            .map(|_| {
                let k = rng.gen_range(1..=m);
                let rows: Vec<QVector> = (0..k).map(|_| nonzero_vector(rng, m, 2)).collect();
                let zeros = vec![int(0); k];
                Polyhedron::new(m, &rows, &zeros, &[], &[]).expect("0 lies in every cone")
            })
            .collect();
        let Ok(d) = UnionSet::new(pieces) else { continue };
        let jp = int_matrix(rng, m, l, 2);
        let jx = int_matrix(rng, m, n, 2);
        let hessians = (0..m).map(|_| symmetric(rng, n, 1)).collect();
        if let Ok(spec) = ConstraintSystemSpec::new("random", l, n, jp, jx, QVector::zeros(m), d, Some(hessians), true) {
            return System::Constraint(spec);
        }
    }
}

pub fn example(k: u32) -> System {
    parse_problem_str(bundled_example(k).unwrap()).unwrap().system
}
