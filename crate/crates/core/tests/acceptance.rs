//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{example, gamma_instance, random_cone, random_constraint, random_variational, rng, tangent_direction};
use polyvar::certify::{
    check_aubin, check_calmness_constraint, check_foscms, check_foscms_joint, check_second_order_directional_subregularity,
    check_soscms, kind, replay_witnesses, AubinMode, Certificate, Order, Status, System,
};
use polyvar::cone::PolyCone;
use polyvar::linalg::{rat, QVector};
use polyvar::oracle::sample_graph_normal;

/// Wall-clock limit for each of the worked examples.
const EXAMPLE_LIMIT: Duration = Duration::from_secs(1);
/// Wall-clock limit for the randomized oracle comparison.
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_INSTANCES: usize = 200;
const NEARBY_SAMPLES: usize = 200;
const LAW_INSTANCES: u64 = 80;
const RANDOM_SPECS: u64 = 15;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ray(xs: &[i64]) -> PolyCone {
    PolyCone::from_generators(xs.len(), &[QVector::from_ints(xs)], &[]).unwrap()
}

fn constraint_spec(sys: &System) -> &polyvar::certify::ConstraintSystemSpec {
    match sys {
        System::Constraint(s) => s,
        System::Variational(_) => unreachable!(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(format!("{detail}; {took:.2?}"))
}

fn ex5_faces_and_pieces() -> Outcome {
    let System::Variational(spec) = example(5) else { unreachable!() };
    let gp = spec.graph_point();
    let faces = gp.critical_cone().faces();
    ensure(faces.len() == 4, || format!("{} faces", faces.len()))?;
    let pieces = gp.limiting_normal().k_cones();
    ensure(pieces.len() == 9, || format!("{} pieces", pieces.len()))?;
    let half = rat(1, 2);
    let k4 = PolyCone::from_ineqs(2, &[QVector::new(vec![half.clone(), rat(1, 1)])], &[]).unwrap();
    let k5 = PolyCone::from_ineqs(2, &[QVector::new(vec![half, rat(-1, 1)])], &[]).unwrap();
    ensure(pieces.contains(&k4) && pieces.contains(&k5), || "K4 or K5 missing".into())?;
    Ok("4 faces, 9 pieces incl. K4, K5".into())
}

fn ex5_aubin() -> Outcome {
    let cert = check_aubin(&example(5), AubinMode::Corollary, false).map_err(|e| e.to_string())?;
    ensure(cert.status == Status::Holds, || format!("status {}", cert.status))?;
    let cases = cert.entries(kind::DIRECTION_CASE).count();
    let adjoint: Vec<_> = cert.entries(kind::ADJOINT_GE).collect();
    ensure(cases == 4 && adjoint.len() == 4, || format!("{cases} direction cases, {} adjoint GEs", adjoint.len()))?;
    ensure(adjoint.iter().all(|e| e.cones.iter().all(|c| c.cone.is_trivial())), || {
        "a directional adjoint GE has a nontrivial solution".into()
    })?;
    let mut standard: Vec<PolyCone> = cert
        .entries(kind::STANDARD_ADJOINT_GE)
        .flat_map(|e| e.cones.iter().map(|c| c.cone.clone()))
        .collect();
    standard.sort();
    let mut expected = vec![ray(&[-1, 2]), ray(&[-1, -2])];
    expected.sort();
    ensure(standard == expected, || format!("standard adjoint solutions {standard:?}"))?;
    Ok("Holds, 4 cases with trivial adjoint, standard adjoint rays (-1, 2), (-1, -2)".into())
}

fn ex3() -> Outcome {
    let sys = example(3);
    let spec = constraint_spec(&sys);
    let err = |e: polyvar::Error| e.to_string();
    let f = check_foscms(spec).map_err(err)?;
    ensure(f.status == Status::Holds, || format!("FOSCMS {}", f.status))?;
    let c = check_calmness_constraint(spec, Order::First).map_err(err)?;
    let linear = c.rates.as_ref().is_some_and(|r| r.linear_solvability);
    ensure(c.status == Status::Holds && linear, || format!("calmness {} linear {linear}", c.status))?;
    let a = check_aubin(&sys, AubinMode::Corollary, false).map_err(err)?;
    ensure(a.status == Status::NotCertified, || format!("Aubin {}", a.status))?;
    Ok("FOSCMS Holds, calm with linear solvability, Aubin NotCertified".into())
}

fn ex4() -> Outcome {
    let sys = example(4);
    let spec = constraint_spec(&sys);
    let err = |e: polyvar::Error| e.to_string();
    let f = check_foscms(spec).map_err(err)?;
    let v11 = QVector::from_ints(&[1, 1]);
    let in_witness_cone = f
        .trace
        .iter()
        .flat_map(|e| e.cones.iter())
        .any(|c| c.name == "multipliers" && c.cone.contains(&v11));
    ensure(f.status == Status::NotCertified && in_witness_cone, || format!("FOSCMS {} / witness cone", f.status))?;
    let s = check_soscms(spec).map_err(err)?;
    ensure(s.status == Status::Holds, || format!("SOSCMS {}", s.status))?;
    let c = check_calmness_constraint(spec, Order::Second).map_err(err)?;
    let hoelder = c.rates.as_ref().is_some_and(|r| r.hoelder_half_solvability);
    ensure(c.status == Status::Holds && hoelder, || format!("calmness {} hoelder {hoelder}", c.status))?;
    let d = check_second_order_directional_subregularity(&sys, &QVector::from_ints(&[1, 0]), Some(&QVector::from_ints(&[-1, -1])))
        .map_err(err)?;
    ensure(d.status == Status::Holds, || format!("dir-subreg {}", d.status))?;
    Ok("FOSCMS NotCertified with v* = (1, 1), SOSCMS Holds, Hoelder-1/2 calm, dir-subreg Holds".into())
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rng(0x5eed_0005);
    let (mut pieces, mut multi) = (0, 0);
    for i in 0..ORACLE_INSTANCES {
        let inst = gamma_instance(&mut rng);
        let gp = inst.graph_point();
        let (v, vs) = tangent_direction(&mut rng, &gp);
        let exact = gp.directional_limiting_normal(&v, &vs).map_err(|e| format!("instance {i}: {e}"))?.k_cones();
        let sampled = sample_graph_normal(&inst.gamma, &inst.ybar, &inst.ybarstar, &v, &vs).map_err(|e| format!("instance {i}: {e}"))?;
        let covered = |a: &[PolyCone], b: &[PolyCone]| a.iter().all(|k| b.contains(k));
        ensure(covered(&exact, &sampled) && covered(&sampled, &exact), || {
            format!(
                "instance {i}: Γ = {:?} at ({}, {}) direction ({v}, {vs}): closed form {exact:?} vs sampled {sampled:?}",
                inst.gamma, inst.ybar, inst.ybarstar
            )
        })?;
        pieces += exact.len();
        multi += usize::from(exact.len() > 1);
    }
    Ok(format!("{ORACLE_INSTANCES} instances, {pieces} pieces, {multi} instances with several pieces"))
}

/// Largest `s = 2^-j` keeping `(ȳ + s·w, ȳ* + s·w*)` in the region where the
/// graph of `N_Γ` is a translate of the graph of `N_K`: no new active rows,
/// and `ȳ*` stays in the minimal face of `y*` in `N_Γ(ȳ)`.
fn local_scale(inst: &common::GammaInstance, w: &QVector, ws: &QVector) -> QVector {
    let active = inst.gamma.active_rows(&inst.ybar);
    let normal = inst.gamma.normal_cone(&inst.ybar).unwrap();
    let mut s = rat(1, 1);
    for _ in 0..40 {
        let y = inst.ybar.axpy(&s, w);
        let ys = inst.ybarstar.axpy(&s, ws);
        let primal = inst.gamma.contains(&y) && inst.gamma.active_rows(&y).iter().all(|r| active.contains(r));
        if primal && normal.contains(&ys) && normal.minimal_face(&ys).contains(&inst.ybarstar) {
            return QVector::new(vec![s]);
        }
        s /= rat(2, 1);
    }
    panic!("no local scale for ({w}, {ws})");
}

fn nearby_critical_cones() -> Outcome {
    let mut rng = rng(0x5eed_0006);
    let mut samples = 0;
    let mut instance = 0;
    while samples < NEARBY_SAMPLES {
        let inst = gamma_instance(&mut rng);
        let gp = inst.graph_point();
        for _ in 0..3 {
            let (w, ws) = tangent_direction(&mut rng, &gp);
            let s = local_scale(&inst, &w, &ws)[0].clone();
            for t in [rat(1, 1), rat(1, 2), rat(1, 4)] {
                let y = inst.ybar.axpy(&(&s * &t), &w);
                let ys = inst.ybarstar.axpy(&(&s * &t), &ws);
                let direct = inst.gamma.critical_cone(&y, &ys);
                let nearby = inst.gamma.nearby_critical_cone(&inst.ybar, &inst.ybarstar, &y, &ys).map_err(|e| e.to_string())?;
                ensure(direct.is_some(), || format!("instance {instance}: ({y}, {ys}) left the graph"))?;
                ensure(direct == nearby, || {
                    format!("instance {instance}: at ({y}, {ys}) direct {direct:?} vs lemma {nearby:?}")
                })?;
                samples += 1;
            }
        }
        instance += 1;
    }
    Ok(format!("{samples} nearby graph points over {instance} instances"))
}

fn cone_laws() -> Outcome {
    let mut rng = rng(0x5eed_0007);
    let mut cones_checked = 0;
    for i in 0..LAW_INSTANCES {
        let inst = gamma_instance(&mut rng);
        let gp = inst.graph_point();
        let dim = inst.gamma.dim();
        let corpus = [
            gp.critical_cone().clone(),
            inst.gamma.tangent_cone(&inst.ybar).unwrap(),
            inst.gamma.normal_cone(&inst.ybar).unwrap(),
            random_cone(&mut rng, dim, 4),
            random_cone(&mut rng, dim, 4),
        ];
        for c in &corpus {
            ensure(&c.polar().polar() == c, || format!("instance {i}: polar involution fails for {c}"))?;
            let faces = c.faces();
            for f in &faces {
                for g in &faces {
                    let meet = f.cone.intersect(&g.cone);
                    ensure(faces.iter().any(|h| h.cone == meet), || format!("instance {i}: faces of {c} not closed under ∩"))?;
                }
            }
            cones_checked += 1;
        }
        for a in &corpus {
            for b in &corpus {
                ensure(a.intersect(b).polar() == a.polar().minkowski_sum(&b.polar()), || {
                    format!("instance {i}: (A ∩ B)° ≠ A° + B° for A = {a}, B = {b}")
                })?;
                ensure(a.minkowski_sum(b).polar() == a.polar().intersect(&b.polar()), || {
                    format!("instance {i}: (A + B)° ≠ A° ∩ B° for A = {a}, B = {b}")
                })?;
            }
        }
        let zero = QVector::zeros(dim);
        let collapsed = gp.directional_limiting_normal(&zero, &zero).map_err(|e| e.to_string())?;
        ensure(collapsed == gp.limiting_normal(), || format!("instance {i}: zero direction differs from the limiting cone"))?;
    }
    Ok(format!("{cones_checked} cones over {LAW_INSTANCES} instances"))
}

fn replay_all(sys: &System, certs: &[&Certificate]) -> Result<usize, String> {
    let mut replayed = 0;
    for c in certs {
        if c.status == Status::NotCertified {
            let ok = replay_witnesses(sys, c).map_err(|e| e.to_string())?;
            ensure(ok && !c.witnesses.is_empty(), || format!("{} witness does not replay", c.check))?;
            replayed += c.witnesses.len();
        }
    }
    Ok(replayed)
}

fn metamorphic_laws() -> Outcome {
    let mut rng = rng(0x5eed_0008);
    let mut corpus: Vec<(String, System)> = [3, 4, 5].into_iter().map(|k| (format!("example {k}"), example(k))).collect();
    for i in 0..RANDOM_SPECS {
        corpus.push((format!("random constraint {i}"), random_constraint(&mut rng)));
        corpus.push((format!("random variational {i}"), random_variational(&mut rng)));
    }
    let mut replayed = 0;
    for (name, sys) in &corpus {
        let err = |e: polyvar::Error| format!("{name}: {e}");
        let mut certs: Vec<Certificate> = Vec::new();
        if let System::Constraint(spec) = sys {
            let f = check_foscms(spec).map_err(err)?;
            let s = check_soscms(spec).map_err(err)?;
            ensure(!f.holds() || s.holds(), || format!("{name}: FOSCMS holds but SOSCMS is {}", s.status))?;
            certs.extend([f, s]);
        }
        let joint = check_foscms_joint(sys).map_err(err)?;
        let corollary = check_aubin(sys, AubinMode::Corollary, false).map_err(err)?;
        let theorem = check_aubin(sys, AubinMode::Theorem, !joint.holds()).map_err(err)?;
        ensure(!corollary.holds() || theorem.holds(), || format!("{name}: corollary holds but theorem is {}", theorem.status))?;
        certs.extend([joint, corollary, theorem]);
        replayed += replay_all(sys, &certs.iter().collect::<Vec<_>>()).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} specs, {replayed} witnesses replayed", corpus.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 Example 5 faces and graph normal pieces", Box::new(|| timed(EXAMPLE_LIMIT, ex5_faces_and_pieces))),
        ("2 Example 5 Aubin property", Box::new(|| timed(EXAMPLE_LIMIT, ex5_aubin))),
        ("3 Example 3 calmness and Aubin failure", Box::new(|| timed(EXAMPLE_LIMIT, ex3))),
        ("4 Example 4 second-order conditions", Box::new(|| timed(EXAMPLE_LIMIT, ex4))),
        ("5 graph normal cone vs sampling oracle", Box::new(|| timed(ORACLE_LIMIT, oracle_equivalence))),
        ("6 nearby critical cones", Box::new(nearby_critical_cones)),
        ("7 cone algebra laws", Box::new(cone_laws)),
        ("8 metamorphic certifier laws", Box::new(metamorphic_laws)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name} ({detail})"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
