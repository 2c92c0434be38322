use polyvar::certify::{
    check_aubin, check_calmness_constraint, check_calmness_polyhedral, check_directional_metric_regularity,
    check_foscms, check_foscms_joint, check_second_order_directional_subregularity, check_soscms,
    graphical_derivative_s, kind, replay_witnesses, AubinMode, ConstraintSystemSpec, Order, Status, System,
    VariationalSystemSpec,
};
use polyvar::cone::PolyCone;
use polyvar::io::{bundled_example, parse_problem_str};
use polyvar::linalg::{rat, QVector};
use polyvar::sets::Polyhedron;
use polyvar::Error;

fn v(xs: &[i64]) -> QVector {
    QVector::from_ints(xs)
}

fn system(k: u32) -> System {
    parse_problem_str(bundled_example(k).unwrap()).unwrap().system
}

fn constraint(k: u32) -> ConstraintSystemSpec {
    match system(k) {
        System::Constraint(s) => s,
        _ => unreachable!(),
    }
}

fn variational(k: u32) -> VariationalSystemSpec {
    match system(k) {
        System::Variational(s) => s,
        _ => unreachable!(),
    }
}

fn ray(xs: &[i64]) -> PolyCone {
    PolyCone::from_generators(xs.len(), &[v(xs)], &[]).unwrap()
}

#[test]
fn ex3_foscms_and_calmness() {
    let spec = constraint(3);
    let f = check_foscms(&spec).unwrap();
    assert_eq!(f.status, Status::Holds, "{f:#?}");
    let c = check_calmness_constraint(&spec, Order::First).unwrap();
    assert_eq!(c.status, Status::Holds);
    assert!(c.rates.as_ref().unwrap().linear_solvability);
    assert!(!c.rates.as_ref().unwrap().hoelder_half_solvability);
}

#[test]
fn ex3_directions_are_the_half_axis() {
    // Directions u with Jx·u ∈ T_D(0) amount to u1 >= 0, u2 = 0.
    let spec = constraint(3);
    let cert = check_foscms(&spec).unwrap();
    let dirs: Vec<&PolyCone> = cert
        .trace
        .iter()
        .flat_map(|e| e.cones.iter().filter(|c| c.name == "directions").map(|c| &c.cone))
        .collect();
    assert!(!dirs.is_empty());
    for d in dirs {
        assert!(d.subcone_of(&ray(&[1, 0])), "{d}");
    }
}

#[test]
fn ex3_aubin_fails() {
    let sys = system(3);
    let cert = check_aubin(&sys, AubinMode::Corollary, false).unwrap();
    assert_eq!(cert.status, Status::NotCertified);
    assert!(replay_witnesses(&sys, &cert).unwrap());
    // Along q = (0, -1), u = 0 the direction Jp·q + Jx·u = (0, 1, 0, 0) runs
    // into the branch z1 = 0, whose normals include v* = (2, 0, 1, 1) with
    // Jxᵀv* = 0 and q* = Jpᵀv* = (-2, 0).
    let w = &cert.witnesses[0];
    assert_eq!(w.direction, v(&[0, -1, 0, 0]));
    assert_eq!(w.dual, Some(v(&[2, 0, 1, 1])));
}

#[test]
fn ex3_directional_regularity_along_half_axis() {
    let sys = system(3);
    let cert = check_directional_metric_regularity(&sys, &v(&[1, 0]), &v(&[0, 0, 0, 0])).unwrap();
    assert_eq!(cert.status, Status::Holds, "{cert:#?}");
}

#[test]
fn ex4_foscms_fails_with_expected_witness() {
    let spec = constraint(4);
    let cert = check_foscms(&spec).unwrap();
    assert_eq!(cert.status, Status::NotCertified);
    let w = &cert.witnesses[0];
    assert_eq!(w.direction.primitive(), v(&[1, 0]));
    assert_eq!(w.dual.as_ref().unwrap().primitive(), v(&[1, 1]));
    let multipliers: Vec<&PolyCone> = cert
        .trace
        .iter()
        .flat_map(|e| e.cones.iter().filter(|c| c.name == "multipliers").map(|c| &c.cone))
        .collect();
    assert!(multipliers.iter().any(|c| c.contains(&v(&[1, 1]))));
}

#[test]
fn ex4_second_order() {
    let spec = constraint(4);
    assert_eq!(check_soscms(&spec).unwrap().status, Status::Holds);
    let c = check_calmness_constraint(&spec, Order::Second).unwrap();
    assert_eq!(c.status, Status::Holds);
    let rates = c.rates.unwrap();
    assert!(rates.hoelder_half_solvability && !rates.linear_solvability);
    let sys = System::Constraint(spec);
    let gpp = v(&[-1, -1]);
    let d = check_second_order_directional_subregularity(&sys, &v(&[1, 0]), Some(&gpp)).unwrap();
    assert_eq!(d.status, Status::Holds);
    // The same value comes out of the hessians.
    let d2 = check_second_order_directional_subregularity(&sys, &v(&[1, 0]), None).unwrap();
    assert_eq!(d2.inputs["gpp"], gpp);
}

#[test]
fn ex4_directional_regularity_is_refuted() {
    let sys = system(4);
    let cert = check_directional_metric_regularity(&sys, &v(&[1, 0]), &v(&[0, 0])).unwrap();
    assert_eq!(cert.status, Status::NotCertified);
    assert!(cert.refuted);
    assert_eq!(cert.witnesses[0].dual.as_ref().unwrap().primitive(), v(&[1, 1]));
}

#[test]
fn ex4_off_tangent_direction_is_vacuous() {
    let sys = system(4);
    // Jx·u − v = (1, -1) - (0, 0) leaves R^2_-.
    let cert = check_directional_metric_regularity(&sys, &v(&[0, 1]), &v(&[0, 0])).unwrap();
    assert_eq!(cert.status, Status::Holds);
    assert!(!cert.notes.is_empty());
}

#[test]
fn ex5_aubin_holds_with_four_direction_cases() {
    let sys = system(5);
    let cert = check_aubin(&sys, AubinMode::Corollary, false).unwrap();
    assert_eq!(cert.status, Status::Holds, "{cert:#?}");
    assert_eq!(cert.entries(kind::DIRECTION_CASE).count(), 4);
    let adj: Vec<_> = cert.entries(kind::ADJOINT_GE).collect();
    assert_eq!(adj.len(), 4);
    for e in adj {
        assert!(e.cones.iter().all(|c| c.cone.is_trivial()));
    }
    let standard = cert.entries(kind::STANDARD_ADJOINT_GE).next().unwrap();
    let mut cones: Vec<PolyCone> = standard.cones.iter().map(|c| c.cone.clone()).collect();
    cones.sort();
    let mut expected = vec![ray(&[-1, 2]), ray(&[-1, -2])];
    expected.sort();
    assert_eq!(cones, expected);
}

#[test]
fn ex5_direction_cases_match_the_hand_derivation() {
    // Cases: q <= 0 with u = (q, 0), (4q/3, -2q/3), (4q/3, 2q/3); q >= 0 with u = 0.
    let sys = system(5);
    let cert = check_aubin(&sys, AubinMode::Corollary, false).unwrap();
    let mut got: Vec<PolyCone> = cert
        .entries(kind::DIRECTION_CASE)
        .map(|e| e.cones.iter().find(|c| c.name == "directions (q, u)").unwrap().cone.clone())
        .collect();
    got.sort();
    let mut expected = vec![ray(&[-1, -1, 0]), ray(&[-3, -4, 2]), ray(&[-3, -4, -2]), ray(&[1, 0, 0])];
    expected.sort();
    assert_eq!(got, expected);
}

#[test]
fn ex5_theorem_mode_and_joint_foscms() {
    let sys = system(5);
    assert_eq!(check_foscms_joint(&sys).unwrap().status, Status::Holds);
    assert_eq!(check_aubin(&sys, AubinMode::Theorem, false).unwrap().status, Status::Holds);
}

#[test]
fn ex5_graphical_derivative_slices() {
    let sys = system(5);
    let pts = |xs: &[QVector]| -> Vec<Polyhedron> {
        let mut out: Vec<Polyhedron> = xs.iter().map(Polyhedron::point).collect();
        out.sort();
        out
    };
    let at = |q: i64| graphical_derivative_s(&sys, &v(&[q])).unwrap();
    let third = |a: i64, b: i64| QVector::new(vec![rat(a, 3), rat(b, 3)]);
    assert_eq!(at(-1), pts(&[v(&[-1, 0]), third(-4, 2), third(-4, -2)]));
    assert_eq!(at(1), pts(&[v(&[0, 0])]));
    assert!(at(0).iter().all(|p| p.contains(&v(&[0, 0]))));
}

#[test]
fn ex5_calmness_fast_path_needs_affine_data() {
    let mut spec = variational(5);
    // -x2 + x2^2 has a nonzero hessian.
    assert_eq!(check_calmness_polyhedral(&spec).unwrap().status, Status::Inconclusive);
    spec.hessians = Some(vec![polyvar::linalg::QMatrix::zeros(2, 2); 2]);
    assert_eq!(check_calmness_polyhedral(&spec).unwrap().status, Status::Holds);
    spec.param_lipschitz = false;
    assert!(matches!(check_calmness_polyhedral(&spec), Err(Error::MissingParamLipschitz(_))));
}

#[test]
fn calmness_requires_param_lipschitz() {
    let mut spec = constraint(3);
    spec.param_lipschitz = false;
    assert!(matches!(check_calmness_constraint(&spec, Order::First), Err(Error::MissingParamLipschitz(_))));
}

#[test]
fn theorem_mode_needs_evidence() {
    let sys = system(3);
    let joint = check_foscms_joint(&sys).unwrap();
    let theorem = check_aubin(&sys, AubinMode::Theorem, false);
    if joint.holds() {
        assert!(theorem.is_ok());
    } else {
        assert!(matches!(theorem, Err(Error::NoSubregularityEvidence)));
    }
    assert!(check_aubin(&sys, AubinMode::Theorem, true).is_ok());
}

#[test]
fn second_order_rejects_zero_direction() {
    let sys = system(4);
    assert!(check_second_order_directional_subregularity(&sys, &v(&[0, 0]), None).is_err());
}
