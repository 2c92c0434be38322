//! Command dispatch and report rendering for the `polyvar` binary.
//!
//! [`run_command`] never prints or exits; it returns the exit code and the
//! report text so that it can be driven from tests.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use polyvar::certify::{
    check_aubin, run_check, AubinMode, Certificate, Status, System, TraceEntry,
};
use polyvar::cone::PolyCone;
use polyvar::graph::{GraphNormalCone, GraphPoint};
use polyvar::io::{bundled_example, parse_problem, parse_problem_str, Problem};
use polyvar::linalg::QVector;
use polyvar::oracle::{sample_directional_normal_cone, sample_graph_normal};
use polyvar::sets::ConeUnion;
use polyvar::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "polyvar", version, about = "Exact polyhedral variational analysis and stability certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tangent, normal and critical cones of the problem's set at a point.
    Cones {
        file: String,
        /// Point of the set (default: the reference point).
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Normal vector for the critical cone.
        #[arg(long, allow_hyphen_values = true)]
        ystar: Option<String>,
    },
    /// Normal cones to the graph of the normal-cone map at the reference pair.
    GraphNormal {
        file: String,
        /// Direction `v;vstar`, or the 2n entries of `(v, v*)` separated by commas.
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
        #[arg(long, conflicts_with = "regular")]
        limiting: bool,
        #[arg(long)]
        regular: bool,
    },
    /// Runs one stability check.
    Certify {
        file: String,
        #[arg(long, value_enum)]
        check: CheckName,
        /// Direction u for dir-reg and dir-subreg.
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
        /// Image direction v for dir-reg (default 0).
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        /// Second-order term G''(x; u) for dir-subreg (default: from the hessians).
        #[arg(long, allow_hyphen_values = true)]
        gpp: Option<String>,
        /// Take metric subregularity of the joint map as given (aubin-theorem).
        #[arg(long)]
        assume_subregular: bool,
    },
    /// Reproduces the bundled examples and compares with the expected results.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Compares closed-form directional normal cones with the sampling oracle.
    Oracle {
        file: String,
        /// Direction: `w` for constraint files, `v;vstar` for variational ones.
        /// Without it a default set of directions is checked.
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ExamplesAction {
    /// Runs example 3, 4 or 5.
    Run { number: u32 },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckName {
    Foscms,
    Soscms,
    Calmness,
    Calmness2,
    Aubin,
    AubinTheorem,
    FoscmsJoint,
    DirReg,
    DirSubreg,
}

impl CheckName {
    fn as_str(self) -> &'static str {
        match self {
            CheckName::Foscms => "foscms",
            CheckName::Soscms => "soscms",
            CheckName::Calmness => "calmness",
            CheckName::Calmness2 => "calmness2",
            CheckName::Aubin => "aubin",
            CheckName::AubinTheorem => "aubin-theorem",
            CheckName::FoscmsJoint => "foscms-joint",
            CheckName::DirReg => "dir-reg",
            CheckName::DirSubreg => "dir-subreg",
        }
    }
}

/// How much of a certificate's trace is rendered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceLevel {
    Full,
    Summary,
    Off,
}

impl TraceLevel {
    /// Reads `POLYVAR_TRACE`; unknown values fall back to `summary`.
    pub fn from_env() -> Self {
        match std::env::var("POLYVAR_TRACE").as_deref() {
            Ok("full") => TraceLevel::Full,
            Ok("off") => TraceLevel::Off,
            _ => TraceLevel::Summary,
        }
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Holds => EXIT_OK,
        Status::NotCertified => EXIT_FAILED,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_command_with(argv, TraceLevel::from_env())
}

pub fn run_command_with<I, T>(argv: I, level: TraceLevel) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    match dispatch(cli.command, level) {
        Ok(out) => out,
        Err(e) => (EXIT_USAGE, format!("error: {e}\n")),
    }
}

fn dispatch(cmd: Command, level: TraceLevel) -> Result<(i32, String), Error> {
    match cmd {
        Command::Cones { file, at, ystar } => cones(&parse_problem(&file)?, at.as_deref(), ystar.as_deref()),
        Command::GraphNormal { file, dir, limiting: _, regular } => graph_normal(&parse_problem(&file)?, dir.as_deref(), regular),
        Command::Certify { file, check, dir, v, gpp, assume_subregular } => {
            let problem = parse_problem(&file)?;
            let parse = |s: Option<String>| s.map(|s| QVector::parse(&s)).transpose();
            let (u, v, gpp) = (parse(dir)?, parse(v)?, parse(gpp)?);
            let cert = run_check(&problem.system, check.as_str(), u.as_ref(), v.as_ref(), gpp.as_ref(), assume_subregular)?;
            let mut out = String::new();
            render_header(&mut out, &problem);
            render_certificate(&mut out, &cert, level);
            render_json(&mut out, &[&cert]);
            Ok((exit_code(cert.status), out))
        }
        Command::Examples { action: ExamplesAction::Run { number } } => run_example(number, level),
        Command::Oracle { file, dir } => oracle(&parse_problem(&file)?, dir.as_deref()),
    }
}

fn render_header(out: &mut String, p: &Problem) {
    let sys = &p.system;
    let label = if sys.label().is_empty() { "(unlabelled)" } else { sys.label() };
    let _ = writeln!(out, "problem: {label} [{} system, l = {}, n = {}]", sys.kind(), sys.param_dim(), sys.state_dim());
}

fn render_trace_entry(out: &mut String, e: &TraceEntry, level: TraceLevel) {
    let _ = writeln!(out, "  [{}] {}: {}", e.kind, e.label, e.verdict);
    if level == TraceLevel::Full {
        for c in &e.cones {
            let _ = writeln!(out, "      {} = {}", c.name, c.cone);
        }
    }
}

pub fn render_certificate(out: &mut String, cert: &Certificate, level: TraceLevel) {
    let refuted = if cert.refuted { " (refuted: the criterion is exact)" } else { "" };
    let _ = writeln!(out, "check {}: {}{refuted}", cert.check, cert.status);
    for (k, v) in &cert.inputs {
        let _ = writeln!(out, "  input {k} = {v}");
    }
    if level != TraceLevel::Off {
        for e in &cert.trace {
            render_trace_entry(out, e, level);
        }
    }
    for w in &cert.witnesses {
        match &w.dual {
            Some(d) => {
                let _ = writeln!(out, "  witness [{}]: direction {}, v* = {}", w.stratum, w.direction, d);
            }
            None => {
                let _ = writeln!(out, "  witness [{}]: no solution u for q = {}", w.stratum, w.direction);
            }
        }
    }
    if let Some(r) = &cert.rates {
        let _ = writeln!(
            out,
            "  solvability: linear = {}, hoelder-1/2 = {}",
            r.linear_solvability, r.hoelder_half_solvability
        );
    }
    for n in &cert.notes {
        let _ = writeln!(out, "  note: {n}");
    }
}

/// Appends the machine-readable block: a JSON array of certificates.
pub fn render_json(out: &mut String, certs: &[&Certificate]) {
    out.push_str("--- json ---\n");
    out.push_str(&serde_json::to_string_pretty(certs).expect("certificates serialize"));
    out.push('\n');
}

/// Extracts the certificates from a report's JSON block.
pub fn parse_json_block(report: &str) -> Option<Vec<Certificate>> {
    let (_, json) = report.split_once("--- json ---\n")?;
    serde_json::from_str(json).ok()
}

fn union_text(u: &ConeUnion) -> String {
    if u.is_empty() {
        return "∅".into();
    }
    u.pieces().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ∪ ")
}

fn cones(p: &Problem, at: Option<&str>, ystar: Option<&str>) -> Result<(i32, String), Error> {
    let mut out = String::new();
    render_header(&mut out, p);
    let at = at.map(QVector::parse).transpose()?;
    let ystar = ystar.map(QVector::parse).transpose()?;
    match &p.system {
        System::Constraint(s) => {
            let y = at.unwrap_or_else(|| s.g0.clone());
            let t = s.d.tangent_cone(&y)?;
            let _ = writeln!(out, "point y = {y}");
            let _ = writeln!(out, "tangent cone T_D(y) = {}", union_text(&t));
            let _ = writeln!(out, "regular normal cone = {}", s.d.regular_normal_cone(&y)?);
            let _ = writeln!(out, "limiting normal cone = {}", union_text(&s.d.limiting_normal_cone(&y)?));
            if let Some(ys) = ystar {
                if !s.d.regular_normal_cone(&y)?.contains(&ys) {
                    return Err(Error::NotInSet { point: ys.to_string(), set: "the regular normal cone at y".into() });
                }
                let k = ConeUnion::new(y.dim(), t.pieces().iter().map(|c| c.orth_slice(&ys)));
                let _ = writeln!(out, "critical cone T_D(y) ∩ [y*]^⊥ = {}", union_text(&k));
            }
        }
        System::Variational(s) => {
            let y = at.unwrap_or_else(|| s.xbar.clone());
            let _ = writeln!(out, "point y = {y}");
            let _ = writeln!(out, "tangent cone T_Γ(y) = {}", s.gamma.tangent_cone(&y)?);
            let _ = writeln!(out, "normal cone N_Γ(y) = {}", s.gamma.normal_cone(&y)?);
            let ys = ystar.or_else(|| (y == s.xbar).then(|| s.ybarstar.clone()));
            if let Some(ys) = ys {
                let k = s.gamma.critical_cone(&y, &ys).ok_or_else(|| Error::NotInSet {
                    point: ys.to_string(),
                    set: "the normal cone at y".into(),
                })?;
                let _ = writeln!(out, "critical cone K(y, y*) with y* = {ys}: {k}");
            }
        }
    }
    Ok((EXIT_OK, out))
}

fn variational_point(p: &Problem) -> Result<GraphPoint, Error> {
    match &p.system {
        System::Variational(s) => Ok(s.graph_point()),
        System::Constraint(_) => Err(Error::InvalidSpec("this command needs a variational problem (with gamma)".into())),
    }
}

/// `v;vstar`, or `2n` comma-separated entries split in half.
fn parse_pair(s: &str, n: usize) -> Result<(QVector, QVector), Error> {
    if let Some((a, b)) = s.split_once(';') {
        return Ok((QVector::parse(a)?, QVector::parse(b)?));
    }
    let all = QVector::parse(s)?;
    if all.dim() != 2 * n {
        return Err(Error::Dimension(format!("--dir needs 2·{n} entries or the form v;vstar, got {}", all.dim())));
    }
    Ok((all.slice(0..n), all.slice(n..2 * n)))
}

fn graph_text(g: &GraphNormalCone) -> String {
    format!("{} piece(s)\n{g}", g.len())
}

fn graph_normal(p: &Problem, dir: Option<&str>, regular: bool) -> Result<(i32, String), Error> {
    let gp = variational_point(p)?;
    let mut out = String::new();
    render_header(&mut out, p);
    let _ = writeln!(out, "critical cone K = {}", gp.critical_cone());
    let faces = gp.critical_cone().faces();
    let _ = writeln!(out, "faces of K ({}):", faces.len());
    for f in &faces {
        let _ = writeln!(out, "  {:?}: {}", f.id.active_set, f.cone);
    }
    let g = match (dir, regular) {
        (Some(d), _) => {
            let (v, vs) = parse_pair(d, gp.critical_cone().dim())?;
            let _ = writeln!(out, "directional limiting normal cone in direction ({v}, {vs}):");
            gp.directional_limiting_normal(&v, &vs)?
        }
        (None, true) => {
            let _ = writeln!(out, "regular normal cone:");
            gp.regular_normal()
        }
        (None, false) => {
            let _ = writeln!(out, "limiting normal cone:");
            gp.limiting_normal()
        }
    };
    out.push_str(&graph_text(&g));
    out.push_str("--- json ---\n");
    out.push_str(&serde_json::to_string_pretty(&g).expect("graph normal cones serialize"));
    out.push('\n');
    Ok((EXIT_OK, out))
}

fn rel_interior(c: &PolyCone) -> QVector {
    QVector::sum(c.dim(), c.rays().iter().chain(c.lin()))
}

fn oracle(p: &Problem, dir: Option<&str>) -> Result<(i32, String), Error> {
    let mut out = String::new();
    render_header(&mut out, p);
    let mut mismatches = 0;
    match &p.system {
        System::Constraint(s) => {
            let dirs: Vec<QVector> = match dir {
                Some(d) => vec![QVector::parse(d)?],
                None => {
                    let mut ds = vec![QVector::zeros(s.m)];
                    for st in s.d.direction_strata(&s.g0)? {
                        let w = rel_interior(&st.closure);
                        if !ds.contains(&w) {
                            ds.push(w);
                        }
                    }
                    ds
                }
            };
            for w in dirs {
                let exact = s.d.directional_normal_cone(&s.g0, &w)?;
                let sampled = sample_directional_normal_cone(&s.d, &s.g0, &w)?;
                let ok = exact == sampled;
                mismatches += usize::from(!ok);
                let _ = writeln!(out, "w = {w}: {}", if ok { "match" } else { "MISMATCH" });
                let _ = writeln!(out, "  closed form: {}", union_text(&exact));
                if !ok {
                    let _ = writeln!(out, "  sampled:     {}", union_text(&sampled));
                }
            }
        }
        System::Variational(s) => {
            let gp = s.graph_point();
            let k = gp.critical_cone().clone();
            let dirs: Vec<(QVector, QVector)> = match dir {
                Some(d) => vec![parse_pair(d, s.n)?],
                None => {
                    let kp = k.polar();
                    let mut ds = vec![(QVector::zeros(s.n), QVector::zeros(s.n))];
                    for f in k.faces() {
                        let dual = kp.with_constraints(&[], &f.cone.all_generators());
                        let pair = (rel_interior(&f.cone), rel_interior(&dual));
                        if !ds.contains(&pair) {
                            ds.push(pair);
                        }
                    }
                    ds
                }
            };
            for (v, vs) in dirs {
                let exact = gp.directional_limiting_normal(&v, &vs)?.k_cones();
                let sampled = sample_graph_normal(&s.gamma, &s.xbar, &s.ybarstar, &v, &vs)?;
                let ok = exact == sampled;
                mismatches += usize::from(!ok);
                let _ = writeln!(out, "(v, v*) = ({v}, {vs}): {} ({} piece(s))", if ok { "match" } else { "MISMATCH" }, exact.len());
                let list = |ks: &[PolyCone]| ks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | ");
                let _ = writeln!(out, "  closed form K: {}", list(&exact));
                if !ok {
                    let _ = writeln!(out, "  sampled K:     {}", list(&sampled));
                }
            }
        }
    }
    let code = if mismatches == 0 { EXIT_OK } else { EXIT_FAILED };
    let _ = writeln!(out, "{}", if mismatches == 0 { "oracle agrees".to_string() } else { format!("{mismatches} mismatch(es)") });
    Ok((code, out))
}

/// An expected fact about an example, checked against the computed results.
struct Expectation {
    what: &'static str,
    ok: bool,
}

fn expect(what: &'static str, ok: bool) -> Expectation {
    Expectation { what, ok }
}

fn ray(xs: &[i64]) -> PolyCone {
    PolyCone::from_generators(xs.len(), &[QVector::from_ints(xs)], &[]).expect("a ray")
}

fn run_example(number: u32, level: TraceLevel) -> Result<(i32, String), Error> {
    let text = bundled_example(number)
        .ok_or_else(|| Error::InvalidSpec(format!("no bundled example {number}; choose 3, 4 or 5")))?;
    let problem = parse_problem_str(text)?;
    let sys = &problem.system;
    let mut out = String::new();
    render_header(&mut out, &problem);
    let run = |check: &str, u: Option<&QVector>, gpp: Option<&QVector>| run_check(sys, check, u, None, gpp, false);
    let mut certs: Vec<Certificate> = Vec::new();
    let mut facts: Vec<Expectation> = Vec::new();
    let summary;
    match number {
        3 => {
            let f = run("foscms", None, None)?;
            let c = run("calmness", None, None)?;
            let a = run("aubin", None, None)?;
            let linear = c.rates.as_ref().is_some_and(|r| r.linear_solvability);
            facts.push(expect("FOSCMS holds", f.status == Status::Holds));
            facts.push(expect("S is calm", c.status == Status::Holds));
            facts.push(expect("linear solvability bound", linear));
            facts.push(expect("Aubin criterion fails", a.status == Status::NotCertified));
            summary = "calm + linear solvability; no Aubin property";
            certs.extend([f, c, a]);
        }
        4 => {
            let f = run("foscms", None, None)?;
            let s = run("soscms", None, None)?;
            let c = run("calmness2", None, None)?;
            let u = QVector::from_ints(&[1, 0]);
            let gpp = QVector::from_ints(&[-1, -1]);
            let d = run("dir-subreg", Some(&u), Some(&gpp))?;
            let witness = f.witnesses.iter().any(|w| {
                w.direction.primitive() == u && w.dual.as_ref().is_some_and(|d| d.primitive() == QVector::from_ints(&[1, 1]))
            });
            facts.push(expect("FOSCMS fails", f.status == Status::NotCertified));
            facts.push(expect("FOSCMS witness u = (1, 0), v* = (1, 1)", witness));
            facts.push(expect("SOSCMS holds", s.status == Status::Holds));
            facts.push(expect("S is calm", c.status == Status::Holds));
            facts.push(expect("Hoelder-1/2 solvability bound", c.rates.as_ref().is_some_and(|r| r.hoelder_half_solvability)));
            facts.push(expect("directional subregularity in u = (1, 0)", d.status == Status::Holds));
            summary = "calm + Hoelder-1/2 solvability";
            certs.extend([f, s, c, d]);
        }
        5 => {
            let gp = match sys {
                System::Variational(s) => s.graph_point(),
                System::Constraint(_) => unreachable!("example 5 is variational"),
            };
            let a = check_aubin(sys, AubinMode::Corollary, false)?;
            let cases = a.entries(polyvar::certify::kind::DIRECTION_CASE).count();
            let trivial = a
                .entries(polyvar::certify::kind::ADJOINT_GE)
                .all(|e| e.cones.iter().all(|c| c.cone.is_trivial()));
            let adjoint_count = a.entries(polyvar::certify::kind::ADJOINT_GE).count();
            let mut standard: Vec<PolyCone> = a
                .entries(polyvar::certify::kind::STANDARD_ADJOINT_GE)
                .flat_map(|e| e.cones.iter().map(|c| c.cone.clone()))
                .collect();
            standard.sort();
            let mut expected = vec![ray(&[-1, 2]), ray(&[-1, -2])];
            expected.sort();
            let limiting = gp.limiting_normal();
            let k4 = PolyCone::from_ineqs(2, &[QVector::from_ints(&[1, 2])], &[])?;
            let k5 = PolyCone::from_ineqs(2, &[QVector::from_ints(&[1, -2])], &[])?;
            facts.push(expect("critical cone has 4 faces", gp.critical_cone().faces().len() == 4));
            facts.push(expect("limiting normal cone has 9 pieces", limiting.len() == 9));
            facts.push(expect(
                "pieces include {½v1 + v2 ≤ 0} and {½v1 − v2 ≤ 0}",
                limiting.k_cones().contains(&k4) && limiting.k_cones().contains(&k5),
            ));
            facts.push(expect("Aubin property holds", a.status == Status::Holds));
            facts.push(expect("four direction cases", cases == 4 && adjoint_count == 4));
            facts.push(expect("every directional adjoint GE has only v* = 0", trivial));
            facts.push(expect("standard adjoint GE solved by (−1, 2) and (−1, −2)", standard == expected));
            summary = "Aubin property via the directional criterion; the standard criterion fails";
            certs.push(a);
        }
        _ => unreachable!(),
    }
    for c in &certs {
        render_certificate(&mut out, c, level);
    }
    let mut all = true;
    out.push_str("expected results:\n");
    for f in &facts {
        all &= f.ok;
        let _ = writeln!(out, "  {} {}", if f.ok { "ok  " } else { "DIFF" }, f.what);
    }
    let _ = writeln!(out, "example {number}: {}", if all { summary.to_string() } else { "differs from the expected results".into() });
    render_json(&mut out, &certs.iter().collect::<Vec<_>>());
    Ok((if all { EXIT_OK } else { EXIT_FAILED }, out))
}
