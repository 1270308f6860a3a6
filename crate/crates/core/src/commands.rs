//! The command-line pipeline as library functions: each command takes file
//! contents and returns a text report ending in `KEY=VALUE` summary lines.

use std::fmt::Write as _;

use crate::algebra::{FiniteAlgebra, Limits};
use crate::boxmap::{self, BoxmapReport, Coordinatization};
use crate::congruence::{self, Congruence, TcVerdict};
use crate::error::{Error, Result};
use crate::format;
use crate::interp;
use crate::sorted::{self, FlatAlgebra};
use crate::termset::{self, UnaryVerdict};

/// Exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Mismatch,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: String,
    pub status: Status,
}

/// Bounds shared by every command.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub arity_bound: Option<usize>,
    pub limits: Limits,
}

/// Process exit code for an error: 2 for bad input, 3 for exhausted caps,
/// 1 for failed internal verification.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => 3,
        Error::Parse { .. }
        | Error::NotACongruence(_)
        | Error::InvalidGraph(_)
        | Error::InvalidAlgebra(_)
        | Error::SizeMismatch { .. }
        | Error::OutOfRange { .. }
        | Error::SortMismatch(_)
        | Error::NotApplicable(_)
        | Error::EssentiallyUnary => 2,
        _ => 1,
    }
}

struct Report {
    body: String,
    summary: Vec<(String, String)>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            body: String::new(),
            summary: vec![("command".into(), command.into())],
        }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.body.push_str(text.as_ref());
        self.body.push('\n');
    }

    fn key(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    fn finish(mut self, status: Status) -> Outcome {
        let verdict = match status {
            Status::Verified => "verified",
            Status::Mismatch => "mismatch",
        };
        self.key("status", verdict);
        self.body.push_str("--- summary\n");
        for (k, v) in &self.summary {
            let _ = writeln!(self.body, "{k}={v}");
        }
        Outcome {
            report: self.body,
            status,
        }
    }
}

fn pass(v: &TcVerdict) -> &'static str {
    if v.passed() {
        "pass"
    } else {
        "FAIL"
    }
}

fn load(algebra: &str, congruence: &str) -> Result<(FiniteAlgebra, Congruence)> {
    let alg = format::parse_algebra(algebra)?;
    let tau = format::parse_congruence(congruence)?;
    if tau.algebra_size() != alg.size() {
        return Err(Error::SizeMismatch {
            expected: alg.size(),
            found: tau.algebra_size(),
        });
    }
    if !congruence::is_congruence(&alg, &tau)? {
        return Err(Error::NotACongruence(tau.to_string()));
    }
    Ok((alg, tau))
}

/// Both term conditions for `tau`. Verified when `tau` is strongly abelian.
pub fn analyze(algebra: &str, congruence: &str, settings: &Settings) -> Result<Outcome> {
    let (alg, tau) = load(algebra, congruence)?;
    let bound = settings.arity_bound.unwrap_or_else(|| congruence::default_arity_bound(&tau));
    let abelian = congruence::abelian_term_condition(&alg, &tau, bound, &settings.limits)?;
    let strong = congruence::strong_term_condition(&alg, &tau, bound, &settings.limits)?;
    let mut r = Report::new("analyze");
    r.line(format!("congruence: {tau}"));
    for (name, v) in [("abelian", &abelian), ("strongly abelian", &strong)] {
        match v.failure() {
            None => r.line(format!("{name}: pass (bound {bound})")),
            Some(w) => r.line(format!("{name}: FAIL (bound {bound}) witness {w}")),
        }
    }
    r.key("arity_bound", bound);
    r.key("abelian", pass(&abelian));
    r.key("strongly_abelian", pass(&strong));
    Ok(r.finish(if strong.passed() { Status::Verified } else { Status::Mismatch }))
}

/// Strongly abelian congruences, maximal ones, and the radical candidate.
pub fn radical(algebra: &str, settings: &Settings) -> Result<Outcome> {
    let alg = format::parse_algebra(algebra)?;
    let bound = settings
        .arity_bound
        .unwrap_or_else(|| congruence::default_arity_bound(&Congruence::total(alg.size())));
    let rep = congruence::strongly_abelian_congruences(&alg, bound, &settings.limits)?;
    let mut r = Report::new("radical");
    for (c, ok) in &rep.congruences {
        let tag = if rep.maximal.contains(c) { " (maximal)" } else { "" };
        r.line(format!("{c}: {}{tag}", if *ok { "strongly abelian" } else { "not strongly abelian" }));
    }
    match rep.unique_maximum() {
        Some(c) => r.line(format!("radical candidate: {c}")),
        None => r.line("radical candidate: none (no unique maximum)"),
    }
    r.key("arity_bound", rep.arity_bound);
    r.key("congruences", rep.congruences.len());
    r.key("strongly_abelian", rep.strongly_abelian().count());
    r.key("maximal", rep.maximal.len());
    r.key("candidate", rep.unique_maximum().map_or("none".to_string(), |c| c.to_string()));
    let status = if rep.unique_maximum().is_some() { Status::Verified } else { Status::Mismatch };
    Ok(r.finish(status))
}

fn boxmap_report(alg: &FiniteAlgebra, tau: &Congruence, settings: &Settings) -> Result<BoxmapReport> {
    boxmap::analyze(alg, tau, None, settings.arity_bound, &settings.limits)
}

fn flat_of(report: &BoxmapReport) -> Result<FlatAlgebra> {
    let coords: Vec<Coordinatization> = report.classes.iter().map(|c| c.coordinatization.clone()).collect();
    sorted::build_frzflt(&coords, &report.boxmaps)
}

/// Decomposition arities, witnesses and any boxmap exceeding its bound.
pub fn boxmaps(algebra: &str, congruence: &str, settings: &Settings) -> Result<Outcome> {
    let (alg, tau) = load(algebra, congruence)?;
    let rep = boxmap_report(&alg, &tau, settings)?;
    let mut r = Report::new("boxmaps");
    r.body.push_str(&rep.to_string());
    let ks: Vec<String> = rep.ks().iter().map(|k| k.to_string()).collect();
    r.key("classes", rep.classes.len());
    r.key("k", ks.join(","));
    r.key("scan_arity", rep.scan_arity);
    r.key("boxmaps", rep.boxmaps.len());
    r.key("violation", rep.violation.as_ref().map_or("none".to_string(), |b| b.term.to_string()));
    Ok(r.finish(Status::Verified))
}

/// The flat sorted algebra, as a dump, with a short report.
pub fn flat(algebra: &str, congruence: &str, settings: &Settings) -> Result<(Outcome, String)> {
    let (alg, tau) = load(algebra, congruence)?;
    let rep = boxmap_report(&alg, &tau, settings)?;
    let f = flat_of(&rep)?;
    let dump = format::write_sorted(&f.algebra);
    let mut r = Report::new("flat");
    for s in 0..f.algebra.sort_count() {
        r.line(format!("sort {} size {}", f.algebra.sort_name(s), f.algebra.size(s)));
    }
    for (op, (src, coord)) in f.algebra.ops().iter().zip(&f.sources) {
        r.line(format!("op {} from {src} coordinate {coord}", op.name));
    }
    let sizes: Vec<String> = f.algebra.sizes().iter().map(|s| s.to_string()).collect();
    r.key("sorts", f.algebra.sort_count());
    r.key("sizes", sizes.join(","));
    r.key("ops", f.algebra.ops().len());
    Ok((r.finish(Status::Verified), dump))
}

/// Whether a flat algebra dump is essentially unary.
pub fn check_unary(dump: &str, settings: &Settings) -> Result<Outcome> {
    let alg = format::parse_sorted(dump)?;
    let reduced = sorted::reduced_signature(&alg)?;
    let ts = termset::sorted_term_operations(&reduced, &settings.limits)?;
    let mut r = Report::new("check-unary");
    r.line(format!("term set: {} members", ts.len()));
    r.key("terms", ts.len());
    match termset::is_essentially_unary_algebra(&ts) {
        UnaryVerdict::Unary => {
            r.line("essentially unary: yes");
            r.key("unary", "yes");
        }
        UnaryVerdict::NotUnary(i) => {
            let m = &ts.members[i];
            r.line(format!("essentially unary: no, witness {m}"));
            r.key("unary", "no");
            r.key("witness", &m.term);
        }
    }
    Ok(r.finish(Status::Verified))
}

/// The whole graph interpretation. Verified when the recovered graph is
/// isomorphic to the input.
pub fn interpret(algebra: &str, congruence: &str, graph: &str, settings: &Settings) -> Result<Outcome> {
    let (alg, tau) = load(algebra, congruence)?;
    let g = format::parse_graph(graph)?;
    let rep = boxmap_report(&alg, &tau, settings)?;
    let f = flat_of(&rep)?;
    let cons = match interp::build_construction(&f.algebra, &settings.limits) {
        Err(Error::EssentiallyUnary) => {
            return Err(Error::NotApplicable("the flat algebra is essentially unary".into()))
        }
        other => other?,
    };
    let out = interp::interpret(&cons, &g, &settings.limits)?;
    let mut r = Report::new("interpret");
    r.line(format!("input graph: {g}"));
    r.line(format!("q = {}", out.q));
    for (k, c) in out.constants.iter().enumerate() {
        r.line(format!("{k} = {c}"));
    }
    r.line(format!(
        "sizes: F={} F'={} C={} D={}",
        out.f_size, out.fprime_size, out.c_size, out.d_size
    ));
    let ch = &out.construction;
    let dc = &out.d_checks;
    let checks = [
        ("f_embeds", ch.f_embeds),
        ("z_isolated", ch.z_isolated),
        ("constants_distinct", ch.constants_distinct),
        ("zero_propto_z", ch.zero_propto_z),
        ("constants_not_propto", ch.constants_pairwise_not_propto),
        ("generators_in_nrinv", dc.generators_in_nrinv),
        ("gen_classes_are_generators", dc.gen_classes_are_generators),
        ("edgegen_is_edge_type", dc.edgegen_is_edge_type),
        ("propto_stalkwise", dc.propto_stalkwise),
        ("propto_preserved", dc.propto_preserved),
    ];
    for (name, ok) in checks {
        r.line(format!("check {name}: {}", if ok { "pass" } else { "FAIL" }));
    }
    r.line(format!(
        "extents: NRINV={} GEN={} EDGEGEN={} VERTEXGEN={} EDGE={}",
        out.nrinv, out.gen, out.edgegen, out.vertexgen, out.edge_pairs
    ));
    match (&out.recovered, &out.isomorphism) {
        (Some(h), Some((pr, pb))) => {
            r.line(format!("recovered graph: {h}"));
            r.line(format!("isomorphism: reds {pr:?} blues {pb:?}"));
        }
        (Some(h), None) => r.line(format!("recovered graph: {h} (not isomorphic)")),
        (None, _) => r.line("recovered graph: none (EDGE does not split into two sides)"),
    }
    r.key("size_f", out.f_size);
    r.key("size_fprime", out.fprime_size);
    r.key("size_c", out.c_size);
    r.key("size_d", out.d_size);
    for (name, ok) in checks {
        r.key(name, ok);
    }
    r.key("edge_pairs", out.edge_pairs);
    r.key("isomorphic", out.isomorphic());
    Ok(r.finish(if out.isomorphic() { Status::Verified } else { Status::Mismatch }))
}
