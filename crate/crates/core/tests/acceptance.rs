//! Acceptance suite. Prints one PASS/FAIL line per criterion; all
//! tolerances are exact (zero disagreements).
//!
//! Criteria 6 and 7 do not hold for W8 and are listed in `KNOWN_FAILURES`:
//! every W8 term reads only the first bit of each argument, so the
//! constants `a0*b0` and `a0*b1` cannot be told apart. Those lines print
//! FAIL with the reason. The suite panics on any other failure, and also if
//! a known failure starts passing, so the list never goes stale. The
//! same checks are run on W8-shifted, where they all hold.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tauflat::algebra::{FiniteAlgebra, Operation};
use tauflat::boxmap::{self, Coordinatization};
use tauflat::congruence::{self, Congruence};
use tauflat::examples::{d4, tuple_selector_algebra, w8, w8_shifted};
use tauflat::interp::{self, BipartiteGraph, Construction};
use tauflat::sorted::{self, SortedAlgebra};
use tauflat::termset::{self, UnaryVerdict};
use tauflat::util;
use tauflat::Limits;

const SEED: u64 = 0x7a5f_1a7e;
const RANDOM_TERNARY_TABLES: usize = 1000;
const RANDOM_SELECTOR_ALGEBRAS: usize = 100;
const KNOWN_FAILURES: &[usize] = &[6, 7];

struct Outcome {
    passed: bool,
    detail: String,
}

fn lim() -> Limits {
    Limits::default()
}

fn binary(size: usize, table: Vec<u8>) -> FiniteAlgebra {
    FiniteAlgebra::new(
        size,
        vec![Operation {
            name: "f".into(),
            arity: 2,
            table,
        }],
    )
    .unwrap()
}

/// Random tuple-selector algebras on 2 or 4 elements with one or two
/// operations of arity at most 3.
fn selector_corpus(rng: &mut StdRng) -> Vec<FiniteAlgebra> {
    (0..RANDOM_SELECTOR_ALGEBRAS)
        .map(|_| {
            let bits = rng.gen_range(1..=2);
            let ops: Vec<(String, usize, Vec<(usize, usize)>)> = (0..rng.gen_range(1..=2))
                .map(|i| {
                    let arity = rng.gen_range(1..=3);
                    let sel = (0..bits).map(|_| (rng.gen_range(0..arity), rng.gen_range(0..bits))).collect();
                    (format!("f{i}"), arity, sel)
                })
                .collect();
            let named: Vec<(&str, usize, Vec<(usize, usize)>)> =
                ops.iter().map(|(n, a, s)| (n.as_str(), *a, s.clone())).collect();
            tuple_selector_algebra(bits, &named)
        })
        .collect()
}

fn flat(alg: &FiniteAlgebra, tau: &Congruence) -> (boxmap::BoxmapReport, SortedAlgebra) {
    let report = boxmap::analyze(alg, tau, None, None, &lim()).unwrap();
    let coords: Vec<Coordinatization> = report.classes.iter().map(|c| c.coordinatization.clone()).collect();
    let f = sorted::build_frzflt(&coords, &report.boxmaps).unwrap().algebra;
    (report, f)
}

fn criterion_1(rng: &mut StdRng) -> Outcome {
    let mut disagreements = 0;
    let mut checked = 0;
    let mut run = |alg: &FiniteAlgebra, bound: usize| {
        let tau = Congruence::total(alg.size());
        let strong = congruence::strong_term_condition(alg, &tau, bound, &lim()).unwrap().passed();
        let rect = congruence::rectangular_for_all_terms(alg, &tau, bound, &lim()).unwrap().is_none();
        checked += 1;
        if strong != rect {
            disagreements += 1;
        }
    };
    for code in 0..16u32 {
        let table = (0..4).map(|i| (code >> (3 - i) & 1) as u8).collect();
        run(&binary(2, table), 3);
    }
    for _ in 0..RANDOM_TERNARY_TABLES {
        let table = (0..9).map(|_| rng.gen_range(0..3u8)).collect();
        run(&binary(3, table), 2);
    }
    Outcome {
        passed: disagreements == 0,
        detail: format!(
            "{checked} algebras (all 16 on 2 elements at arity 3, {RANDOM_TERNARY_TABLES} random on 3 elements at arity 2), {disagreements} disagreements"
        ),
    }
}

fn criterion_2() -> Outcome {
    let a = d4();
    let tau = Congruence::total(4);
    let d = boxmap::max_decomposition_arity(&a, &tau, 0, None, &lim()).unwrap();
    let is_dec = boxmap::is_decomposition_op(d.boxmap()).unwrap();
    let c = boxmap::coordinatize(&d).unwrap();
    let b = d.boxmap();
    let mut identity_failures = 0;
    let mut x = [0u8; 4];
    loop {
        // d(d(x11, x12), d(x21, x22)) = d(x11, x22)
        let lhs = b.apply(&[b.apply(&[x[0], x[1]]).unwrap(), b.apply(&[x[2], x[3]]).unwrap()]).unwrap();
        if lhs != b.apply(&[x[0], x[3]]).unwrap() {
            identity_failures += 1;
        }
        let mut i = 3;
        loop {
            x[i] += 1;
            if x[i] < 4 {
                break;
            }
            x[i] = 0;
            if i == 0 {
                break;
            }
            i -= 1;
        }
        if x == [0; 4] {
            break;
        }
    }
    let bijective = (0..4u8).all(|e| c.coords(e).is_some_and(|k| c.element(k) == e));
    let w8_k = boxmap::max_decomposition_arity(&w8(), &Congruence::total(8), 0, None, &lim()).unwrap().arity();
    let passed = is_dec && d.arity() == 2 && c.factor_sizes == [2, 2] && identity_failures == 0 && bijective && w8_k == 1;
    Outcome {
        passed,
        detail: format!(
            "D4: decomposition={is_dec} K={} factors={:?} identity failures={identity_failures} phi bijective={bijective}; W8: K={w8_k}",
            d.arity(),
            c.factor_sizes
        ),
    }
}

fn criterion_3(corpus: &[FiniteAlgebra]) -> Outcome {
    let mut algebras = vec![d4(), w8(), w8_shifted()];
    algebras.extend(corpus.iter().cloned());
    let mut scanned = 0;
    let mut violations = 0;
    for a in &algebras {
        let tau = Congruence::total(a.size());
        let classes = tau.classes();
        let arity = util::ceil_log2(a.size()) + 1;
        for b in boxmap::enumerate_boxmaps(a, &tau, None, arity, &lim()).unwrap() {
            scanned += 1;
            if b.input_count() > util::floor_log2(classes[b.output_class].len()) {
                violations += 1;
            }
        }
    }
    Outcome {
        passed: violations == 0,
        detail: format!("{} algebras, {scanned} boxmaps, {violations} above log2|C|", algebras.len()),
    }
}

fn criterion_4(corpus: &[FiniteAlgebra]) -> Outcome {
    let mut algebras = vec![("D4", d4()), ("W8", w8())];
    algebras.extend(corpus.iter().map(|a| ("random", a.clone())));
    let mut mismatches = 0;
    let mut sides = [0usize; 2];
    let mut named = Vec::new();
    for (name, a) in &algebras {
        let (report, f) = flat(a, &Congruence::total(a.size()));
        let reduced = sorted::reduced_signature(&f).unwrap();
        let ts = termset::sorted_term_operations(&reduced, &lim()).unwrap();
        let unary = matches!(termset::is_essentially_unary_algebra(&ts), UnaryVerdict::Unary);
        let no_violation = report.violation.is_none();
        if unary != no_violation {
            mismatches += 1;
        }
        if *name == "random" {
            sides[usize::from(unary)] += 1;
        } else {
            named.push(format!("{name} unary={unary} violation={}", !no_violation));
        }
    }
    let passed = mismatches == 0 && named == ["D4 unary=true violation=false", "W8 unary=false violation=true"];
    Outcome {
        passed,
        detail: format!(
            "{}; corpus {} unary, {} not; {mismatches} mismatches",
            named.join(", "),
            sides[1],
            sides[0]
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut exceptions = 0;
    let mut parts = Vec::new();
    for (name, a) in [("W8", w8()), ("D4", d4()), ("W8-shifted", w8_shifted())] {
        let (_, f) = flat(&a, &Congruence::total(a.size()));
        let reduced = sorted::reduced_signature(&f).unwrap();
        let ts = termset::sorted_term_operations(&reduced, &lim()).unwrap();
        let right = termset::right_invertible_table(&reduced, &ts, &lim()).unwrap();
        let ri = right.iter().filter(|&&r| r).count();
        let bad = ts.members.iter().zip(&right).filter(|(m, &r)| r && m.arity() > 1).count();
        exceptions += bad;
        parts.push(format!("{name}: {} terms, {ri} right-invertible, {bad} not unary", ts.len()));
    }
    Outcome {
        passed: exceptions == 0,
        detail: parts.join("; "),
    }
}

fn construction_checks(cons: &Construction) -> (bool, String) {
    let c = &cons.checks;
    let ok = c.f_embeds && c.z_isolated && c.zero_propto_z && c.constants_distinct && c.constants_pairwise_not_propto;
    let s0 = cons.zero_sort();
    let k = |i: usize| cons.to_c[cons.constants[i]];
    let collapsed: Vec<String> = (0..4)
        .flat_map(|i| (0..i).map(move |j| (j, i)))
        .filter(|&(j, i)| cons.propto_literal(s0, k(j), k(i)))
        .map(|(j, i)| format!("{j}∝{i}"))
        .collect();
    let detail = format!(
        "F embeds={} z isolated={} 0∝z={} distinct={} pairwise not ∝={}{}",
        c.f_embeds,
        c.z_isolated,
        c.zero_propto_z,
        c.constants_distinct,
        c.constants_pairwise_not_propto,
        if collapsed.is_empty() { String::new() } else { format!(" (collapsed: {})", collapsed.join(" ")) }
    );
    (ok, detail)
}

fn main_suite() -> Vec<(usize, Outcome, Option<String>)> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let corpus = selector_corpus(&mut rng);
    let mut results = Vec::new();
    results.push((1, criterion_1(&mut rng), None));
    results.push((2, criterion_2(), None));
    results.push((3, criterion_3(&corpus), None));
    results.push((4, criterion_4(&corpus), None));
    results.push((5, criterion_5(), None));

    let w8_cons = interp::build_construction(&flat(&w8(), &Congruence::total(8)).1, &lim()).unwrap();
    let shifted = interp::build_construction(&flat(&w8_shifted(), &Congruence::total(8)).1, &lim()).unwrap();

    let (ok, detail) = construction_checks(&w8_cons);
    let (sok, sdetail) = construction_checks(&shifted);
    results.push((
        6,
        Outcome {
            passed: ok,
            detail: format!("W8: {detail}"),
        },
        Some(format!("W8-shifted {}: {sdetail}", if sok { "PASS" } else { "FAIL" })),
    ));

    let graphs = BipartiteGraph::all_up_to(4);
    let mut stalk = (0, 0);
    let mut preserved = (0, 0);
    let mut recover = |cons: &Construction| {
        let mut iso = 0;
        for g in &graphs {
            let r = interp::interpret(cons, g, &lim()).unwrap();
            iso += usize::from(r.isomorphic());
            stalk.0 += usize::from(r.d_checks.propto_stalkwise);
            preserved.0 += usize::from(r.d_checks.propto_preserved);
            stalk.1 += 1;
            preserved.1 += 1;
        }
        iso
    };
    let w8_iso = recover(&w8_cons);
    let shifted_iso = recover(&shifted);
    let n = graphs.len();
    results.push((
        7,
        Outcome {
            passed: w8_iso == n,
            detail: format!("W8: {w8_iso}/{n} graphs with at most 4 vertices recovered"),
        },
        Some(format!(
            "W8-shifted {}: {shifted_iso}/{n} recovered",
            if shifted_iso == n { "PASS" } else { "FAIL" }
        )),
    ));
    results.push((
        8,
        Outcome {
            passed: stalk.0 == stalk.1 && preserved.0 == preserved.1,
            detail: format!(
                "direct = stalkwise on {}/{} D algebras, right-invertible unary terms preserve ∝ on {}/{}",
                stalk.0, stalk.1, preserved.0, preserved.1
            ),
        },
        None,
    ));
    results
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let results = main_suite();
    let mut unexpected = Vec::new();
    for (n, o, extra) in &results {
        let known = KNOWN_FAILURES.contains(n);
        let tag = match (o.passed, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {n}: {tag} - {}", o.detail);
        if let Some(extra) = extra {
            println!("criterion {n}:   {extra}");
        }
        if o.passed == known {
            unexpected.push(*n);
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
    for (n, _, extra) in &results {
        if let Some(extra) = extra {
            assert!(extra.contains("PASS"), "criterion {n}: {extra}");
        }
    }
}
