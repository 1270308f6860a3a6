use proptest::prelude::*;

use tauflat::algebra::{FiniteAlgebra, Operation};
use tauflat::congruence::{self, Congruence};
use tauflat::examples::tuple_selector_algebra;
use tauflat::format;
use tauflat::interp::BipartiteGraph;
use tauflat::sorted::{self, SElem};
use tauflat::Limits;

fn algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (1usize..=3)
        .prop_flat_map(|size| {
            let op = (0usize..=2).prop_flat_map(move |arity| {
                proptest::collection::vec(0..size as u8, size.pow(arity as u32)).prop_map(move |t| (arity, t))
            });
            (Just(size), proptest::collection::vec(op, 1..=2))
        })
        .prop_map(|(size, ops)| {
            let ops = ops
                .into_iter()
                .enumerate()
                .map(|(i, (arity, table))| Operation {
                    name: format!("f{i}"),
                    arity,
                    table,
                })
                .collect();
            FiniteAlgebra::new(size, ops).unwrap()
        })
}

/// A random algebra on `{0,1}^bits` whose operations copy bits.
fn selector_algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (1usize..=2, 1usize..=3).prop_flat_map(|(bits, arity)| {
        proptest::collection::vec((0..arity, 0..bits), bits)
            .prop_map(move |sel| tuple_selector_algebra(bits, &[("t", arity, sel)]))
    })
}

fn graph() -> impl Strategy<Value = BipartiteGraph> {
    let all = BipartiteGraph::all_up_to(5);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn algebra_format_round_trips(a in algebra()) {
        prop_assert_eq!(format::parse_algebra(&format::write_algebra(&a)).unwrap(), a);
    }

    #[test]
    fn congruence_format_round_trips(ids in proptest::collection::vec(0usize..5, 1..9)) {
        let c = Congruence::from_block_ids(&ids);
        prop_assert_eq!(format::parse_congruence(&format::write_congruence(&c)).unwrap(), c);
    }

    #[test]
    fn graph_format_round_trips(g in graph()) {
        prop_assert_eq!(format::parse_graph(&format::write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn parsers_reject_garbage_without_panicking(text in "[a-z0-9 :>#\n-]{0,80}") {
        let _ = format::parse_algebra(&text);
        let _ = format::parse_congruence(&text);
        let _ = format::parse_graph(&text);
        let _ = format::parse_sorted(&text);
    }

    #[test]
    fn generated_congruence_is_least(a in algebra(), x in 0u8..3, y in 0u8..3) {
        let n = a.size() as u8;
        let (x, y) = (x % n, y % n);
        let c = congruence::cg(&a, &[(x, y)]);
        prop_assert!(c.related(x as usize, y as usize));
        prop_assert!(congruence::is_congruence(&a, &c).unwrap());
        for d in congruence::con_lattice(&a, &Limits::default()).unwrap() {
            if d.related(x as usize, y as usize) {
                prop_assert!(c.refines(&d));
            }
        }
    }

    #[test]
    fn sorted_cg_matches_one_sorted_cg(a in algebra(), x in 0u8..3, y in 0u8..3) {
        let n = a.size() as u8;
        let (x, y) = (x % n, y % n);
        let frz = sorted::build_frz(&a, &Congruence::total(a.size())).unwrap();
        let blocks = sorted::sorted_cg(&frz, &[(0, x as SElem, y as SElem)]);
        let expected = congruence::cg(&a, &[(x, y)]);
        prop_assert_eq!(Congruence::from_block_ids(&blocks[0]), expected);
        let q = sorted::sorted_quotient(&frz, &blocks).unwrap();
        prop_assert_eq!(q.size(0), blocks[0].iter().max().unwrap() + 1);
    }

    #[test]
    fn selector_algebras_are_strongly_abelian(a in selector_algebra()) {
        let tau = Congruence::total(a.size());
        let bound = congruence::default_arity_bound(&tau).min(3);
        let v = congruence::strong_term_condition(&a, &tau, bound, &Limits::default()).unwrap();
        prop_assert!(v.passed());
    }

    #[test]
    fn strong_implies_abelian(a in algebra()) {
        let tau = Congruence::total(a.size());
        let lim = Limits::default();
        let strong = congruence::strong_term_condition(&a, &tau, 2, &lim).unwrap();
        let abelian = congruence::abelian_term_condition(&a, &tau, 2, &lim).unwrap();
        prop_assert!(!strong.passed() || abelian.passed());
    }
}
