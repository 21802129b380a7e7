use num_bigint::BigUint;
use proptest::prelude::*;

use slicecount::corpus;
use slicecount::digraph::Digraph;
use slicecount::oracle::{oracle_count, OracleCaps, OracleQuery};
use slicecount::ordering::{dvsn, search_min_dvsn_ordering, zigzag_number, OrderedDigraph};
use slicecount::pipeline::{count_subgraphs, preset_query, CountQuery, Mode, PRESETS};
use slicecount::slice::{decompose_along_ordering, End, Slice, UnitDecomposition};
use slicecount::slice_graph::{build_sub_slice_graph, counter_expansion};

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=2 * n).prop_map(move |edges| Digraph::from_edges(n, &edges))
    })
}

fn with_ordering(max_n: usize) -> impl Strategy<Value = (Digraph, Vec<usize>)> {
    digraph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn oracle(q: &CountQuery) -> BigUint {
    let oq = OracleQuery {
        graph: &q.graph.graph,
        ordering: &q.graph.ordering,
        sentence: &q.sentence,
        k: q.k,
        z: q.z,
        l: q.l,
        omega: &q.omega,
        maximal: q.mode == Mode::CountMaximal,
    };
    oracle_count(&oq, OracleCaps { vertices: 8, elements: 20 }).unwrap().count
}

/// Identity permutation slice matching the out-frontier of `s`.
fn identity_after(s: &Slice) -> Slice {
    let mut p = Slice::empty();
    for o in s.out_numbers() {
        let e = s.out_edge(o).unwrap();
        p = if e.orientation() > 0 { p.push(End::In(o), End::Out(o)) } else { p.push(End::Out(o), End::In(o)) };
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pipeline_matches_oracle((g, ord) in with_ordering(4), preset in 0..4usize, l in 0..=4usize, z in 1..=2usize) {
        let l = l.min(g.n());
        let og = OrderedDigraph::new(g, ord).unwrap();
        let q = preset_query(PRESETS[preset], og, 2, z, Some(l)).unwrap();
        prop_assert_eq!(count_subgraphs(&q).unwrap().count, oracle(&q));
    }

    #[test]
    fn counts_do_not_depend_on_ordering(g in digraph(4), preset in 0..4usize) {
        let n = g.n();
        let first: Vec<usize> = (0..n).collect();
        let second: Vec<usize> = (0..n).rev().collect();
        // z = 4 covers every subgraph of a 4-vertex graph that is a union of two paths.
        let count = |ord: Vec<usize>| {
            let og = OrderedDigraph::new(g.clone(), ord).unwrap();
            count_subgraphs(&preset_query(PRESETS[preset], og, 2, 4, None).unwrap()).unwrap().count
        };
        prop_assert_eq!(count(first), count(second));
    }

    #[test]
    fn padding_does_not_change_sub_slice_counts((g, ord) in with_ordering(5), at in 0..5usize) {
        let u = decompose_along_ordering(&g, &ord).unwrap();
        let at = at.min(u.len() - 1);
        let mut padded = u.slices.clone();
        padded.insert(at + 1, identity_after(&u.slices[at]));
        let v = UnitDecomposition::new(padded).unwrap();
        let c = u.width();
        let a = build_sub_slice_graph(&u, c).unwrap().count_walks().unwrap();
        let b = build_sub_slice_graph(&v, c).unwrap().count_walks().unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn vertex_counts_partition_the_total((g, ord) in with_ordering(5)) {
        let u = decompose_along_ordering(&g, &ord).unwrap();
        let sub = build_sub_slice_graph(&u, u.width()).unwrap();
        let total = sub.count_walks().unwrap();
        let parts: BigUint = (0..=g.n()).map(|l| counter_expansion(&sub, l).count_walks().unwrap()).sum();
        prop_assert_eq!(total, parts);
    }

    #[test]
    fn decomposition_round_trips((g, ord) in with_ordering(6)) {
        let u = decompose_along_ordering(&g, &ord).unwrap();
        prop_assert!(u.slices.iter().all(Slice::is_unit));
        prop_assert_eq!(u.width(), g.cut_width(&ord).unwrap());
        let h = u.compose_all().unwrap();
        prop_assert_eq!(h.n(), g.n());
        prop_assert_eq!(h.m(), g.m());
        // Vertex i of the composition is the i-th vertex of the ordering.
        let mut want: Vec<(usize, usize)> = g.edges().iter().map(|e| {
            let p = |v| ord.iter().position(|&x| x == v).unwrap();
            (p(e.src), p(e.dst))
        }).collect();
        let mut got: Vec<(usize, usize)> = h.edges().iter().map(|e| (e.src, e.dst)).collect();
        want.sort_unstable();
        got.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn normalization_is_idempotent((g, ord) in with_ordering(5)) {
        for s in decompose_along_ordering(&g, &ord).unwrap().slices {
            let n = s.normalize();
            prop_assert!(n.is_normalized());
            prop_assert_eq!(n.normalize(), n);
        }
    }

    #[test]
    fn min_dvsn_bounds_zigzag(g in digraph(6)) {
        let (ord, d) = search_min_dvsn_ordering(&g, None).unwrap();
        prop_assert_eq!(dvsn(&g, &ord).unwrap(), d);
        prop_assert!(zigzag_number(&g, &ord).unwrap() <= 2 * d + 1);
    }

    #[test]
    fn dags_have_zigzag_one_on_topological_orderings(n in 1..8usize, seed in any::<u64>()) {
        let g = corpus::random_dag(&mut corpus::rng(seed), n, 0.4);
        let ord = g.topological_order().unwrap();
        prop_assert!(zigzag_number(&g, &ord).unwrap() <= 1);
    }
}
