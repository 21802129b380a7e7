//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

use slicecount::corpus::{self, DEFAULT_SEED};
use slicecount::digraph::{Digraph, WeightSemigroup};
use slicecount::mso::compile::SaturatedView;
use slicecount::mso::{parse_formula, Automaton, Macros};
use slicecount::oracle::{self, oracle_count, OracleCaps, OracleQuery};
use slicecount::ordering::{
    dfs_ordering_bidirected_tree, dvsn, search_min_dvsn_ordering, verify_zigzag, zigzag_number, OrderedDigraph,
    ZigZagVerdict,
};
use slicecount::pipeline::{count_subgraphs, preset_query, CountQuery, Mode};
use slicecount::slice::{decompose_along_ordering, End, Slice, UnitDecomposition};
use slicecount::slice_graph::{build_sub_slice_graph, counter_expansion, AlphabetMeta, Letter, SliceGraph};

const CRITERION_1_LIMIT: Duration = Duration::from_secs(120);
const CRITERION_2_LIMIT: Duration = Duration::from_secs(10);
const CRITERION_4_LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

fn wide_caps() -> OracleCaps {
    OracleCaps { vertices: 8, elements: 32 }
}

fn oracle_query(q: &CountQuery) -> OracleQuery<'_> {
    OracleQuery {
        graph: &q.graph.graph,
        ordering: &q.graph.ordering,
        sentence: &q.sentence,
        k: q.k,
        z: q.z,
        l: q.l,
        omega: &q.omega,
        maximal: q.mode == Mode::CountMaximal,
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Directed Hamiltonian cycles by permuting the vertices after vertex 0.
fn brute_hamiltonian_cycles(g: &Digraph) -> u64 {
    let n = g.n();
    let mut mult = vec![vec![0u64; n]; n];
    for e in g.edges() {
        mult[e.src][e.dst] += 1;
    }
    if n == 1 {
        return mult[0][0];
    }
    fn extend(mult: &[Vec<u64>], path: &mut Vec<usize>, used: &mut [bool], acc: u64, total: &mut u64) {
        let n = mult.len();
        let last = *path.last().unwrap();
        if path.len() == n {
            *total += acc * mult[last][path[0]];
            return;
        }
        for v in 0..n {
            if !used[v] && mult[last][v] > 0 {
                used[v] = true;
                path.push(v);
                extend(mult, path, used, acc * mult[last][v], total);
                path.pop();
                used[v] = false;
            }
        }
    }
    let mut total = 0;
    let mut used = vec![false; n];
    used[0] = true;
    extend(&mult, &mut vec![0], &mut used, 1, &mut total);
    total
}

/// Minimum over orderings of the maximum, over prefixes `S`, of the number
/// of vertices outside `S` with an edge into `S`, by dynamic programming
/// over vertex subsets.
fn exact_min_dvsn(g: &Digraph) -> usize {
    let n = g.n();
    let mut into = vec![0u32; n];
    for e in g.edges() {
        into[e.src] |= 1 << e.dst;
    }
    let full = (1u32 << n) - 1;
    let cost = |s: u32| (0..n).filter(|&v| s & (1 << v) == 0 && into[v] & s != 0).count();
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        let c = cost(s);
        let mut b = usize::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            b = b.min(best[(s & !(1 << v)) as usize]);
        }
        best[s as usize] = b.max(c);
    }
    best[full as usize]
}

fn criterion_1() -> Outcome {
    let mut report = Vec::new();
    for n in [4usize, 5] {
        let g = corpus::bidirected_complete(n);
        let (ord, _) = search_min_dvsn_ordering(&g, None).map_err(|e| e.to_string())?;
        let z = zigzag_number(&g, &ord).map_err(|e| e.to_string())?;
        let expected = brute_hamiltonian_cycles(&g);
        let t = Instant::now();
        let og = OrderedDigraph::new(g, ord).map_err(|e| e.to_string())?;
        let q = preset_query("hamiltonian", og, 2, z, None).map_err(|e| e.to_string())?;
        let count = count_subgraphs(&q).map_err(|e| e.to_string())?.count;
        let elapsed = t.elapsed();
        let oracle = oracle_count(&oracle_query(&q), wide_caps()).map_err(|e| e.to_string())?.count;
        ensure(count == BigUint::from(expected), || format!("K{n}: pipeline {count}, brute force {expected}"))?;
        ensure(count == oracle, || format!("K{n}: pipeline {count}, oracle {oracle}"))?;
        ensure(elapsed < CRITERION_1_LIMIT, || format!("K{n}: took {elapsed:?}"))?;
        report.push(format!("K{n}={count} (z={z}, {:.2}s)", elapsed.as_secs_f64()));
    }
    Ok(report.join(", "))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut r = corpus::rng(DEFAULT_SEED ^ 2);
    for i in 0..20 {
        let n = r.gen_range(2..=8);
        let g = corpus::random_dag(&mut r, n, 0.4);
        let ord = g.topological_order().ok_or("generated graph is not a DAG")?;
        let v = verify_zigzag(&g, &ord, 1).map_err(|e| e.to_string())?;
        ensure(v == ZigZagVerdict::Verified, || format!("dag {i}: topological ordering fails z=1: {v:?}"))?;
        let og = OrderedDigraph::new(g, ord).map_err(|e| e.to_string())?;
        let q = preset_query("hamiltonian", og, 2, 1, None).map_err(|e| e.to_string())?;
        let c = count_subgraphs(&q).map_err(|e| e.to_string())?.count;
        ensure(c == BigUint::from(0u32), || format!("dag {i}: {c} Hamiltonian cycles"))?;
    }
    let elapsed = t.elapsed();
    ensure(elapsed < CRITERION_2_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("20 DAGs, z=1 verified, 0 cycles ({:.2}s)", elapsed.as_secs_f64()))
}

fn criterion_3() -> Outcome {
    let mut ds = Vec::new();
    for n in [3usize, 7, 15] {
        let g = corpus::binary_tree(n);
        let dfs = dfs_ordering_bidirected_tree(&g).map_err(|e| e.to_string())?;
        let v = verify_zigzag(&g, &dfs, 2).map_err(|e| e.to_string())?;
        ensure(v == ZigZagVerdict::Verified, || format!("D({n}): DFS ordering fails z=2: {v:?}"))?;
        let (ord, d) = search_min_dvsn_ordering(&g, None).map_err(|e| e.to_string())?;
        let exact = exact_min_dvsn(&g);
        ensure(d == exact, || format!("D({n}): search {d}, exact {exact}"))?;
        ensure(dvsn(&g, &ord).map_err(|e| e.to_string())? == d, || format!("D({n}): returned ordering mismatch"))?;
        ds.push(d);
    }
    ensure(ds[0] == 1, || format!("d(D(3)) = {}", ds[0]))?;
    ensure(ds.windows(2).all(|w| w[0] <= w[1]) && ds[2] > ds[0], || format!("no growth: {ds:?}"))?;
    Ok(format!("d(D(3))={}, d(D(7))={}, d(D(15))={}", ds[0], ds[1], ds[2]))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut r = corpus::rng(DEFAULT_SEED ^ 4);
    let mut worst = isize::MIN;
    for i in 0..30 {
        let n = r.gen_range(2..=7);
        let p = r.gen_range(0.15..0.5);
        let g = corpus::random_digraph(&mut r, n, p);
        let (ord, d) = search_min_dvsn_ordering(&g, None).map_err(|e| e.to_string())?;
        let z = zigzag_number(&g, &ord).map_err(|e| e.to_string())?;
        ensure(z <= 2 * d + 1, || format!("graph {i}: zig-zag {z} > 2*{d}+1"))?;
        worst = worst.max(z as isize - (2 * d + 1) as isize);
    }
    let elapsed = t.elapsed();
    ensure(elapsed < CRITERION_4_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("30 graphs, max z-(2d+1) = {worst} ({:.2}s)", elapsed.as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let mut graphs: Vec<Digraph> = corpus::bundled(DEFAULT_SEED).into_iter().map(|c| c.graph).collect();
    graphs.dedup();
    graphs.extend(corpus::all_simple_digraphs(3));
    let mut checked = 0;
    for (i, g) in graphs.iter().enumerate() {
        let n = g.n();
        let ord: Vec<usize> = (0..n).collect();
        let u = decompose_along_ordering(g, &ord).map_err(|e| e.to_string())?;
        let sub = build_sub_slice_graph(&u, u.width()).map_err(|e| e.to_string())?;
        let total = sub.count_accepting_paths().map_err(|e| e.to_string())?;
        let all = oracle::enumerate_subgraphs(g, None, wide_caps()).map_err(|e| e.to_string())?;
        ensure(total == BigUint::from(all.len()), || format!("graph {i}: {total} paths, {} subgraphs", all.len()))?;
        for l in 0..=n {
            let per = counter_expansion(&sub, l).count_accepting_paths().map_err(|e| e.to_string())?;
            let want = all.iter().filter(|s| s.vertices.len() == l).count();
            ensure(per == BigUint::from(want), || format!("graph {i}, l={l}: {per} vs {want}"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} graphs, totals and per-l counts exact"))
}

fn criterion_6() -> Outcome {
    let props = ["(bipartite)", "(connected)", "(forest)", "(hamiltonian-cycle)"];
    let mut runs = 0usize;
    for text in props {
        let s = parse_formula(text).map_err(|e| e.to_string())?;
        let mut native = Automaton::with_macros(&s, Some(2), Macros::Native).map_err(|e| e.to_string())?;
        let mut expanded = Automaton::with_macros(&s, Some(2), Macros::Expanded).map_err(|e| e.to_string())?;
        for n in 1..=4 {
            let mut orders: Vec<Vec<usize>> = vec![(0..n).collect()];
            permutations(n, &mut orders);
            for g in corpus::all_simple_digraphs(n) {
                let want = oracle::model_check(&g, &s).map_err(|e| e.to_string())?;
                for ord in &orders {
                    if g.cut_width(ord).map_err(|e| e.to_string())? > 2 {
                        continue;
                    }
                    let u = decompose_along_ordering(&g, ord).map_err(|e| e.to_string())?;
                    for word in [u.slices.clone(), dilate(&u)] {
                        let a = native.run(&word).map_err(|e| e.to_string())?;
                        ensure(a == want, || format!("{text} on {:?} ordering {ord:?}: scanner {a}", g.edges()))?;
                        if n <= 3 {
                            let b = expanded.run(&word).map_err(|e| e.to_string())?;
                            ensure(b == want, || format!("{text} on {:?} ordering {ord:?}: formula {b}", g.edges()))?;
                        }
                        runs += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{runs} decompositions across 4 properties"))
}

fn permutations(n: usize, out: &mut Vec<Vec<usize>>) {
    let mut p: Vec<usize> = (0..n).collect();
    out.clear();
    fn rec(p: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(p, i + 1, out);
            p.swap(i, j);
        }
    }
    rec(&mut p, 0, out);
}

/// Inserts, after every slice with a non-trivial out-frontier, a
/// permutation slice reversing the frontier order, and renumbers the next
/// slice to match.
fn dilate(u: &UnitDecomposition) -> Vec<Slice> {
    let mut out = Vec::new();
    let mut rename: Option<Vec<u32>> = None;
    for s in &u.slices {
        let s = match &rename {
            Some(map) => {
                let m = map.clone();
                s.renumber(|n| m[n as usize], |n| n)
            }
            None => s.clone(),
        };
        let outs = s.out_numbers();
        out.push(s.clone());
        rename = None;
        if outs.len() >= 2 {
            let top = *outs.iter().max().unwrap() as usize;
            let mut map = vec![0u32; top + 1];
            let mut perm = Slice::empty();
            for (i, &o) in outs.iter().enumerate() {
                let image = outs[outs.len() - 1 - i];
                map[o as usize] = image;
                let e = s.out_edge(o).unwrap();
                let (src, dst) = if e.orientation() > 0 { (End::In(o), End::Out(image)) } else { (End::Out(image), End::In(o)) };
                perm = perm.push(src, dst);
            }
            for e in perm.edges.iter_mut().zip(outs.iter()) {
                let orig = s.out_edge(*e.1).unwrap();
                e.0.label = orig.label.clone();
                e.0.weight = orig.weight;
            }
            out.push(perm);
            rename = Some(map);
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let s = parse_formula("(connected)").map_err(|e| e.to_string())?;
    let (k, z) = (2, 2);
    let mut view = SaturatedView::new(&s, k, z, k * z).map_err(|e| e.to_string())?;
    let mut r = corpus::rng(DEFAULT_SEED ^ 7);
    let (mut graphs, mut words) = (0, 0);
    let mut attempts = 0;
    while graphs < 40 && attempts < 4000 {
        attempts += 1;
        let n = r.gen_range(1..=5);
        let p = r.gen_range(0.2..0.6);
        let g = corpus::random_digraph(&mut r, n, p);
        if !oracle::is_connected(&g) || !oracle::is_union_of_k_paths(&g, k).map_err(|e| e.to_string())? {
            continue;
        }
        let mut orders = Vec::new();
        permutations(n, &mut orders);
        orders.shuffle(&mut r);
        let good: Vec<_> = orders
            .into_iter()
            .filter(|o| matches!(verify_zigzag(&g, o, z), Ok(ZigZagVerdict::Verified)))
            .take(6)
            .collect();
        if good.is_empty() {
            continue;
        }
        graphs += 1;
        for ord in good {
            let u = decompose_along_ordering(&g, &ord).map_err(|e| e.to_string())?;
            for word in [u.slices.clone(), dilate(&u)] {
                let ok = view.accepts_word(&word).map_err(|e| e.to_string())?;
                ensure(ok, || format!("{:?} ordering {ord:?} rejected", g.edges()))?;
                words += 1;
            }
        }
    }
    ensure(graphs >= 20, || format!("only {graphs} sample graphs"))?;
    Ok(format!("{graphs} graphs, {words} decompositions accepted"))
}

fn criterion_8() -> Outcome {
    let mut r = corpus::rng(DEFAULT_SEED ^ 8);
    for i in 0..50 {
        let n = r.gen_range(1..=12);
        let mut sg = SliceGraph::new(AlphabetMeta { c: 0, q: 0 });
        for v in 0..n {
            let label: slicecount::digraph::Label = format!("v{v}").into();
            sg.add_vertex(Letter::new(Slice::with_center(label)), r.gen_bool(0.3), r.gen_bool(0.3));
        }
        for a in 0..n {
            for b in a + 1..n {
                if r.gen_bool(0.35) {
                    sg.add_edge(a as u32, b as u32);
                }
            }
        }
        let fast = sg.count_accepting_paths().map_err(|e| e.to_string())?;
        let slow = enumerate_paths(&sg);
        ensure(fast == BigUint::from(slow), || format!("dag {i}: {fast} vs {slow}"))?;
    }
    Ok("50 DAGs exact".into())
}

fn enumerate_paths(sg: &SliceGraph) -> u64 {
    fn walk(sg: &SliceGraph, v: usize) -> u64 {
        u64::from(sg.fin[v]) + sg.succ[v].iter().map(|&w| walk(sg, w as usize)).sum::<u64>()
    }
    (0..sg.len()).filter(|&v| sg.initial[v]).map(|v| walk(sg, v)).sum()
}

fn criterion_9() -> Outcome {
    let omega = WeightSemigroup::bounded_sum(15);
    let mut r = corpus::rng(DEFAULT_SEED ^ 9);
    let mut cases = 0;
    for i in 0..12 {
        let n = r.gen_range(3..=6);
        let mut g = corpus::random_digraph(&mut r, n, 0.3);
        corpus::randomize_weights(&mut r, &mut g, &omega, 6);
        let (ord, _) = search_min_dvsn_ordering(&g, None).map_err(|e| e.to_string())?;
        let z = zigzag_number(&g, &ord).map_err(|e| e.to_string())?.clamp(1, 3);
        let og = OrderedDigraph::new(g, ord).map_err(|e| e.to_string())?;
        for preset in ["forest", "connected-spanning"] {
            let l = if preset == "forest" { r.gen_range(2..=n) } else { n };
            let mut q = preset_query(preset, og.clone(), 2, z, Some(l)).map_err(|e| e.to_string())?;
            q.omega = omega.clone();
            q.mode = Mode::CountMaximal;
            let got = count_subgraphs(&q).map_err(|e| e.to_string())?;
            let want = oracle_count(&oracle_query(&q), wide_caps()).map_err(|e| e.to_string())?;
            ensure(got.count == want.count, || format!("graph {i} {preset}: {} vs {}", got.count, want.count))?;
            let (a, b) = (got.max_weight, want.max_weight);
            ensure(a == b, || format!("graph {i} {preset}: max weight {a:?} vs {b:?}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} weighted queries exact"))
}

fn criterion_10() -> Outcome {
    let cases = corpus::bundled(DEFAULT_SEED);
    for c in &cases {
        let og = OrderedDigraph::new(c.graph.clone(), c.ordering.clone()).map_err(|e| e.to_string())?;
        let q = preset_query(c.preset, og, c.k, c.z, c.l).map_err(|e| e.to_string())?;
        let a = count_subgraphs(&q).map_err(|e| e.to_string())?.count;
        let b = oracle_count(&oracle_query(&q), wide_caps()).map_err(|e| e.to_string())?.count;
        ensure(a == b, || format!("{} {}: count {a}, oracle {b}", c.name, c.preset))?;
    }
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_slicecount"))
        .args(["bench", "--jobs", "2"])
        .output()
        .map_err(|e| e.to_string())?;
    let table = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success(), || format!("bench failed: {}", table.lines().last().unwrap_or("")))?;
    let summary = format!("{} cases, 0 mismatches", cases.len());
    ensure(table.contains(&summary), || format!("bench summary missing: {summary}"))?;
    Ok(format!("{} (graph, query) pairs agree; bench table clean", cases.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Hamiltonian cycles of bidirected K4 and K5", criterion_1),
        ("DAG sanity", criterion_2),
        ("binary-tree orderings", criterion_3),
        ("zig-zag at most 2*dvsn+1", criterion_4),
        ("sub-slice paths are subgraphs", criterion_5),
        ("property automata match model checking", criterion_6),
        ("saturation of connected, k=2, z=2", criterion_7),
        ("path counting on DAGs", criterion_8),
        ("maximal-weight counting", criterion_9),
        ("count and oracle agree on the corpus", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
