//! Counting subgraphs: decompose the host along its ordering, build the
//! sub-decomposition slice graph, intersect it with the saturated slice
//! language of the query, restrict the vertex count and, optionally, the
//! weight, then count accepting paths.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use serde::Serialize;

use crate::digraph::{Digraph, Weight, WeightSemigroup};
use crate::error::{Error, Result};
use crate::mso::compile::{compile, input_alphabet};
use crate::mso::{parse_formula, SaturatedView, Sentence};
use crate::oracle::{admits, OracleCaps, OracleQuery, Subgraph};
use crate::ordering::{BoundStatus, OrderedDigraph};
use crate::slice::{decompose_along_ordering, UnitDecomposition};
use crate::slice_graph::{
    build_sub_slice_graph, counter_expansion, intersect, numbering_expansion, weight_expansion, SliceGraph,
    VertexOrigin,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Count,
    CountMaximal,
}

#[derive(Clone, Debug)]
pub struct CountQuery {
    pub graph: OrderedDigraph,
    pub sentence: Sentence,
    pub k: usize,
    pub z: usize,
    /// Required number of vertices; `None` counts subgraphs of every size.
    pub l: Option<usize>,
    pub omega: WeightSemigroup,
    pub mode: Mode,
    /// Number of witnesses to reconstruct.
    pub witnesses: usize,
}

impl CountQuery {
    pub fn new(graph: OrderedDigraph, sentence: Sentence, k: usize, z: usize, l: Option<usize>) -> Self {
        CountQuery {
            graph,
            sentence,
            k,
            z,
            l,
            omega: WeightSemigroup::trivial(),
            mode: Mode::Count,
            witnesses: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.z == 0 {
            return Err(Error::InvalidQuery("k and z must be at least 1".into()));
        }
        if self.l.is_some_and(|l| l > self.graph.graph.n()) {
            return Err(Error::InvalidQuery("l exceeds the number of vertices".into()));
        }
        if !self.sentence.formula.free_vars().is_empty() {
            return Err(Error::InvalidQuery("formula must be closed".into()));
        }
        Ok(())
    }
}

/// A subgraph by host vertex and edge ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageStats {
    pub stage: String,
    pub vertices: usize,
    pub edges: usize,
    pub millis: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountResult {
    #[serde(serialize_with = "as_decimal")]
    pub count: BigUint,
    pub max_weight: Option<Weight>,
    pub witnesses: Vec<Witness>,
    pub c: usize,
    pub q: usize,
    pub stats: Vec<StageStats>,
    pub warnings: Vec<String>,
}

fn as_decimal<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_str_radix(10))
}

struct Timer {
    stats: Vec<StageStats>,
    at: Instant,
}

impl Timer {
    fn new() -> Self {
        Timer { stats: Vec::new(), at: Instant::now() }
    }

    fn record(&mut self, stage: &str, vertices: usize, edges: usize) {
        let now = Instant::now();
        self.stats.push(StageStats {
            stage: stage.to_string(),
            vertices,
            edges,
            millis: (now - self.at).as_secs_f64() * 1e3,
        });
        self.at = now;
    }

    fn graph(&mut self, stage: &str, g: &SliceGraph) {
        self.record(stage, g.len(), g.edge_count());
    }
}

fn warnings_for(q: &CountQuery) -> Vec<String> {
    match q.graph.zigzag_bound {
        Some((b, BoundStatus::Verified)) if b <= q.z => Vec::new(),
        Some((b, BoundStatus::Verified)) => vec![format!(
            "ordering has zig-zag number {b} > z = {}; only subgraphs of zig-zag number at most z are counted",
            q.z
        )],
        Some((b, BoundStatus::Claimed)) if b <= q.z => {
            vec![format!("zig-zag bound {b} of the ordering is claimed, not verified")]
        }
        Some((b, BoundStatus::Claimed)) => vec![format!(
            "claimed zig-zag bound {b} exceeds z = {}; only subgraphs of zig-zag number at most z are counted",
            q.z
        )],
        None => vec!["ordering has no zig-zag bound; proceeding with the requested z".to_string()],
    }
}

fn setup(q: &CountQuery, t: &mut Timer) -> Result<(UnitDecomposition, SliceGraph, usize, usize)> {
    q.validate()?;
    let u = decompose_along_ordering(&q.graph.graph, &q.graph.ordering)?;
    t.record("decompose", u.len(), 0);
    let width = u.width();
    let c = (q.k * q.z).min(width);
    let sub = build_sub_slice_graph(&u, c)?;
    t.graph("sub", &sub);
    Ok((u, sub, c, width))
}

/// Runs the counting pipeline. The property automaton is explored only
/// on the letters the host decomposition presents.
pub fn count_subgraphs(q: &CountQuery) -> Result<CountResult> {
    let mut t = Timer::new();
    let (u, sub, c, width) = setup(q, &mut t)?;
    let mut view = SaturatedView::new(&q.sentence, q.k, q.z, c)?;
    let product = lazy_product(q, &u, &sub, &mut view)?;
    let stats = view.automaton_stats();
    t.record("automaton", stats.states, stats.transitions);
    t.graph("product", &product);
    finish(q, product, c, width, t)
}

/// The same count, through the explicit constructions: compile the
/// property over the input alphabet, expand numberings and weights,
/// intersect, and apply the vertex counter.
pub fn count_subgraphs_explicit(q: &CountQuery) -> Result<CountResult> {
    let mut t = Timer::new();
    let (u, sub, c, width) = setup(q, &mut t)?;
    let alphabet = input_alphabet(&u, c)?;
    let sg = compile(&q.sentence, q.k, q.z, c, &alphabet)?;
    t.graph("saturated", &sg);
    let numbered = numbering_expansion(&sg, width.max(c))?;
    t.graph("numbered", &numbered);
    let weighted = weight_expansion(&numbered, &q.omega);
    t.graph("weighted", &weighted);
    let mut p = intersect(&sub, &weighted)?;
    t.graph("intersection", &p);
    if let Some(l) = q.l {
        p = counter_expansion(&p, l).trim();
        t.graph("counter", &p);
    }
    finish(q, p, c, width, t)
}

fn finish(q: &CountQuery, mut p: SliceGraph, c: usize, width: usize, mut t: Timer) -> Result<CountResult> {
    let max_weight = p.max_final_total();
    if q.mode == Mode::CountMaximal {
        p = p.prune_non_maximal_finals()?;
        t.graph("maximal", &p);
    }
    // Distinct accepting paths are distinct subgraphs; labels of parallel
    // self-loops may coincide, so paths rather than strings are counted.
    let count = p.count_walks()?;
    t.record("count", 0, 0);
    let witnesses = if q.witnesses > 0 { reconstruct(&p, q.witnesses) } else { Vec::new() };
    Ok(CountResult { count, max_weight, witnesses, c, q: width, stats: t.stats, warnings: warnings_for(q) })
}

fn lazy_product(
    q: &CountQuery,
    u: &UnitDecomposition,
    sub: &SliceGraph,
    view: &mut SaturatedView,
) -> Result<SliceGraph> {
    let layers = sub.layers.as_ref().expect("sub-decomposition graphs are layered");
    let len = u.len();
    // centers_after[i]: slices with a center at positions >= i.
    let mut centers_after = vec![0usize; len + 1];
    for i in (0..len).rev() {
        centers_after[i] = centers_after[i + 1] + usize::from(!u.slices[i].centers.is_empty());
    }
    let omega = &q.omega;
    let completed = |v: u32| omega.sum(sub.labels[v as usize].slice.completed_edges().map(|e| e.weight));
    let has_center = |v: u32| usize::from(!sub.labels[v as usize].slice.centers.is_empty());
    let viable = |layer: usize, cnt: usize| match q.l {
        Some(l) => cnt <= l && cnt + centers_after[layer + 1] >= l,
        None => true,
    };
    let mut p = SliceGraph::new(sub.meta);
    let mut p_layers = Vec::new();
    let mut totals = Vec::new();
    let mut origins: Vec<Arc<VertexOrigin>> = Vec::new();
    type Key = (u32, u32, Weight, usize);
    let mut index: HashMap<Key, u32> = HashMap::new();
    let mut frontier: Vec<(u32, Key)> = Vec::new();
    let last = len - 1;
    let mut add = |p: &mut SliceGraph, key: Key, initial: bool, view: &SaturatedView| -> (u32, bool) {
        if let Some(&id) = index.get(&key) {
            return (id, false);
        }
        let (v, s, tot, cnt) = key;
        let layer = layers[v as usize] as usize;
        let fin = layer == last && view.accepts(s) && q.l.is_none_or(|l| l == cnt);
        let id = p.add_vertex(sub.labels[v as usize].clone(), initial, fin);
        p_layers.push(layer as u32);
        totals.push(tot);
        origins.push(sub.origins.as_ref().map(|o| o[v as usize].clone()).unwrap_or_default());
        index.insert(key, id);
        (id, true)
    };
    for v in sub.initials() {
        let cnt = has_center(v);
        if !viable(0, cnt) {
            continue;
        }
        if let Some(s) = view.start(&sub.labels[v as usize])? {
            let key = (v, s, omega.combine(omega.identity(), completed(v)), cnt);
            let (id, _) = add(&mut p, key, true, view);
            frontier.push((id, key));
        }
    }
    for layer in 1..len {
        let mut next = Vec::new();
        for (id, (v, s, tot, cnt)) in std::mem::take(&mut frontier) {
            for &w in &sub.succ[v as usize] {
                let cnt2 = cnt + has_center(w);
                if !viable(layer, cnt2) {
                    continue;
                }
                let Some(s2) = view.advance(s, &sub.labels[w as usize])? else { continue };
                let key = (w, s2, omega.combine(tot, completed(w)), cnt2);
                let (nid, fresh) = add(&mut p, key, false, view);
                p.add_edge(id, nid);
                if fresh {
                    next.push((nid, key));
                }
            }
        }
        frontier = next;
    }
    p.layers = Some(p_layers);
    p.totals = Some(totals);
    p.origins = Some(origins);
    Ok(p.trim())
}

fn reconstruct(p: &SliceGraph, cap: usize) -> Vec<Witness> {
    let Some(origins) = &p.origins else { return Vec::new() };
    let mut out = Vec::new();
    let mut path: Vec<u32> = Vec::new();
    fn walk(p: &SliceGraph, origins: &[Arc<VertexOrigin>], v: u32, path: &mut Vec<u32>, out: &mut Vec<Witness>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        path.push(v);
        if p.fin[v as usize] {
            let mut w = Witness::default();
            for &x in path.iter() {
                let o = &origins[x as usize];
                w.vertices.extend(o.center);
                w.edges.extend(o.completed.iter().copied());
            }
            w.vertices.sort_unstable();
            w.edges.sort_unstable();
            out.push(w);
        }
        for &x in &p.succ[v as usize] {
            walk(p, origins, x, path, out, cap);
        }
        path.pop();
    }
    for v in p.initials() {
        walk(p, origins, v, &mut path, &mut out, cap);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub checked: usize,
    pub failures: Vec<(Witness, String)>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-checks every witness with the brute-force oracle.
pub fn audit_witnesses(r: &CountResult, q: &CountQuery) -> Result<AuditReport> {
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
    let caps = OracleCaps { elements: 64, ..OracleCaps::default() };
    let mut failures = Vec::new();
    let best = r.witnesses.iter().map(|w| q.graph.graph.weight_of(&q.omega, &w.edges)).max();
    for w in &r.witnesses {
        let s = Subgraph { vertices: w.vertices.clone(), edges: w.edges.clone() };
        let g = &q.graph.graph;
        let consistent = s.edges.iter().all(|&e| {
            e < g.m() && s.vertices.binary_search(&g.edge(e).src).is_ok() && s.vertices.binary_search(&g.edge(e).dst).is_ok()
        }) && s.vertices.iter().all(|&v| v < g.n());
        if !consistent {
            failures.push((w.clone(), "not a subgraph of the host".to_string()));
            continue;
        }
        if q.l.is_some_and(|l| l != s.vertices.len()) {
            failures.push((w.clone(), format!("has {} vertices", s.vertices.len())));
            continue;
        }
        if !admits(&oq, &s, caps)? {
            failures.push((w.clone(), "rejected by the oracle".to_string()));
            continue;
        }
        if q.mode == Mode::CountMaximal {
            let wt = s.weight(g, &q.omega);
            if Some(wt) != best || r.max_weight.is_some_and(|m| m != wt) {
                failures.push((w.clone(), format!("weight {wt} is not maximal")));
            }
        }
    }
    Ok(AuditReport { checked: r.witnesses.len(), failures })
}

pub const PRESETS: [&str; 4] = ["hamiltonian", "connected-spanning", "forest", "bipartite"];

/// Fills a query from a named preset. `hamiltonian` fixes `k = 2`,
/// `l = n` and the one-element semigroup; `connected-spanning` fixes
/// `l = n`.
pub fn preset_query(name: &str, graph: OrderedDigraph, k: usize, z: usize, l: Option<usize>) -> Result<CountQuery> {
    let n = graph.graph.n();
    let (text, k, l) = match name {
        "hamiltonian" => ("(hamiltonian-cycle)", 2, Some(n)),
        "connected-spanning" => ("(connected)", k, Some(n)),
        "forest" => ("(forest)", k, l),
        "bipartite" => ("(bipartite)", k, l),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    let sentence = parse_formula(text)?;
    Ok(CountQuery::new(graph, sentence, k, z, l))
}

/// Pairs a graph with an ordering and measures its zig-zag number.
pub fn ordered(g: Digraph, ordering: Vec<usize>) -> Result<OrderedDigraph> {
    let mut og = OrderedDigraph::new(g, ordering)?;
    og.verify();
    Ok(og)
}
