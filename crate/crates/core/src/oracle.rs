//! Brute-force ground truth: subgraph enumeration, direct evaluation of
//! formulas by quantifying over all element subsets, path covers, and
//! direct checkers for the graph-property macros.
//!
//! Nothing here goes through slices or automata.

use std::cell::OnceCell;

use num_bigint::BigUint;

use crate::digraph::{positions, Digraph, Weight, WeightSemigroup};
use crate::error::{Error, Result};
use crate::mso::{Formula, Sentence};

pub const DEFAULT_VERTEX_CAP: usize = 8;
pub const DEFAULT_ELEMENT_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    /// Largest host graph whose subgraphs are enumerated.
    pub vertices: usize,
    /// Largest `n + m` for quantification over arbitrary subsets.
    pub elements: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { vertices: DEFAULT_VERTEX_CAP, elements: DEFAULT_ELEMENT_CAP }
    }
}

impl OracleCaps {
    /// Defaults overridden by `SLICECOUNT_ORACLE_CAP` (vertex cap).
    pub fn from_env() -> Self {
        let mut caps = OracleCaps::default();
        if let Some(v) = std::env::var("SLICECOUNT_ORACLE_CAP").ok().and_then(|s| s.parse().ok()) {
            caps.vertices = v;
        }
        caps
    }
}

/// A subgraph of a host digraph, by host vertex and edge ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Subgraph {
    pub fn extract(&self, g: &Digraph) -> Digraph {
        g.subgraph(&self.vertices, &self.edges)
    }

    pub fn weight(&self, g: &Digraph, omega: &WeightSemigroup) -> Weight {
        g.weight_of(omega, &self.edges)
    }
}

/// Every subgraph of `g` with exactly `l` vertices (all sizes when `l` is
/// `None`).
pub fn enumerate_subgraphs(g: &Digraph, l: Option<usize>, caps: OracleCaps) -> Result<Vec<Subgraph>> {
    let mut out = Vec::new();
    for_each_subgraph(g, l, caps, |s| {
        out.push(s.clone());
        true
    })?;
    Ok(out)
}

/// Calls `f` on every subgraph with `l` vertices; stops when `f` returns
/// false.
pub fn for_each_subgraph(
    g: &Digraph,
    l: Option<usize>,
    caps: OracleCaps,
    mut f: impl FnMut(&Subgraph) -> bool,
) -> Result<()> {
    let n = g.n();
    if n > caps.vertices {
        return Err(Error::Resource(format!("oracle vertex cap {} exceeded by {n} vertices", caps.vertices)));
    }
    for vmask in 0u64..1 << n {
        if l.is_some_and(|l| vmask.count_ones() as usize != l) {
            continue;
        }
        let vertices: Vec<usize> = (0..n).filter(|&v| vmask >> v & 1 == 1).collect();
        let inside: Vec<usize> =
            (0..g.m()).filter(|&e| vmask >> g.edge(e).src & 1 == 1 && vmask >> g.edge(e).dst & 1 == 1).collect();
        if inside.len() >= 63 {
            return Err(Error::Resource("too many edges for subset enumeration".into()));
        }
        for emask in 0u64..1 << inside.len() {
            let edges = inside.iter().enumerate().filter(|(i, _)| emask >> i & 1 == 1).map(|(_, &e)| e).collect();
            if !f(&Subgraph { vertices: vertices.clone(), edges }) {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// A directed simple path or simple cycle as vertex and edge bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Walk {
    vertices: u64,
    edges: u64,
    cycle: bool,
    /// Maximum number of edges crossing a single cut of the ordering.
    crossing: usize,
}

fn walks(g: &Digraph, pos: &[usize]) -> Vec<Walk> {
    let n = g.n();
    let mut out = Vec::new();
    for v in 0..n {
        out.push(Walk { vertices: 1 << v, edges: 0, cycle: false, crossing: 0 });
    }
    fn crossing(g: &Digraph, pos: &[usize], edges: u64) -> usize {
        let mut counts = vec![0usize; g.n()];
        for e in 0..g.m() {
            if edges >> e & 1 == 1 {
                let (a, b) = (pos[g.edge(e).src], pos[g.edge(e).dst]);
                for c in a.min(b)..a.max(b) {
                    counts[c] += 1;
                }
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }
    fn extend(g: &Digraph, pos: &[usize], start: usize, at: usize, vs: u64, es: u64, out: &mut Vec<Walk>) {
        for e in g.out_edges(at) {
            let d = g.edge(e).dst;
            if d == start && es != 0 && d != at {
                let es2 = es | 1 << e;
                out.push(Walk { vertices: vs, edges: es2, cycle: true, crossing: crossing(g, pos, es2) });
            }
            if vs >> d & 1 == 1 {
                continue;
            }
            let (vs2, es2) = (vs | 1 << d, es | 1 << e);
            out.push(Walk { vertices: vs2, edges: es2, cycle: false, crossing: crossing(g, pos, es2) });
            extend(g, pos, start, d, vs2, es2, out);
        }
    }
    for v in 0..n {
        extend(g, pos, v, v, 1 << v, 0, &mut out);
    }
    // A 2-cycle through a pair of antiparallel edges also arises from each
    // of its vertices; keep distinct edge sets only.
    out.sort_by_key(|w| (w.cycle, w.vertices, w.edges));
    out.dedup_by(|a, b| a.cycle && b.cycle && a.edges == b.edges);
    out
}

/// Direct evaluation context for one (small) digraph.
pub struct ModelChecker<'a> {
    g: &'a Digraph,
    pos: Vec<usize>,
    caps: OracleCaps,
    walks: OnceCell<Vec<Walk>>,
}

impl<'a> ModelChecker<'a> {
    /// `ordering` is used only by zig-zag constraints; the identity is used
    /// when it is absent.
    pub fn new(g: &'a Digraph, ordering: Option<&[usize]>, caps: OracleCaps) -> Result<Self> {
        if g.n() + g.m() > 64 {
            return Err(Error::Resource("graph too large for the model checker".into()));
        }
        let pos = match ordering {
            Some(o) => positions(g.n(), o)?,
            None => (0..g.n()).collect(),
        };
        Ok(ModelChecker { g, pos, caps, walks: OnceCell::new() })
    }

    fn walks(&self) -> &[Walk] {
        self.walks.get_or_init(|| walks(self.g, &self.pos))
    }

    fn all_vertices(&self) -> u64 {
        (1u64 << self.g.n()) - 1
    }

    fn all_edges(&self) -> u64 {
        if self.g.m() == 0 {
            0
        } else {
            (u64::MAX >> (64 - self.g.m())) << self.g.n()
        }
    }

    pub fn check(&self, s: &Sentence) -> Result<bool> {
        if !s.formula.free_vars().is_empty() {
            return Err(Error::InvalidQuery("formula has free variables".into()));
        }
        let mut env = vec![0u64; s.var_count()];
        self.eval(&s.formula, &mut env)
    }

    /// Evaluates with set variables assigned to bitmasks over vertices
    /// `0..n` followed by edges `n..n+m`.
    pub fn eval(&self, f: &Formula, env: &mut Vec<u64>) -> Result<bool> {
        let n = self.g.n();
        let vbits = self.all_vertices();
        let ebits = self.all_edges();
        let single = |m: u64| m.count_ones() == 1;
        let edge_of = |m: u64| m.trailing_zeros() as usize - n;
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::V(x) => env[*x as usize] & !vbits == 0,
            Formula::E(x) => env[*x as usize] & !ebits == 0,
            Formula::Singleton(x) => single(env[*x as usize]),
            Formula::Subset(x, y) => env[*x as usize] & !env[*y as usize] == 0,
            Formula::Src(x, y) | Formula::Tgt(x, y) => {
                let (mx, my) = (env[*x as usize], env[*y as usize]);
                if !single(mx) || !single(my) || mx & ebits == 0 || my & vbits == 0 {
                    false
                } else {
                    let e = self.g.edge(edge_of(mx));
                    let v = if matches!(f, Formula::Src(..)) { e.src } else { e.dst };
                    my == 1 << v
                }
            }
            Formula::VLabel(x, a) => {
                let m = env[*x as usize];
                m & !vbits == 0 && (0..n).filter(|&v| m >> v & 1 == 1).all(|v| self.g.vertex_label(v) == a)
            }
            Formula::ELabel(x, b) => {
                let m = env[*x as usize];
                m & !ebits == 0 && (0..self.g.m()).filter(|&e| m >> (n + e) & 1 == 1).all(|e| self.g.edge(e).label == *b)
            }
            Formula::And(fs) => {
                for g in fs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for g in fs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Not(g) => !self.eval(g, env)?,
            Formula::Exists(v, g) => {
                let total = n + self.g.m();
                if total > self.caps.elements {
                    return Err(Error::Resource(format!(
                        "oracle element cap {} exceeded by {total} elements",
                        self.caps.elements
                    )));
                }
                let saved = env[*v as usize];
                let mut found = false;
                for m in 0u64..1 << total {
                    env[*v as usize] = m;
                    if self.eval(g, env)? {
                        found = true;
                        break;
                    }
                }
                env[*v as usize] = saved;
                found
            }
            Formula::Path(x, y) => {
                let (mx, my) = (env[*x as usize], env[*y as usize]);
                (mx == 0 && my == 0) || self.walks().iter().any(|w| !w.cycle && w.vertices == mx && w.edges << n == my)
            }
            Formula::PathVertices(x) => {
                let mx = env[*x as usize];
                mx == 0 || self.walks().iter().any(|w| !w.cycle && w.vertices == mx)
            }
            Formula::PathEdges(y) => {
                let my = env[*y as usize];
                my == 0 || self.walks().iter().any(|w| !w.cycle && w.edges << n == my)
            }
            Formula::ZigZag(z) => self.zigzag() <= *z,
            Formula::Unitable(k) => self.union_of_paths(*k),
            Formula::HamiltonianCycle => is_hamiltonian_cycle(self.g),
            Formula::Connected => is_connected(self.g),
            Formula::Forest => is_forest(self.g),
            Formula::Bipartite => is_bipartite(self.g),
        })
    }

    /// Maximum cut crossing of a simple path or cycle under the ordering.
    pub fn zigzag(&self) -> usize {
        self.walks().iter().map(|w| w.crossing).max().unwrap_or(0)
    }

    pub fn union_of_paths(&self, k: usize) -> bool {
        let g = self.g;
        let all_v = self.all_vertices();
        let all_e = if g.m() == 0 { 0 } else { u64::MAX >> (64 - g.m()) };
        if all_v == 0 {
            return true;
        }
        if g.edges().iter().any(|e| e.src == e.dst) {
            return false;
        }
        // Only paths that cannot be extended at either end matter.
        let paths: Vec<&Walk> = self.walks().iter().filter(|w| !w.cycle).collect();
        let maximal: Vec<(u64, u64)> = paths
            .iter()
            .filter(|w| {
                !paths.iter().any(|o| {
                    o.edges != w.edges && o.edges & w.edges == w.edges && o.vertices & w.vertices == w.vertices
                })
            })
            .map(|w| (w.vertices, w.edges))
            .collect();
        fn cover(paths: &[(u64, u64)], k: usize, v: u64, e: u64) -> bool {
            if v == 0 && e == 0 {
                return true;
            }
            if k == 0 {
                return false;
            }
            // Branch on the paths covering the first uncovered element.
            let (bit_v, bit_e) = if e != 0 { (0, e & e.wrapping_neg()) } else { (v & v.wrapping_neg(), 0) };
            paths
                .iter()
                .filter(|(pv, pe)| pv & bit_v != 0 || pe & bit_e != 0)
                .any(|(pv, pe)| cover(paths, k - 1, v & !pv, e & !pe))
        }
        cover(&maximal, k, all_v, all_e)
    }
}

/// Union of `k` directed simple paths covering every vertex and edge.
pub fn is_union_of_k_paths(g: &Digraph, k: usize) -> Result<bool> {
    Ok(ModelChecker::new(g, None, OracleCaps::default())?.union_of_paths(k))
}

pub fn model_check(g: &Digraph, s: &Sentence) -> Result<bool> {
    ModelChecker::new(g, None, OracleCaps::default())?.check(s)
}

fn components(g: &Digraph) -> (Vec<usize>, bool) {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    let mut cyclic = false;
    for e in g.edges() {
        let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
        if a == b {
            cyclic = true;
        } else {
            parent[a] = b;
        }
    }
    let roots = (0..n).map(|v| find(&mut parent, v)).collect();
    (roots, cyclic)
}

/// Weak connectivity; the empty graph is connected.
pub fn is_connected(g: &Digraph) -> bool {
    let (roots, _) = components(g);
    roots.iter().all(|&r| r == roots[0])
}

/// The disorientation, as a multigraph, has no cycle. Antiparallel pairs,
/// parallel edges and self-loops are cycles.
pub fn is_forest(g: &Digraph) -> bool {
    !components(g).1
}

pub fn is_bipartite(g: &Digraph) -> bool {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.src].push(e.dst);
        adj[e.dst].push(e.src);
    }
    let mut color = vec![None; n];
    for s in 0..n {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let cu = color[u].expect("colored");
            for &w in &adj[u] {
                match color[w] {
                    None => {
                        color[w] = Some(!cu);
                        stack.push(w);
                    }
                    Some(cw) if cw == cu => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// Connected with every in-degree and out-degree equal to one.
pub fn is_hamiltonian_cycle(g: &Digraph) -> bool {
    let n = g.n();
    let mut indeg = vec![0; n];
    let mut outdeg = vec![0; n];
    for e in g.edges() {
        outdeg[e.src] += 1;
        indeg[e.dst] += 1;
    }
    is_connected(g) && indeg.iter().chain(&outdeg).all(|&d| d == 1)
}

/// A counting query answered by enumeration.
#[derive(Clone, Debug)]
pub struct OracleQuery<'a> {
    pub graph: &'a Digraph,
    pub ordering: &'a [usize],
    pub sentence: &'a Sentence,
    pub k: usize,
    pub z: usize,
    pub l: Option<usize>,
    pub omega: &'a WeightSemigroup,
    pub maximal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCount {
    pub count: BigUint,
    pub max_weight: Option<Weight>,
    pub subgraphs: Vec<Subgraph>,
}

/// Whether a subgraph satisfies the formula, is a union of `k` paths and
/// has zig-zag number at most `z` under the induced ordering.
pub fn admits(q: &OracleQuery<'_>, s: &Subgraph, caps: OracleCaps) -> Result<bool> {
    let h = s.extract(q.graph);
    let pos = positions(q.graph.n(), q.ordering)?;
    let mut induced: Vec<usize> = (0..s.vertices.len()).collect();
    induced.sort_by_key(|&i| pos[s.vertices[i]]);
    let mc = ModelChecker::new(&h, Some(&induced), caps)?;
    Ok(mc.check(q.sentence)? && mc.union_of_paths(q.k) && mc.zigzag() <= q.z)
}

pub fn oracle_count(q: &OracleQuery<'_>, caps: OracleCaps) -> Result<OracleCount> {
    let mut found = Vec::new();
    let mut err = None;
    for_each_subgraph(q.graph, q.l, caps, |s| match admits(q, s, caps) {
        Ok(true) => {
            found.push(s.clone());
            true
        }
        Ok(false) => true,
        Err(e) => {
            err = Some(e);
            false
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let weights: Vec<Weight> = found.iter().map(|s| s.weight(q.graph, q.omega)).collect();
    let max_weight = weights.iter().copied().max();
    if q.maximal {
        if let Some(mw) = max_weight {
            found = found.into_iter().zip(&weights).filter(|(_, &w)| w == mw).map(|(s, _)| s).collect();
        }
    }
    Ok(OracleCount { count: BigUint::from(found.len()), max_weight, subgraphs: found })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::mso::parse_formula;

    #[test]
    fn subgraph_enumeration() {
        let caps = OracleCaps::default();
        let e = Digraph::from_edges(2, &[(0, 1)]);
        assert_eq!(enumerate_subgraphs(&e, Some(2), caps).unwrap().len(), 2);
        assert_eq!(enumerate_subgraphs(&e, None, caps).unwrap().len(), 5);
        let tri = corpus::directed_cycle(3);
        assert_eq!(enumerate_subgraphs(&tri, Some(3), caps).unwrap().len(), 8);
        let zero = enumerate_subgraphs(&tri, Some(0), caps).unwrap();
        assert_eq!(zero, vec![Subgraph::default()]);
        assert!(enumerate_subgraphs(&corpus::directed_path(9), None, caps).is_err());
    }

    #[test]
    fn model_checking_examples() {
        let one = Digraph::new(1);
        assert!(model_check(&one, &parse_formula("(exists X (and (V X) (singleton X)))").unwrap()).unwrap());
        let bip = parse_formula("(bipartite)").unwrap();
        assert!(model_check(&corpus::directed_cycle(2), &bip).unwrap());
        assert!(!model_check(&corpus::directed_cycle(3), &bip).unwrap());
        let ham = parse_formula("(hamiltonian-cycle)").unwrap();
        assert!(model_check(&corpus::directed_cycle(3), &ham).unwrap());
        assert!(!model_check(&corpus::directed_path(3), &ham).unwrap());
    }

    #[test]
    fn macro_definitions_agree_with_direct_checkers() {
        for text in ["(connected)", "(forest)", "(bipartite)", "(hamiltonian-cycle)"] {
            let direct = parse_formula(text).unwrap();
            let expanded = direct.expand_macros();
            for g in corpus::all_simple_digraphs(3) {
                assert_eq!(model_check(&g, &direct).unwrap(), model_check(&g, &expanded).unwrap(), "{text} on {g:?}");
            }
        }
    }

    #[test]
    fn path_covers() {
        assert!(is_union_of_k_paths(&corpus::directed_path(4), 1).unwrap());
        assert!(!is_union_of_k_paths(&corpus::directed_cycle(4), 1).unwrap());
        assert!(is_union_of_k_paths(&corpus::directed_cycle(4), 2).unwrap());
        let two = Digraph::from_edges(4, &[(0, 1), (2, 3)]);
        assert!(!is_union_of_k_paths(&two, 1).unwrap());
        assert!(is_union_of_k_paths(&two, 2).unwrap());
        assert!(is_union_of_k_paths(&corpus::grid_of_paths(4, 4), 4).unwrap());
    }

    #[test]
    fn zigzag_of_small_graphs() {
        let g = Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (3, 1)]);
        assert_eq!(ModelChecker::new(&g, Some(&[0, 1, 2, 3]), OracleCaps::default()).unwrap().zigzag(), 3);
        let c2 = corpus::directed_cycle(2);
        assert_eq!(ModelChecker::new(&c2, None, OracleCaps::default()).unwrap().zigzag(), 2);
    }

    #[test]
    fn hamiltonian_count_on_k4() {
        let g = corpus::bidirected_complete(4);
        let order = [0, 1, 2, 3];
        let s = parse_formula("(hamiltonian-cycle)").unwrap();
        let omega = WeightSemigroup::trivial();
        let q = OracleQuery { graph: &g, ordering: &order, sentence: &s, k: 2, z: 4, l: Some(4), omega: &omega, maximal: false };
        assert_eq!(oracle_count(&q, OracleCaps::default()).unwrap().count, BigUint::from(6u32));
    }
}
