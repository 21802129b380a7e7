//! Vertex orderings: zig-zag verification, directed vertex separation and
//! the depth-first ordering of bidirected trees.

use std::collections::HashMap;

use crate::digraph::{positions, Digraph};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundStatus {
    Verified,
    Claimed,
}

/// A digraph together with a vertex ordering and an optional zig-zag bound.
#[derive(Clone, Debug)]
pub struct OrderedDigraph {
    pub graph: Digraph,
    pub ordering: Vec<usize>,
    pub zigzag_bound: Option<(usize, BoundStatus)>,
}

impl OrderedDigraph {
    pub fn new(graph: Digraph, ordering: Vec<usize>) -> Result<Self> {
        positions(graph.n(), &ordering)?;
        Ok(OrderedDigraph { graph, ordering, zigzag_bound: None })
    }

    /// Runs the exhaustive verifier and records the exact zig-zag number.
    pub fn verify(&mut self) -> usize {
        let z = zigzag_number(&self.graph, &self.ordering).expect("ordering validated at construction");
        self.zigzag_bound = Some((z, BoundStatus::Verified));
        z
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZigZagVerdict {
    Verified,
    /// A directed simple path, as a vertex sequence, crossing some cut more
    /// than `z` times.
    Counterexample(Vec<usize>),
}

struct PathSearch<'a> {
    adj: Vec<Vec<usize>>,
    pos: &'a [usize],
    crossings: Vec<usize>,
    on_path: Vec<bool>,
    path: Vec<usize>,
}

impl<'a> PathSearch<'a> {
    fn new(g: &Digraph, pos: &'a [usize]) -> Self {
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for e in g.edges() {
            if e.src != e.dst {
                adj[e.src].push(e.dst);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        PathSearch { adj, pos, crossings: vec![0; n.saturating_sub(1)], on_path: vec![false; n], path: Vec::new() }
    }

    fn span(&self, u: usize, v: usize) -> std::ops::Range<usize> {
        let (a, b) = (self.pos[u].min(self.pos[v]), self.pos[u].max(self.pos[v]));
        a..b
    }

    /// Extends the current path by `v`; returns the new maximum crossing
    /// count over the cuts the edge spans.
    fn push(&mut self, u: usize, v: usize) -> usize {
        let mut peak = 0;
        for t in self.span(u, v) {
            self.crossings[t] += 1;
            peak = peak.max(self.crossings[t]);
        }
        self.on_path[v] = true;
        self.path.push(v);
        peak
    }

    fn pop(&mut self, u: usize, v: usize) {
        for t in self.span(u, v) {
            self.crossings[t] -= 1;
        }
        self.on_path[v] = false;
        self.path.pop();
    }

    /// Depth-first search over simple paths starting at the last vertex of
    /// the current path. `visit` returns false to stop the search.
    fn explore(&mut self, limit: usize, best: &mut usize) -> bool {
        let u = *self.path.last().expect("nonempty path");
        let start = self.path[0];
        for i in 0..self.adj[u].len() {
            let v = self.adj[u][i];
            if v == start && self.path.len() >= 2 {
                // Closing the path into a simple cycle.
                let peak = self.push(u, v);
                *best = (*best).max(peak);
                if peak > limit {
                    return false;
                }
                self.pop(u, v);
                self.on_path[start] = true;
                continue;
            }
            if self.on_path[v] {
                continue;
            }
            let peak = self.push(u, v);
            *best = (*best).max(peak);
            if peak > limit {
                return false;
            }
            if !self.explore(limit, best) {
                return false;
            }
            self.pop(u, v);
        }
        true
    }

    fn run(&mut self, limit: usize) -> (usize, Option<Vec<usize>>) {
        let mut best = 0;
        for s in 0..self.adj.len() {
            self.on_path[s] = true;
            self.path.push(s);
            if !self.explore(limit, &mut best) {
                return (best, Some(self.path.clone()));
            }
            self.path.pop();
            self.on_path[s] = false;
        }
        (best, None)
    }
}

/// Checks that every directed simple path crosses every cut of `ordering` at
/// most `z` times. Simple cycles count as closed simple paths.
pub fn verify_zigzag(g: &Digraph, ordering: &[usize], z: usize) -> Result<ZigZagVerdict> {
    let pos = positions(g.n(), ordering)?;
    let (_, witness) = PathSearch::new(g, &pos).run(z);
    Ok(match witness {
        None => ZigZagVerdict::Verified,
        Some(p) => ZigZagVerdict::Counterexample(p),
    })
}

/// Maximum number of times a directed simple path crosses a single cut.
pub fn zigzag_number(g: &Digraph, ordering: &[usize]) -> Result<usize> {
    let pos = positions(g.n(), ordering)?;
    Ok(PathSearch::new(g, &pos).run(usize::MAX).0)
}

/// Directed vertex separation number of `ordering`: the largest number of
/// vertices at or after some position having an edge back before it.
pub fn dvsn(g: &Digraph, ordering: &[usize]) -> Result<usize> {
    let pos = positions(g.n(), ordering)?;
    let n = g.n();
    // Vertex v at position p with earliest back-target position b < p counts
    // for every cut i with b < i <= p.
    let mut earliest = vec![usize::MAX; n];
    for e in g.edges() {
        if pos[e.dst] < pos[e.src] {
            earliest[e.src] = earliest[e.src].min(pos[e.dst]);
        }
    }
    let mut diff = vec![0isize; n + 2];
    for v in 0..n {
        if earliest[v] != usize::MAX {
            diff[earliest[v] + 1] += 1;
            diff[pos[v] + 1] -= 1;
        }
    }
    let mut acc = 0isize;
    let mut best = 0isize;
    for d in diff {
        acc += d;
        best = best.max(acc);
    }
    Ok(best as usize)
}

/// Maximum vertex count supported by the exact separation-number search.
pub const MAX_DVSN_SEARCH_VERTICES: usize = 24;

/// Exact minimum directed vertex separation number over all orderings, with
/// an ordering achieving it. Candidates are tried in ascending id order.
pub fn search_min_dvsn_ordering(g: &Digraph, budget: Option<usize>) -> Result<(Vec<usize>, usize)> {
    let n = g.n();
    if n > MAX_DVSN_SEARCH_VERTICES {
        return Err(Error::Resource(format!(
            "separation-number search supports at most {MAX_DVSN_SEARCH_VERTICES} vertices, got {n}"
        )));
    }
    let mut back_into = vec![0u32; n];
    for e in g.edges() {
        if e.src != e.dst {
            back_into[e.src] |= 1 << e.dst;
        }
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let cost = |prefix: u32| -> usize {
        (0..n).filter(|&v| prefix & (1 << v) == 0 && back_into[v] & prefix != 0).count()
    };
    let cap = budget.unwrap_or(usize::MAX);
    let mut memo: HashMap<u32, usize> = HashMap::new();

    fn solve(
        prefix: u32,
        n: usize,
        full: u32,
        cap: usize,
        cost: &dyn Fn(u32) -> usize,
        memo: &mut HashMap<u32, usize>,
    ) -> usize {
        if let Some(&v) = memo.get(&prefix) {
            return v;
        }
        let here = cost(prefix);
        let value = if here > cap {
            usize::MAX
        } else if prefix == full {
            here
        } else {
            let mut best = usize::MAX;
            for v in 0..n {
                if prefix & (1 << v) == 0 {
                    best = best.min(solve(prefix | (1 << v), n, full, cap, cost, memo));
                    if best <= here {
                        break;
                    }
                }
            }
            best.max(here)
        };
        memo.insert(prefix, value);
        value
    }

    let best = solve(0, n, full, cap, &cost, &mut memo);
    if best == usize::MAX {
        return Err(Error::BudgetExceeded(cap));
    }
    let mut ordering = Vec::with_capacity(n);
    let mut prefix = 0u32;
    while prefix != full {
        let next = (0..n)
            .filter(|&v| prefix & (1 << v) == 0)
            .find(|&v| solve(prefix | (1 << v), n, full, cap, &cost, &mut memo) <= best)
            .expect("an optimal extension exists");
        ordering.push(next);
        prefix |= 1 << next;
    }
    Ok((ordering, best))
}

/// Wraps an ordering with the bound `2d + 1` derived from its directed
/// vertex separation number `d`.
pub fn ordering_from_dvsn(g: &Digraph, ordering: &[usize]) -> Result<OrderedDigraph> {
    let d = dvsn(g, ordering)?;
    let mut od = OrderedDigraph::new(g.clone(), ordering.to_vec())?;
    od.zigzag_bound = Some((2 * d + 1, BoundStatus::Claimed));
    Ok(od)
}

/// Depth-first preorder of a bidirected tree rooted at vertex 0, visiting
/// children in ascending id order.
pub fn dfs_ordering_bidirected_tree(g: &Digraph) -> Result<Vec<usize>> {
    let n = g.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut arcs: HashMap<(usize, usize), usize> = HashMap::new();
    for e in g.edges() {
        if e.src == e.dst {
            return Err(Error::NotBidirectedTree(format!("self-loop at {}", e.src)));
        }
        *arcs.entry((e.src, e.dst)).or_default() += 1;
    }
    for (&(a, b), &count) in &arcs {
        if count > 1 {
            return Err(Error::NotBidirectedTree(format!("parallel edges {a}->{b}")));
        }
        if !arcs.contains_key(&(b, a)) {
            return Err(Error::NotBidirectedTree(format!("edge {a}->{b} has no reverse")));
        }
    }
    if arcs.len() != 2 * (n - 1) {
        return Err(Error::NotBidirectedTree(format!("{} undirected edges for {} vertices", arcs.len() / 2, n)));
    }
    let mut children = vec![Vec::new(); n];
    for &(a, b) in arcs.keys() {
        children[a].push(b);
    }
    for c in &mut children {
        c.sort_unstable();
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in children[v].iter().rev() {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if order.len() != n {
        return Err(Error::NotBidirectedTree("underlying graph is disconnected".into()));
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn two_cycle() -> Digraph {
        Digraph::from_edges(2, &[(0, 1), (1, 0)])
    }

    /// Vertices 1..4 of the running example as 0..3: the path 0-1-2-3 and
    /// the detour 0-3-1-2.
    fn detour_graph() -> Digraph {
        Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (3, 1)])
    }

    #[test]
    fn zigzag_of_small_graphs() {
        let path = Digraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(zigzag_number(&path, &[0, 1, 2]).unwrap(), 1);
        assert_eq!(zigzag_number(&two_cycle(), &[0, 1]).unwrap(), 2);
        assert_eq!(zigzag_number(&Digraph::new(1), &[0]).unwrap(), 0);
    }

    #[test]
    fn detour_path_crosses_three_times() {
        let g = detour_graph();
        let straight = Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(verify_zigzag(&straight, &[0, 1, 2, 3], 1).unwrap(), ZigZagVerdict::Verified);
        match verify_zigzag(&g, &[0, 1, 2, 3], 2).unwrap() {
            ZigZagVerdict::Counterexample(p) => assert_eq!(p, vec![0, 3, 1, 2]),
            v => panic!("expected counterexample, got {v:?}"),
        }
        assert_eq!(zigzag_number(&g, &[0, 1, 2, 3]).unwrap(), 3);
    }

    #[test]
    fn dvsn_values() {
        let dag = Digraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(dvsn(&dag, &[0, 1, 2]).unwrap(), 0);
        assert_eq!(dvsn(&two_cycle(), &[0, 1]).unwrap(), 1);
        let d7 = corpus::binary_tree(7);
        let order = dfs_ordering_bidirected_tree(&d7).unwrap();
        assert_eq!(order, vec![0, 1, 3, 4, 2, 5, 6]);
        // After the prefix (0, 1), the vertices 3, 4 and 2 all point back.
        assert_eq!(dvsn(&d7, &order).unwrap(), 3);
        let (best, d) = search_min_dvsn_ordering(&d7, None).unwrap();
        assert_eq!((d, dvsn(&d7, &best).unwrap()), (1, 1));
    }

    #[test]
    fn min_dvsn_search() {
        let dag = Digraph::from_edges(4, &[(3, 2), (2, 1), (1, 0)]);
        let (order, d) = search_min_dvsn_ordering(&dag, None).unwrap();
        assert_eq!(d, 0);
        assert_eq!(zigzag_number(&dag, &order).unwrap(), 1);
        assert_eq!(search_min_dvsn_ordering(&two_cycle(), None).unwrap().1, 1);
        assert!(matches!(search_min_dvsn_ordering(&two_cycle(), Some(0)), Err(Error::BudgetExceeded(0))));
    }

    #[test]
    fn bound_from_dvsn() {
        let od = ordering_from_dvsn(&two_cycle(), &[0, 1]).unwrap();
        assert_eq!(od.zigzag_bound, Some((3, BoundStatus::Claimed)));
        let mut od = od;
        assert_eq!(od.verify(), 2);
        let d15 = corpus::binary_tree(15);
        let order = dfs_ordering_bidirected_tree(&d15).unwrap();
        let d = dvsn(&d15, &order).unwrap();
        assert_eq!(ordering_from_dvsn(&d15, &order).unwrap().zigzag_bound, Some((2 * d + 1, BoundStatus::Claimed)));
        assert_eq!(zigzag_number(&d15, &order).unwrap(), 2);
        let (best, d_min) = search_min_dvsn_ordering(&d15, None).unwrap();
        assert_eq!(d_min, 2);
        assert!(zigzag_number(&d15, &best).unwrap() <= 2 * d_min + 1);
    }

    #[test]
    fn tree_ordering_rejects_non_trees() {
        assert!(dfs_ordering_bidirected_tree(&Digraph::from_edges(2, &[(0, 1)])).is_err());
        assert_eq!(dfs_ordering_bidirected_tree(&Digraph::new(1)).unwrap(), vec![0]);
        let d3 = corpus::binary_tree(3);
        let order = dfs_ordering_bidirected_tree(&d3).unwrap();
        assert_eq!(order, vec![0, 1, 2]);
        assert_eq!(zigzag_number(&d3, &order).unwrap(), 2);
    }
}
