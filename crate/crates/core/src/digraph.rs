//! Labeled, weighted digraphs and the plain-text edge-list format.
//!
//! ```text
//! # comment
//! n m
//! src dst [vlabel-src vlabel-dst] [weight] [id=<edge id>] [label=<edge label>]
//! ```
//!
//! Vertex ids are dense `0..n`. Edge ids default to line order.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Symbol used for vertices and edges that carry no explicit label.
pub const DEFAULT_LABEL: &str = "·";

pub type Label = Arc<str>;

pub fn default_label() -> Label {
    Arc::from(DEFAULT_LABEL)
}

/// Element of a [`WeightSemigroup`], stored as its index in the total order.
pub type Weight = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemigroupKind {
    /// `{0..=cap}` with saturating addition.
    BoundedSum { cap: u32 },
    /// Explicit Cayley table over named elements, ordered as listed.
    Table { elements: Vec<String>, cayley: Vec<Vec<u32>> },
}

/// Finite commutative semigroup with an identity and a total order on its
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSemigroup {
    kind: SemigroupKind,
    identity: Weight,
}

impl WeightSemigroup {
    pub fn bounded_sum(cap: u32) -> Self {
        WeightSemigroup { kind: SemigroupKind::BoundedSum { cap }, identity: 0 }
    }

    /// The one-element semigroup.
    pub fn trivial() -> Self {
        Self::bounded_sum(0)
    }

    /// Builds a table semigroup, checking closure, commutativity,
    /// associativity and neutrality of `identity` exhaustively.
    pub fn table(elements: Vec<String>, cayley: Vec<Vec<u32>>, identity: &str) -> Result<Self> {
        let size = elements.len();
        if size == 0 {
            return Err(Error::InvalidSemigroup("no elements".into()));
        }
        if cayley.len() != size || cayley.iter().any(|row| row.len() != size) {
            return Err(Error::InvalidSemigroup("cayley table is not square".into()));
        }
        if cayley.iter().flatten().any(|&x| x as usize >= size) {
            return Err(Error::InvalidSemigroup("operation is not closed".into()));
        }
        let id = elements
            .iter()
            .position(|e| e == identity)
            .ok_or_else(|| Error::InvalidSemigroup(format!("identity `{identity}` is not an element")))?
            as u32;
        for a in 0..size {
            if cayley[a][id as usize] as usize != a || cayley[id as usize][a] as usize != a {
                return Err(Error::InvalidSemigroup(format!("`{identity}` is not neutral for `{}`", elements[a])));
            }
            for b in 0..size {
                if cayley[a][b] != cayley[b][a] {
                    return Err(Error::InvalidSemigroup(format!(
                        "not commutative on ({}, {})",
                        elements[a], elements[b]
                    )));
                }
                for c in 0..size {
                    let left = cayley[cayley[a][b] as usize][c];
                    let right = cayley[a][cayley[b][c] as usize];
                    if left != right {
                        return Err(Error::InvalidSemigroup(format!(
                            "not associative on ({}, {}, {})",
                            elements[a], elements[b], elements[c]
                        )));
                    }
                }
            }
        }
        Ok(WeightSemigroup { kind: SemigroupKind::Table { elements, cayley }, identity: id })
    }

    /// Parses a table semigroup: first line `identity e1 e2 ...`, then one
    /// row per element listing products by element name.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty semigroup table"))?;
        let mut head = header.split_whitespace();
        let identity = head.next().ok_or_else(|| Error::parse(line_no, "missing identity"))?.to_string();
        let elements: Vec<String> = head.map(str::to_string).collect();
        let mut cayley = Vec::new();
        for (line_no, line) in lines {
            let row = line
                .split_whitespace()
                .map(|tok| {
                    elements
                        .iter()
                        .position(|e| e == tok)
                        .map(|p| p as u32)
                        .ok_or_else(|| Error::parse(line_no, format!("unknown element `{tok}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            cayley.push(row);
        }
        Self::table(elements, cayley, &identity)
    }

    pub fn kind(&self) -> &SemigroupKind {
        &self.kind
    }

    pub fn identity(&self) -> Weight {
        self.identity
    }

    pub fn size(&self) -> usize {
        match &self.kind {
            SemigroupKind::BoundedSum { cap } => *cap as usize + 1,
            SemigroupKind::Table { elements, .. } => elements.len(),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Weight> {
        0..self.size() as Weight
    }

    pub fn combine(&self, a: Weight, b: Weight) -> Weight {
        match &self.kind {
            SemigroupKind::BoundedSum { cap } => a.saturating_add(b).min(*cap),
            SemigroupKind::Table { cayley, .. } => cayley[a as usize][b as usize],
        }
    }

    pub fn sum(&self, items: impl IntoIterator<Item = Weight>) -> Weight {
        items.into_iter().fold(self.identity, |acc, w| self.combine(acc, w))
    }

    pub fn parse_element(&self, token: &str) -> Option<Weight> {
        match &self.kind {
            SemigroupKind::BoundedSum { cap } => token.parse::<u32>().ok().map(|v| v.min(*cap)),
            SemigroupKind::Table { elements, .. } => elements.iter().position(|e| e == token).map(|p| p as u32),
        }
    }

    pub fn element_name(&self, w: Weight) -> String {
        match &self.kind {
            SemigroupKind::BoundedSum { .. } => w.to_string(),
            SemigroupKind::Table { elements, .. } => elements[w as usize].clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: Label,
    pub weight: Weight,
}

/// A finite digraph. Parallel edges, antiparallel pairs and self-loops are
/// all allowed; edges are identified by their index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    vertex_labels: Vec<Label>,
    edges: Vec<Edge>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { vertex_labels: vec![default_label(); n], edges: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(s, t) in edges {
            g.add_edge(s, t);
        }
        g
    }

    pub fn add_edge(&mut self, src: usize, dst: usize) -> usize {
        self.add_edge_full(src, dst, default_label(), 0)
    }

    pub fn add_edge_full(&mut self, src: usize, dst: usize, label: Label, weight: Weight) -> usize {
        assert!(src < self.n() && dst < self.n(), "edge endpoint out of range");
        self.edges.push(Edge { src, dst, label, weight });
        self.edges.len() - 1
    }

    pub fn set_vertex_label(&mut self, v: usize, label: Label) {
        self.vertex_labels[v] = label;
    }

    pub fn set_weight(&mut self, e: usize, w: Weight) {
        self.edges[e].weight = w;
    }

    pub fn n(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_label(&self, v: usize) -> &Label {
        &self.vertex_labels[v]
    }

    pub fn vertex_labels(&self) -> &[Label] {
        &self.vertex_labels
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.src == v).map(|(i, _)| i)
    }

    /// Total weight of an edge subset under `omega`.
    pub fn weight_of(&self, omega: &WeightSemigroup, edges: &[usize]) -> Weight {
        omega.sum(edges.iter().map(|&e| self.edges[e].weight))
    }

    /// Subgraph induced by the given vertex and edge ids; vertices are
    /// renumbered in ascending order of their original id.
    pub fn subgraph(&self, vertices: &[usize], edges: &[usize]) -> Digraph {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vs.iter().enumerate() {
            index[v] = i;
        }
        let mut h = Digraph { vertex_labels: vs.iter().map(|&v| self.vertex_labels[v].clone()).collect(), edges: Vec::new() };
        let mut es = edges.to_vec();
        es.sort_unstable();
        for e in es {
            let edge = &self.edges[e];
            h.edges.push(Edge { src: index[edge.src], dst: index[edge.dst], label: edge.label.clone(), weight: edge.weight });
        }
        h
    }

    /// Reads a digraph in edge-list format. Weights are interpreted in
    /// `omega`; missing weights default to its identity.
    pub fn load(path: impl AsRef<Path>, omega: &WeightSemigroup) -> Result<Digraph> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text, omega)
    }

    pub fn parse_edge_list(text: &str, omega: &WeightSemigroup) -> Result<Digraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (header_line, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header `n m`"))?;
        let mut head = header.split_whitespace();
        let n: usize = parse_num(head.next(), header_line, "vertex count")?;
        let m: usize = parse_num(head.next(), header_line, "edge count")?;
        if head.next().is_some() {
            return Err(Error::parse(header_line, "header must be `n m`"));
        }
        let mut labels: Vec<Option<Label>> = vec![None; n];
        let mut slots: Vec<Option<Edge>> = vec![None; m];
        let mut next_id = 0usize;
        let mut count = 0usize;
        for (line_no, line) in lines {
            count += 1;
            if count > m {
                return Err(Error::parse(line_no, format!("more than {m} edge lines")));
            }
            let mut positional = Vec::new();
            let mut id = None;
            let mut edge_label = default_label();
            for tok in line.split_whitespace() {
                if let Some(v) = tok.strip_prefix("id=") {
                    id = Some(v.parse::<usize>().map_err(|_| Error::parse(line_no, format!("bad edge id `{v}`")))?);
                } else if let Some(v) = tok.strip_prefix("label=") {
                    edge_label = Arc::from(v);
                } else {
                    positional.push(tok);
                }
            }
            if positional.len() < 2 || positional.len() > 5 {
                return Err(Error::parse(line_no, "expected `src dst [vlabel-src vlabel-dst] [weight]`"));
            }
            let src: usize = parse_num(Some(positional[0]), line_no, "source")?;
            let dst: usize = parse_num(Some(positional[1]), line_no, "target")?;
            for v in [src, dst] {
                if v >= n {
                    return Err(Error::DanglingVertex { vertex: v, n });
                }
            }
            let rest = &positional[2..];
            let (vlabels, weight_tok) = match rest.len() {
                0 => (None, None),
                1 => (None, Some(rest[0])),
                2 => (Some((rest[0], rest[1])), None),
                3 => (Some((rest[0], rest[1])), Some(rest[2])),
                _ => return Err(Error::parse(line_no, "too many fields")),
            };
            if let Some((ls, ld)) = vlabels {
                for (v, l) in [(src, ls), (dst, ld)] {
                    match &labels[v] {
                        Some(existing) if &**existing != l => {
                            return Err(Error::parse(
                                line_no,
                                format!("vertex {v} relabeled from `{existing}` to `{l}`"),
                            ))
                        }
                        _ => labels[v] = Some(Arc::from(l)),
                    }
                }
            }
            let weight = match weight_tok {
                None => omega.identity(),
                Some(tok) => omega
                    .parse_element(tok)
                    .ok_or_else(|| Error::parse(line_no, format!("`{tok}` is not a semigroup element")))?,
            };
            let id = match id {
                Some(i) => i,
                None => {
                    while next_id < m && slots[next_id].is_some() {
                        next_id += 1;
                    }
                    next_id
                }
            };
            if id >= m {
                return Err(Error::parse(line_no, format!("edge id {id} out of range")));
            }
            if slots[id].is_some() {
                return Err(Error::DuplicateEdge(id));
            }
            slots[id] = Some(Edge { src, dst, label: edge_label, weight });
        }
        if count != m {
            return Err(Error::parse(header_line, format!("expected {m} edges, found {count}")));
        }
        Ok(Digraph {
            vertex_labels: labels.into_iter().map(|l| l.unwrap_or_else(default_label)).collect(),
            edges: slots.into_iter().map(|e| e.expect("all slots filled")).collect(),
        })
    }

    /// Serializes to the edge-list format. Labels and weights are written
    /// only when they differ from the defaults.
    pub fn to_edge_list(&self, omega: &WeightSemigroup) -> String {
        let mut out = format!("{} {}\n", self.n(), self.m());
        let labeled = self.vertex_labels.iter().any(|l| &**l != DEFAULT_LABEL);
        let weighted = self.edges.iter().any(|e| e.weight != omega.identity());
        for e in &self.edges {
            write!(out, "{} {}", e.src, e.dst).unwrap();
            if labeled {
                write!(out, " {} {}", self.vertex_labels[e.src], self.vertex_labels[e.dst]).unwrap();
            }
            if weighted {
                write!(out, " {}", omega.element_name(e.weight)).unwrap();
            }
            if &*e.label != DEFAULT_LABEL {
                write!(out, " label={}", e.label).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// True iff the digraph has no directed cycle (self-loops count).
    pub fn is_dag(&self) -> bool {
        self.topological_order().is_some()
    }

    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n()];
        let mut adj = vec![Vec::new(); self.n()];
        for e in &self.edges {
            indeg[e.dst] += 1;
            adj[e.src].push(e.dst);
        }
        let mut queue: VecDeque<usize> = (0..self.n()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n());
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == self.n()).then_some(order)
    }

    /// Edges with one endpoint among the first `i` vertices of `ordering`
    /// and the other among the rest.
    pub fn cut_edges(&self, ordering: &[usize], i: usize) -> Result<Vec<usize>> {
        let pos = positions(self.n(), ordering)?;
        if i == 0 || i >= self.n() {
            return Err(Error::CutOutOfRange { index: i, max: self.n().saturating_sub(1) });
        }
        Ok(self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| (pos[e.src] < i) != (pos[e.dst] < i))
            .map(|(id, _)| id)
            .collect())
    }

    pub fn cut_width(&self, ordering: &[usize]) -> Result<usize> {
        let pos = positions(self.n(), ordering)?;
        Ok(cut_profile(self, &pos).into_iter().max().unwrap_or(0))
    }
}

/// Number of edges crossing each cut `1..n`, indexed from 0.
pub(crate) fn cut_profile(g: &Digraph, pos: &[usize]) -> Vec<usize> {
    let n = g.n();
    let mut diff = vec![0isize; n + 1];
    for e in g.edges() {
        let (a, b) = (pos[e.src].min(pos[e.dst]), pos[e.src].max(pos[e.dst]));
        if a != b {
            diff[a] += 1;
            diff[b] -= 1;
        }
    }
    let mut profile = Vec::with_capacity(n.saturating_sub(1));
    let mut acc = 0isize;
    for d in diff.iter().take(n.saturating_sub(1)) {
        acc += d;
        profile.push(acc as usize);
    }
    profile
}

/// Inverse of a vertex ordering, validating that it is a permutation.
pub fn positions(n: usize, ordering: &[usize]) -> Result<Vec<usize>> {
    if ordering.len() != n {
        return Err(Error::NotAPermutation(format!("length {} for {} vertices", ordering.len(), n)));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in ordering.iter().enumerate() {
        if v >= n {
            return Err(Error::NotAPermutation(format!("vertex {v} out of range")));
        }
        if pos[v] != usize::MAX {
            return Err(Error::NotAPermutation(format!("vertex {v} repeated")));
        }
        pos[v] = i;
    }
    Ok(pos)
}

/// Parses an ordering file: whitespace-separated vertex ids.
pub fn parse_ordering(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            out.push(tok.parse().map_err(|_| Error::parse(i + 1, format!("bad vertex id `{tok}`")))?);
        }
    }
    Ok(out)
}

pub fn format_ordering(ordering: &[usize]) -> String {
    let mut s = ordering.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bidirected_k4() -> Digraph {
        let mut text = String::from("4 12\n");
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    text.push_str(&format!("{a} {b}\n"));
                }
            }
        }
        Digraph::parse_edge_list(&text, &WeightSemigroup::trivial()).unwrap()
    }

    #[test]
    fn loads_path_and_isolated_vertex() {
        let g = Digraph::parse_edge_list("3 2\n0 1\n1 2", &WeightSemigroup::trivial()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().iter().map(|e| (e.src, e.dst)).collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let single = Digraph::parse_edge_list("1 0", &WeightSemigroup::trivial()).unwrap();
        assert_eq!((single.n(), single.m()), (1, 0));
    }

    #[test]
    fn loads_bidirected_k4() {
        let g = bidirected_k4();
        assert_eq!(g.m(), 4 * 3);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let omega = WeightSemigroup::trivial();
        match Digraph::parse_edge_list("# hdr\n2 1\n0 x\n", &omega) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Digraph::parse_edge_list("2 1\n0 5\n", &omega), Err(Error::DanglingVertex { vertex: 5, .. })));
        assert!(matches!(
            Digraph::parse_edge_list("2 2\n0 1 id=0\n1 0 id=0\n", &omega),
            Err(Error::DuplicateEdge(0))
        ));
    }

    #[test]
    fn labels_and_weights() {
        let omega = WeightSemigroup::bounded_sum(15);
        let g = Digraph::parse_edge_list("2 2\n0 1 a b 3\n1 0 20 label=x\n", &omega).unwrap();
        assert_eq!(&**g.vertex_label(0), "a");
        assert_eq!(g.edge(0).weight, 3);
        assert_eq!(g.edge(1).weight, 15);
        assert_eq!(&*g.edge(1).label, "x");
        let again = Digraph::parse_edge_list(&g.to_edge_list(&omega), &omega).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn dag_detection() {
        assert!(Digraph::from_edges(3, &[(0, 1), (1, 2)]).is_dag());
        assert!(!Digraph::from_edges(2, &[(0, 1), (1, 0)]).is_dag());
        assert!(!Digraph::from_edges(1, &[(0, 0)]).is_dag());
        // 4x4 grid: horizontals point left, verticals point up.
        let id = |r: usize, c: usize| r * 4 + c;
        let mut edges = Vec::new();
        for r in 0..4 {
            for c in 0..4 {
                if c > 0 {
                    edges.push((id(r, c), id(r, c - 1)));
                }
                if r > 0 {
                    edges.push((id(r, c), id(r - 1, c)));
                }
            }
        }
        assert!(Digraph::from_edges(16, &edges).is_dag());
    }

    #[test]
    fn cuts() {
        let path = Digraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(path.cut_edges(&[0, 1, 2], 1).unwrap(), vec![0]);
        let two_cycle = Digraph::from_edges(2, &[(0, 1), (1, 0)]);
        assert_eq!(two_cycle.cut_edges(&[0, 1], 1).unwrap(), vec![0, 1]);
        assert_eq!(two_cycle.cut_width(&[0, 1]).unwrap(), 2);
        let k4 = bidirected_k4();
        let across: Vec<usize> = k4
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| (e.src < 2) != (e.dst < 2))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(k4.cut_edges(&[0, 1, 2, 3], 2).unwrap(), across);
        assert_eq!(across.len(), 8);
        assert_eq!(k4.cut_width(&[2, 0, 3, 1]).unwrap(), 8);
        assert_eq!(Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).cut_width(&[0, 1, 2, 3]).unwrap(), 1);
        assert_eq!(Digraph::new(1).cut_width(&[0]).unwrap(), 0);
        assert!(path.cut_edges(&[0, 1, 2], 3).is_err());
        assert!(path.cut_width(&[0, 0, 2]).is_err());
    }

    #[test]
    fn table_semigroup_validation() {
        let names = vec!["z".to_string(), "a".to_string()];
        let ok = WeightSemigroup::table(names.clone(), vec![vec![0, 1], vec![1, 1]], "z").unwrap();
        assert_eq!(ok.combine(1, 1), 1);
        assert!(WeightSemigroup::table(names.clone(), vec![vec![0, 1], vec![0, 1]], "z").is_err());
        assert!(WeightSemigroup::parse_table("z z a\nz a\na a\n").is_ok());
    }
}
