//! Slice graphs: automata whose vertices are labeled with slices.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::digraph::{WeightSemigroup, Weight};
use crate::error::{Error, Result};
use crate::slice::{sub_slices, End, Slice, UnitDecomposition};

/// A slice together with its canonical key.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub slice: Slice,
    pub key: Vec<u8>,
}

impl Letter {
    pub fn new(slice: Slice) -> Arc<Letter> {
        let key = slice.canonical_key();
        Arc::new(Letter { slice, key })
    }
}

/// Width and numbering bounds of the slices a graph is labeled with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlphabetMeta {
    pub c: usize,
    pub q: usize,
}

/// Where a vertex of a sub-slice graph comes from in the host digraph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexOrigin {
    pub center: Option<usize>,
    /// Host edge ids whose last segment is kept in this slice.
    pub completed: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SliceGraph {
    pub labels: Vec<Arc<Letter>>,
    pub succ: Vec<Vec<u32>>,
    pub initial: Vec<bool>,
    pub fin: Vec<bool>,
    pub meta: AlphabetMeta,
    /// Position in the decomposition, for layered graphs.
    pub layers: Option<Vec<u32>>,
    /// Running weight total, for weight-expanded graphs.
    pub totals: Option<Vec<Weight>>,
    pub origins: Option<Vec<Arc<VertexOrigin>>>,
}

impl SliceGraph {
    pub fn new(meta: AlphabetMeta) -> Self {
        SliceGraph {
            labels: Vec::new(),
            succ: Vec::new(),
            initial: Vec::new(),
            fin: Vec::new(),
            meta,
            layers: None,
            totals: None,
            origins: None,
        }
    }

    pub fn add_vertex(&mut self, label: Arc<Letter>, initial: bool, fin: bool) -> u32 {
        self.labels.push(label);
        self.succ.push(Vec::new());
        self.initial.push(initial);
        self.fin.push(fin);
        (self.labels.len() - 1) as u32
    }

    pub fn add_edge(&mut self, a: u32, b: u32) {
        let list = &mut self.succ[a as usize];
        if !list.contains(&b) {
            list.push(b);
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn initials(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&v| self.initial[v as usize])
    }

    pub fn finals(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&v| self.fin[v as usize])
    }

    /// Checks the structural invariants: initial and final labels and
    /// glueability along edges.
    pub fn validate(&self) -> Result<()> {
        for v in 0..self.len() {
            let s = &self.labels[v].slice;
            if self.initial[v] && !s.is_initial() {
                return Err(Error::InvalidSlice(format!("initial vertex {v} has a nonempty in-frontier")));
            }
            if self.fin[v] && !s.is_final() {
                return Err(Error::InvalidSlice(format!("final vertex {v} has a nonempty out-frontier")));
            }
            for &w in &self.succ[v] {
                if !s.can_glue(&self.labels[w as usize].slice) {
                    return Err(Error::NotGlueable(format!("edge {v} -> {w}")));
                }
            }
        }
        Ok(())
    }

    pub fn topological_order(&self) -> Option<Vec<u32>> {
        let mut indeg = vec![0usize; self.len()];
        for list in &self.succ {
            for &w in list {
                indeg[w as usize] += 1;
            }
        }
        let mut queue: VecDeque<u32> = (0..self.len() as u32).filter(|&v| indeg[v as usize] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.succ[v as usize] {
                indeg[w as usize] -= 1;
                if indeg[w as usize] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// `Err` carries a description of two equally labeled alternatives.
    pub fn check_deterministic(&self) -> std::result::Result<(), String> {
        let mut seen: HashMap<&[u8], u32> = HashMap::new();
        for v in self.initials() {
            if let Some(prev) = seen.insert(&self.labels[v as usize].key, v) {
                return Err(format!("initial vertices {prev} and {v} share a label"));
            }
        }
        for (v, list) in self.succ.iter().enumerate() {
            seen.clear();
            for &w in list {
                if let Some(prev) = seen.insert(&self.labels[w as usize].key, w) {
                    return Err(format!("vertex {v} has successors {prev} and {w} with the same label"));
                }
            }
        }
        Ok(())
    }

    pub fn is_deterministic(&self) -> bool {
        self.check_deterministic().is_ok()
    }

    /// Keeps only vertices on some initial-to-final walk.
    pub fn trim(&self) -> SliceGraph {
        let n = self.len();
        let mut fwd = vec![false; n];
        let mut stack: Vec<u32> = self.initials().collect();
        for &v in &stack {
            fwd[v as usize] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in &self.succ[v as usize] {
                if !fwd[w as usize] {
                    fwd[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        let mut pred = vec![Vec::new(); n];
        for (v, list) in self.succ.iter().enumerate() {
            for &w in list {
                pred[w as usize].push(v as u32);
            }
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<u32> = self.finals().filter(|&v| fwd[v as usize]).collect();
        for &v in &stack {
            bwd[v as usize] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in &pred[v as usize] {
                if !bwd[w as usize] && fwd[w as usize] {
                    bwd[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        self.restrict(&bwd)
    }

    fn restrict(&self, keep: &[bool]) -> SliceGraph {
        let mut index = vec![u32::MAX; self.len()];
        let mut out = SliceGraph::new(self.meta);
        let mut layers = Vec::new();
        let mut totals = Vec::new();
        let mut origins = Vec::new();
        for v in 0..self.len() {
            if keep[v] {
                index[v] = out.add_vertex(self.labels[v].clone(), self.initial[v], self.fin[v]);
                if let Some(l) = &self.layers {
                    layers.push(l[v]);
                }
                if let Some(t) = &self.totals {
                    totals.push(t[v]);
                }
                if let Some(o) = &self.origins {
                    origins.push(o[v].clone());
                }
            }
        }
        for v in 0..self.len() {
            if keep[v] {
                for &w in &self.succ[v] {
                    if keep[w as usize] {
                        out.succ[index[v] as usize].push(index[w as usize]);
                    }
                }
            }
        }
        out.layers = self.layers.as_ref().map(|_| layers);
        out.totals = self.totals.as_ref().map(|_| totals);
        out.origins = self.origins.as_ref().map(|_| origins);
        out
    }

    /// Number of initial-to-final walks, which for a deterministic graph is
    /// the number of accepted slice strings.
    pub fn count_accepting_paths(&self) -> Result<BigUint> {
        self.check_deterministic().map_err(Error::NotDeterministic)?;
        self.count_walks()
    }

    /// Walk count without the determinism check.
    pub fn count_walks(&self) -> Result<BigUint> {
        let order = self.topological_order().ok_or(Error::Cyclic)?;
        let mut ways = vec![BigUint::zero(); self.len()];
        let mut total = BigUint::zero();
        for v in order {
            let v = v as usize;
            if self.initial[v] {
                ways[v] += BigUint::one();
            }
            if ways[v].is_zero() {
                continue;
            }
            if self.fin[v] {
                total += &ways[v];
            }
            let here = std::mem::take(&mut ways[v]);
            for &w in &self.succ[v] {
                ways[w as usize] += &here;
            }
            ways[v] = here;
        }
        Ok(total)
    }

    /// Keeps only the final vertices whose running total is maximal among
    /// reachable finals.
    pub fn prune_non_maximal_finals(&self) -> Result<SliceGraph> {
        let totals =
            self.totals.as_ref().ok_or_else(|| Error::InvalidQuery("graph carries no weight totals".into()))?;
        let reach = self.reachable();
        let best = self.finals().filter(|&v| reach[v as usize]).map(|v| totals[v as usize]).max();
        let mut g = self.clone();
        if let Some(best) = best {
            for v in 0..g.len() {
                if g.fin[v] && totals[v] != best {
                    g.fin[v] = false;
                }
            }
        }
        Ok(g.trim())
    }

    /// Largest running total over reachable finals.
    pub fn max_final_total(&self) -> Option<Weight> {
        let totals = self.totals.as_ref()?;
        let reach = self.reachable();
        self.finals().filter(|&v| reach[v as usize]).map(|v| totals[v as usize]).max()
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<u32> = self.initials().collect();
        for &v in &stack {
            seen[v as usize] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in &self.succ[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Whether the slice string is spelled by some initial-to-final walk.
    pub fn accepts(&self, word: &[Slice]) -> bool {
        let keys: Vec<Vec<u8>> = word.iter().map(Slice::canonical_key).collect();
        let mut current: Vec<u32> = match keys.first() {
            None => return false,
            Some(k) => self.initials().filter(|&v| &self.labels[v as usize].key == k).collect(),
        };
        for k in &keys[1..] {
            let mut next: Vec<u32> = current
                .iter()
                .flat_map(|&v| self.succ[v as usize].iter().copied())
                .filter(|&w| &self.labels[w as usize].key == k)
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        current.iter().any(|&v| self.fin[v as usize])
    }

    /// All accepted strings, for small acyclic graphs.
    pub fn enumerate_words(&self, cap: usize) -> Vec<Vec<Arc<Letter>>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        for v in self.initials() {
            self.words_from(v, &mut path, &mut out, cap);
        }
        out
    }

    fn words_from(&self, v: u32, path: &mut Vec<u32>, out: &mut Vec<Vec<Arc<Letter>>>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        path.push(v);
        if self.fin[v as usize] {
            out.push(path.iter().map(|&x| self.labels[x as usize].clone()).collect());
        }
        for &w in &self.succ[v as usize] {
            self.words_from(w, path, out, cap);
        }
        path.pop();
    }

    pub fn to_text(&self) -> String {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| (&self.labels[a].key, a).cmp(&(&self.labels[b].key, b)));
        let mut index = vec![0usize; self.len()];
        for (i, &v) in order.iter().enumerate() {
            index[v] = i;
        }
        let mut out = format!(
            "slicegraph vertices={} edges={} c={} q={}\n",
            self.len(),
            self.edge_count(),
            self.meta.c,
            self.meta.q
        );
        for &v in &order {
            writeln!(out, "vertex {} initial={} final={}", index[v], self.initial[v] as u8, self.fin[v] as u8).unwrap();
            out.push_str(&self.labels[v].slice.to_text());
        }
        let mut edges: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|v| self.succ[v].iter().map(move |&w| (v, w as usize)))
            .map(|(v, w)| (index[v], index[w]))
            .collect();
        edges.sort_unstable();
        for (a, b) in edges {
            writeln!(out, "edge {a} {b}").unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<SliceGraph> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (line, head) = lines.next().ok_or_else(|| Error::parse(1, "empty slice graph"))?;
        let mut fields = HashMap::new();
        let mut toks = head.split_whitespace();
        if toks.next() != Some("slicegraph") {
            return Err(Error::parse(line, "expected `slicegraph` header"));
        }
        for t in toks {
            let (k, v) = t.split_once('=').ok_or_else(|| Error::parse(line, format!("bad field `{t}`")))?;
            fields.insert(k, v.parse::<usize>().map_err(|_| Error::parse(line, format!("bad field `{t}`")))?);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::parse(line, format!("missing `{k}`")));
        let mut g = SliceGraph::new(AlphabetMeta { c: get("c")?, q: get("q")? });
        let nv = get("vertices")?;
        let mut pending: Option<(usize, bool, bool, String)> = None;
        for (line, l) in lines {
            if let Some((_, _, _, buf)) = pending.as_mut() {
                buf.push_str(l);
                buf.push('\n');
                if l == "end" {
                    let (id, i, f, buf) = pending.take().expect("pending vertex");
                    if id != g.len() {
                        return Err(Error::parse(line, "vertices must be listed in order"));
                    }
                    g.add_vertex(Letter::new(Slice::parse_text(&buf)?), i, f);
                }
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks.as_slice() {
                ["vertex", id, i, f] => {
                    let id = id.parse().map_err(|_| Error::parse(line, "bad vertex id"))?;
                    let flag = |t: &str, name: &str| match t.strip_prefix(name) {
                        Some("1") => Ok(true),
                        Some("0") => Ok(false),
                        _ => Err(Error::parse(line, format!("bad flag `{t}`"))),
                    };
                    pending = Some((id, flag(i, "initial=")?, flag(f, "final=")?, String::new()));
                }
                ["edge", a, b] => {
                    let a: usize = a.parse().map_err(|_| Error::parse(line, "bad edge"))?;
                    let b: usize = b.parse().map_err(|_| Error::parse(line, "bad edge"))?;
                    if a >= g.len() || b >= g.len() {
                        return Err(Error::parse(line, "edge endpoint out of range"));
                    }
                    g.add_edge(a as u32, b as u32);
                }
                _ => return Err(Error::parse(line, format!("unexpected `{l}`"))),
            }
        }
        if g.len() != nv {
            return Err(Error::parse(line, format!("expected {nv} vertices, found {}", g.len())));
        }
        Ok(g)
    }
}

/// The layered slice graph of all sub-unit-decompositions of `u` with
/// slice-width at most `c`, frontier numbers inherited from `u`.
pub fn build_sub_slice_graph(u: &UnitDecomposition, c: usize) -> Result<SliceGraph> {
    u.validate()?;
    let q = u.width();
    let c = c.min(q);
    let mut g = SliceGraph::new(AlphabetMeta { c, q });
    let mut layers = Vec::new();
    let mut origins = Vec::new();
    let last = u.slices.len() - 1;
    let mut previous: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
    for (i, s) in u.slices.iter().enumerate() {
        let origin = u.origins.as_ref().map(|o| &o[i]);
        let mut current: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
        for sub in sub_slices(s, c)? {
            let completed = sub
                .kept_edges
                .iter()
                .filter(|&&e| s.edges[e].touches_out().is_none())
                .filter_map(|&e| origin.map(|o| o.edges[e]))
                .collect();
            let vo = VertexOrigin {
                center: if sub.keeps_center { origin.and_then(|o| o.center) } else { None },
                completed,
            };
            let ins = sub.slice.in_numbers();
            let outs = sub.slice.out_numbers();
            let v = g.add_vertex(Letter::new(sub.slice), i == 0, i == last);
            layers.push(i as u32);
            origins.push(Arc::new(vo));
            current.entry(outs).or_default().push(v);
            // Sub-slices glue exactly when the kept seam edges coincide.
            for &p in previous.get(&ins).into_iter().flatten() {
                g.succ[p as usize].push(v);
            }
        }
        previous = current;
    }
    g.layers = Some(layers);
    g.origins = Some(origins);
    Ok(g)
}

/// All order-preserving injections of `{1..=size}` into `{1..=q}`, as the
/// list of images.
pub fn increasing_injections(size: usize, q: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: u32, size: usize, q: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..=q {
            if (q - x) as usize + 1 < size - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, size, q, cur, out);
            cur.pop();
        }
    }
    rec(1, size, q as u32, &mut cur, &mut out);
    out
}

/// Replaces every normalized label by all its renumberings into `{1..=q}`.
pub fn numbering_expansion(sg: &SliceGraph, q: usize) -> Result<SliceGraph> {
    if q < sg.meta.c {
        return Err(Error::InvalidQuery(format!("q = {q} is smaller than the alphabet width {}", sg.meta.c)));
    }
    let mut out = SliceGraph::new(AlphabetMeta { c: sg.meta.c, q });
    // copies[v]: (new vertex, in-image, out-image)
    let mut copies: Vec<Vec<(u32, Vec<u32>, Vec<u32>)>> = Vec::with_capacity(sg.len());
    for v in 0..sg.len() {
        let s = &sg.labels[v].slice;
        if !s.is_normalized() {
            return Err(Error::InvalidSlice(format!("vertex {v} is not normalized")));
        }
        let ins = increasing_injections(s.in_size(), q);
        let outs = increasing_injections(s.out_size(), q);
        let mut list = Vec::new();
        for fi in &ins {
            for fo in &outs {
                let renamed = s.renumber(|n| fi[n as usize - 1], |n| fo[n as usize - 1]);
                let id = out.add_vertex(Letter::new(renamed), sg.initial[v], sg.fin[v]);
                list.push((id, fi.clone(), fo.clone()));
            }
        }
        copies.push(list);
    }
    for v in 0..sg.len() {
        for &w in &sg.succ[v] {
            for (a, _, fo) in &copies[v] {
                for (b, fi, _) in &copies[w as usize] {
                    if fo == fi {
                        out.succ[*a as usize].push(*b);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every assignment of semigroup elements to the edges of `s`.
fn weightings(s: &Slice, omega: &WeightSemigroup) -> Vec<Slice> {
    let mut out = vec![s.clone()];
    for i in 0..s.edges.len() {
        let mut next = Vec::with_capacity(out.len() * omega.size());
        for base in &out {
            for w in omega.elements() {
                let mut t = base.clone();
                t.edges[i].weight = w;
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn completed_weight(s: &Slice, omega: &WeightSemigroup) -> Weight {
    omega.sum(s.completed_edges().map(|e| e.weight))
}

/// Annotates vertices with edge weights and running totals. Only the part
/// reachable from the initial vertices is built.
pub fn weight_expansion(sg: &SliceGraph, omega: &WeightSemigroup) -> SliceGraph {
    let mut out = SliceGraph::new(sg.meta);
    let mut totals = Vec::new();
    let variants: Vec<Vec<Arc<Letter>>> = (0..sg.len())
        .map(|v| weightings(&sg.labels[v].slice, omega).into_iter().map(Letter::new).collect())
        .collect();
    let mut index: HashMap<(u32, usize, Weight), u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |out: &mut SliceGraph, totals: &mut Vec<Weight>, key: (u32, usize, Weight), initial: bool| {
        if let Some(&id) = index.get(&key) {
            if initial {
                out.initial[id as usize] = true;
            }
            return (id, false);
        }
        let label = variants[key.0 as usize][key.1].clone();
        let id = out.add_vertex(label, initial, sg.fin[key.0 as usize]);
        totals.push(key.2);
        index.insert(key, id);
        (id, true)
    };
    for v in sg.initials() {
        for (wi, letter) in variants[v as usize].iter().enumerate() {
            let tot = completed_weight(&letter.slice, omega);
            let (id, fresh) = intern(&mut out, &mut totals, (v, wi, tot), true);
            if fresh {
                queue.push_back((id, v, wi, tot));
            }
        }
    }
    while let Some((id, v, wi, tot)) = queue.pop_front() {
        let here = &variants[v as usize][wi].slice;
        for &w in &sg.succ[v as usize] {
            for (wj, letter) in variants[w as usize].iter().enumerate() {
                if !here.can_glue(&letter.slice) {
                    continue;
                }
                let next_tot = omega.combine(tot, completed_weight(&letter.slice, omega));
                let (nid, fresh) = intern(&mut out, &mut totals, (w, wj, next_tot), false);
                out.add_edge(id, nid);
                if fresh {
                    queue.push_back((nid, w, wj, next_tot));
                }
            }
        }
    }
    out.totals = Some(totals);
    out
}

/// Product with a counter of non-permutation slices that accepts only at
/// exactly `l`.
pub fn counter_expansion(sg: &SliceGraph, l: usize) -> SliceGraph {
    let mut out = SliceGraph::new(sg.meta);
    let mut index: HashMap<(u32, usize), u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut layers = Vec::new();
    let mut totals = Vec::new();
    let mut origins = Vec::new();
    let inc = |v: u32| usize::from(!sg.labels[v as usize].slice.is_permutation());
    let mut intern = |out: &mut SliceGraph, v: u32, k: usize, initial: bool| -> (u32, bool) {
        if let Some(&id) = index.get(&(v, k)) {
            return (id, false);
        }
        let id = out.add_vertex(sg.labels[v as usize].clone(), initial, sg.fin[v as usize] && k == l);
        if let Some(x) = &sg.layers {
            layers.push(x[v as usize]);
        }
        if let Some(x) = &sg.totals {
            totals.push(x[v as usize]);
        }
        if let Some(x) = &sg.origins {
            origins.push(x[v as usize].clone());
        }
        index.insert((v, k), id);
        (id, true)
    };
    for v in sg.initials() {
        let k = inc(v);
        if k <= l {
            let (id, fresh) = intern(&mut out, v, k, true);
            if fresh {
                queue.push_back((id, v, k));
            }
        }
    }
    while let Some((id, v, k)) = queue.pop_front() {
        for &w in &sg.succ[v as usize] {
            let k2 = k + inc(w);
            if k2 > l {
                continue;
            }
            let (nid, fresh) = intern(&mut out, w, k2, false);
            out.add_edge(id, nid);
            if fresh {
                queue.push_back((nid, w, k2));
            }
        }
    }
    out.layers = sg.layers.as_ref().map(|_| layers);
    out.totals = sg.totals.as_ref().map(|_| totals);
    out.origins = sg.origins.as_ref().map(|_| origins);
    out
}

/// Product of two slice graphs over equal labels, trimmed. Annotations are
/// taken from `a` when present, otherwise from `b`.
pub fn intersect(a: &SliceGraph, b: &SliceGraph) -> Result<SliceGraph> {
    if a.meta.q != b.meta.q {
        return Err(Error::AlphabetMismatch(format!("numbering bounds {} and {}", a.meta.q, b.meta.q)));
    }
    let meta = AlphabetMeta { c: a.meta.c.min(b.meta.c), q: a.meta.q };
    let mut out = SliceGraph::new(meta);
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut layers = Vec::new();
    let mut totals = Vec::new();
    let mut origins = Vec::new();
    let pick = |x: &SliceGraph, y: &SliceGraph| x.layers.is_some() || y.layers.is_none();
    let mut intern = |out: &mut SliceGraph, x: u32, y: u32, initial: bool| -> (u32, bool) {
        if let Some(&id) = index.get(&(x, y)) {
            return (id, false);
        }
        let id = out.add_vertex(a.labels[x as usize].clone(), initial, a.fin[x as usize] && b.fin[y as usize]);
        let from_a = pick(a, b);
        if let Some(l) = if from_a { &a.layers } else { &b.layers } {
            layers.push(l[if from_a { x } else { y } as usize]);
        }
        if let Some(t) = a.totals.as_ref().map(|t| t[x as usize]).or(b.totals.as_ref().map(|t| t[y as usize])) {
            totals.push(t);
        }
        if let Some(o) = a.origins.as_ref().map(|o| &o[x as usize]).or(b.origins.as_ref().map(|o| &o[y as usize])) {
            origins.push(o.clone());
        }
        index.insert((x, y), id);
        (id, true)
    };
    let mut b_initial: HashMap<&[u8], Vec<u32>> = HashMap::new();
    for y in b.initials() {
        b_initial.entry(&b.labels[y as usize].key).or_default().push(y);
    }
    for x in a.initials() {
        if let Some(ys) = b_initial.get(&a.labels[x as usize].key[..]) {
            for &y in ys {
                let (id, fresh) = intern(&mut out, x, y, true);
                if fresh {
                    queue.push_back((id, x, y));
                }
            }
        }
    }
    while let Some((id, x, y)) = queue.pop_front() {
        let mut by_key: HashMap<&[u8], Vec<u32>> = HashMap::new();
        for &y2 in &b.succ[y as usize] {
            by_key.entry(&b.labels[y2 as usize].key).or_default().push(y2);
        }
        for &x2 in &a.succ[x as usize] {
            if let Some(ys) = by_key.get(&a.labels[x2 as usize].key[..]) {
                for &y2 in ys {
                    let (nid, fresh) = intern(&mut out, x2, y2, false);
                    out.add_edge(id, nid);
                    if fresh {
                        queue.push_back((nid, x2, y2));
                    }
                }
            }
        }
    }
    let has_layers = a.layers.is_some() || b.layers.is_some();
    out.layers = has_layers.then_some(layers);
    out.totals = (a.totals.is_some() || b.totals.is_some()).then_some(totals);
    out.origins = (a.origins.is_some() || b.origins.is_some()).then_some(origins);
    Ok(out.trim())
}

/// Slice graph accepting exactly one string.
pub fn word_graph(word: &[Slice], meta: AlphabetMeta) -> SliceGraph {
    let mut g = SliceGraph::new(meta);
    for (i, s) in word.iter().enumerate() {
        let v = g.add_vertex(Letter::new(s.clone()), i == 0, i + 1 == word.len());
        if i > 0 {
            g.add_edge(v - 1, v);
        }
    }
    g
}

/// Orientation signature of a frontier, used when checking glue between
/// normalized slices.
pub fn frontier_signature(s: &Slice, side: End) -> Vec<i8> {
    let nums = match side {
        End::In(_) => s.in_numbers(),
        _ => s.out_numbers(),
    };
    nums.iter()
        .map(|&n| match side {
            End::In(_) => s.in_edge(n).expect("present").orientation(),
            _ => s.out_edge(n).expect("present").orientation(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{default_label, Digraph};
    use crate::slice::decompose_along_ordering;

    fn sub_of(g: &Digraph, c: usize) -> SliceGraph {
        let order: Vec<usize> = (0..g.n()).collect();
        build_sub_slice_graph(&decompose_along_ordering(g, &order).unwrap(), c).unwrap()
    }

    #[test]
    fn sub_graph_of_single_edge() {
        let g = Digraph::from_edges(2, &[(0, 1)]);
        let sub = sub_of(&g, 1);
        assert!(sub.is_deterministic());
        assert_eq!(sub.count_accepting_paths().unwrap(), BigUint::from(5u32));
        let iso = sub_of(&Digraph::new(1), 3);
        assert_eq!(iso.count_accepting_paths().unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn counter_on_single_edge() {
        let sub = sub_of(&Digraph::from_edges(2, &[(0, 1)]), 1);
        let counts: Vec<u32> = (0..=2)
            .map(|l| counter_expansion(&sub, l).trim().count_accepting_paths().unwrap().try_into().unwrap())
            .collect();
        assert_eq!(counts, vec![1, 2, 2]);
    }

    #[test]
    fn injections() {
        assert_eq!(increasing_injections(0, 3), vec![Vec::<u32>::new()]);
        assert_eq!(increasing_injections(2, 3).len(), 3);
        assert_eq!(increasing_injections(3, 2).len(), 0);
    }

    #[test]
    fn numbering_expansion_preserves_determinism() {
        let g = Digraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]);
        let u = decompose_along_ordering(&g, &[0, 1, 2]).unwrap();
        let word = word_graph(&u.slices, AlphabetMeta { c: 2, q: 2 });
        let expanded = numbering_expansion(&word, 3).unwrap();
        assert!(expanded.is_deterministic());
        // The middle slice has one in- and one out-vertex: 3 * 3 copies.
        assert_eq!(expanded.labels.iter().filter(|l| !l.slice.centers.is_empty()).count(), 3 + 9 + 3);
    }

    #[test]
    fn weight_totals() {
        let omega = WeightSemigroup::bounded_sum(3);
        let mut g = Digraph::from_edges(3, &[(0, 1), (1, 2)]);
        g.set_weight(0, 1);
        g.set_weight(1, 2);
        let u = decompose_along_ordering(&g, &[0, 1, 2]).unwrap();
        let meta = AlphabetMeta { c: 1, q: 1 };
        let unweighted: Vec<Slice> = u
            .slices
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.edges.iter_mut().for_each(|e| e.weight = 0);
                s
            })
            .collect();
        let expanded = weight_expansion(&word_graph(&unweighted, meta), &omega);
        let w = intersect(&word_graph(&u.slices, meta), &expanded).unwrap();
        assert_eq!(w.count_accepting_paths().unwrap(), BigUint::one());
        let totals = w.totals.as_ref().unwrap();
        let ends: Vec<Weight> = w.finals().map(|v| totals[v as usize]).collect();
        assert_eq!(ends, vec![3]);
    }

    #[test]
    fn intersections() {
        let sub = sub_of(&Digraph::from_edges(3, &[(0, 1), (1, 2)]), 1);
        let same = intersect(&sub, &sub).unwrap();
        assert_eq!(same.count_accepting_paths().unwrap(), sub.count_accepting_paths().unwrap());
        let mut empty = SliceGraph::new(sub.meta);
        empty.add_vertex(Letter::new(Slice::with_center(default_label())), false, false);
        assert_eq!(intersect(&sub, &empty).unwrap().len(), 0);
    }

    #[test]
    fn determinism_witness_and_counting() {
        let mut g = SliceGraph::new(AlphabetMeta { c: 0, q: 0 });
        let a = g.add_vertex(Letter::new(Slice::empty()), true, false);
        let b = g.add_vertex(Letter::new(Slice::with_center(default_label())), false, true);
        let c = g.add_vertex(Letter::new(Slice::with_center(default_label())), false, true);
        g.add_edge(a, b);
        g.add_edge(a, c);
        assert!(g.check_deterministic().is_err());
        assert!(matches!(g.count_accepting_paths(), Err(Error::NotDeterministic(_))));
        g.add_edge(b, a);
        assert!(matches!(g.count_walks(), Err(Error::Cyclic)));
    }

    #[test]
    fn prune_keeps_heaviest() {
        let mut g = SliceGraph::new(AlphabetMeta { c: 0, q: 0 });
        let a = g.add_vertex(Letter::new(Slice::empty()), true, false);
        let b = g.add_vertex(Letter::new(Slice::with_center(default_label())), false, true);
        let c = g.add_vertex(Letter::new(Slice::with_center(Arc::from("x"))), false, true);
        g.add_edge(a, b);
        g.add_edge(a, c);
        g.totals = Some(vec![0, 1, 3]);
        let p = g.prune_non_maximal_finals().unwrap();
        assert_eq!(p.count_accepting_paths().unwrap(), BigUint::one());
        assert_eq!(p.max_final_total(), Some(3));
    }

    #[test]
    fn text_round_trip() {
        let sub = sub_of(&Digraph::from_edges(2, &[(0, 1), (1, 0)]), 2);
        let text = sub.to_text();
        let back = SliceGraph::parse_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.count_accepting_paths().unwrap(), sub.count_accepting_paths().unwrap());
    }
}
