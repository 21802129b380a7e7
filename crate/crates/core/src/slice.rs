//! Slices, their compositions, and unit decompositions of digraphs.
//!
//! A slice is a digraph fragment whose vertices are split into an
//! in-frontier, a center and an out-frontier. Frontier vertices are named by
//! their frontier number and touch exactly one edge, so a slice is stored as
//! its list of centers plus edges between [`End`]s.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::digraph::{default_label, positions, Digraph, Label, Weight};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    In(u32),
    Center(u32),
    Out(u32),
}

impl End {
    fn tag(self) -> (u8, u32) {
        match self {
            End::In(n) => (0, n),
            End::Center(i) => (1, i),
            End::Out(n) => (2, n),
        }
    }

    fn render(self) -> String {
        match self {
            End::In(n) => format!("i{n}"),
            End::Center(i) => format!("c{i}"),
            End::Out(n) => format!("o{n}"),
        }
    }

    fn parse(tok: &str) -> Option<End> {
        let (head, rest) = tok.split_at(tok.char_indices().nth(1).map(|(i, _)| i).unwrap_or(tok.len()));
        let n: u32 = rest.parse().ok()?;
        match head {
            "i" => Some(End::In(n)),
            "c" => Some(End::Center(n)),
            "o" => Some(End::Out(n)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SliceEdge {
    pub src: End,
    pub dst: End,
    pub label: Label,
    pub weight: Weight,
}

impl SliceEdge {
    pub fn new(src: End, dst: End) -> Self {
        SliceEdge { src, dst, label: default_label(), weight: 0 }
    }

    pub fn touches_in(&self) -> Option<u32> {
        match (self.src, self.dst) {
            (End::In(n), _) | (_, End::In(n)) => Some(n),
            _ => None,
        }
    }

    pub fn touches_out(&self) -> Option<u32> {
        match (self.src, self.dst) {
            (End::Out(n), _) | (_, End::Out(n)) => Some(n),
            _ => None,
        }
    }

    /// `+1` when the edge points towards the out side of the slice.
    pub fn orientation(&self) -> i8 {
        match (self.src, self.dst) {
            (_, End::Out(_)) | (End::In(_), _) => 1,
            _ => -1,
        }
    }
}

/// A slice. Center vertices are indexed by position in `centers`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Slice {
    pub centers: Vec<Label>,
    pub edges: Vec<SliceEdge>,
}

impl Slice {
    pub fn empty() -> Self {
        Slice::default()
    }

    /// A unit slice with a single center.
    pub fn with_center(label: Label) -> Self {
        Slice { centers: vec![label], edges: Vec::new() }
    }

    pub fn push(mut self, src: End, dst: End) -> Self {
        self.edges.push(SliceEdge::new(src, dst));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut ins = BTreeSet::new();
        let mut outs = BTreeSet::new();
        for e in &self.edges {
            for end in [e.src, e.dst] {
                match end {
                    End::Center(i) if i as usize >= self.centers.len() => {
                        return Err(Error::InvalidSlice(format!("center c{i} does not exist")))
                    }
                    End::In(0) | End::Out(0) => return Err(Error::InvalidSlice("frontier numbers start at 1".into())),
                    _ => {}
                }
            }
            match (e.src, e.dst) {
                (End::In(_), End::In(_)) | (End::Out(_), End::Out(_)) => {
                    return Err(Error::InvalidSlice("edge with both endpoints in one frontier".into()))
                }
                _ => {}
            }
            if let Some(n) = e.touches_in() {
                if !ins.insert(n) {
                    return Err(Error::InvalidSlice(format!("in-frontier vertex {n} touches several edges")));
                }
            }
            if let Some(n) = e.touches_out() {
                if !outs.insert(n) {
                    return Err(Error::InvalidSlice(format!("out-frontier vertex {n} touches several edges")));
                }
            }
        }
        Ok(())
    }

    pub fn in_numbers(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.edges.iter().filter_map(SliceEdge::touches_in).collect();
        v.sort_unstable();
        v
    }

    pub fn out_numbers(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.edges.iter().filter_map(SliceEdge::touches_out).collect();
        v.sort_unstable();
        v
    }

    pub fn in_edge(&self, n: u32) -> Option<&SliceEdge> {
        self.edges.iter().find(|e| e.touches_in() == Some(n))
    }

    pub fn out_edge(&self, n: u32) -> Option<&SliceEdge> {
        self.edges.iter().find(|e| e.touches_out() == Some(n))
    }

    pub fn in_size(&self) -> usize {
        self.edges.iter().filter(|e| e.touches_in().is_some()).count()
    }

    pub fn out_size(&self) -> usize {
        self.edges.iter().filter(|e| e.touches_out().is_some()).count()
    }

    pub fn width(&self) -> usize {
        self.in_size().max(self.out_size())
    }

    pub fn is_unit(&self) -> bool {
        self.centers.len() <= 1
    }

    pub fn is_initial(&self) -> bool {
        self.in_size() == 0
    }

    pub fn is_final(&self) -> bool {
        self.out_size() == 0
    }

    /// Slices with empty center, including the empty slice.
    pub fn is_permutation(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        let ins = self.in_numbers();
        let outs = self.out_numbers();
        ins.iter().enumerate().all(|(i, &n)| n as usize == i + 1)
            && outs.iter().enumerate().all(|(i, &n)| n as usize == i + 1)
    }

    /// Edges not incident to the out-frontier: the edges whose last segment
    /// lies in this slice.
    pub fn completed_edges(&self) -> impl Iterator<Item = &SliceEdge> {
        self.edges.iter().filter(|e| e.touches_out().is_none())
    }

    /// Applies the given renumbering functions to the frontiers.
    pub fn renumber(&self, fin: impl Fn(u32) -> u32, fout: impl Fn(u32) -> u32) -> Slice {
        let map = |end: End| match end {
            End::In(n) => End::In(fin(n)),
            End::Out(n) => End::Out(fout(n)),
            c => c,
        };
        Slice {
            centers: self.centers.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| SliceEdge { src: map(e.src), dst: map(e.dst), label: e.label.clone(), weight: e.weight })
                .collect(),
        }
    }

    /// Order-preserving renumbering onto `1..=|I|` and `1..=|O|`.
    pub fn normalize(&self) -> Slice {
        let ins = self.in_numbers();
        let outs = self.out_numbers();
        let rank = |list: &[u32], n: u32| list.binary_search(&n).expect("frontier number present") as u32 + 1;
        self.renumber(|n| rank(&ins, n), |n| rank(&outs, n))
    }

    /// Checks that `b` can be glued after `self`.
    pub fn can_glue(&self, b: &Slice) -> bool {
        let outs = self.out_numbers();
        if outs != b.in_numbers() {
            return false;
        }
        outs.iter().all(|&n| {
            let e1 = self.out_edge(n).expect("present");
            let e2 = b.in_edge(n).expect("present");
            e1.orientation() == e2.orientation() && e1.weight == e2.weight
        })
    }

    /// `self ∘ b`: fuses equally numbered seam edges.
    pub fn compose(&self, b: &Slice) -> Result<Slice> {
        if !self.can_glue(b) {
            return Err(Error::NotGlueable(format!(
                "out-frontier {:?} vs in-frontier {:?}",
                self.out_numbers(),
                b.in_numbers()
            )));
        }
        let offset = self.centers.len() as u32;
        let shift = |end: End| match end {
            End::Center(i) => End::Center(i + offset),
            other => other,
        };
        let mut centers = self.centers.clone();
        centers.extend(b.centers.iter().cloned());
        let mut edges: Vec<SliceEdge> = self.edges.iter().filter(|e| e.touches_out().is_none()).cloned().collect();
        for e in b.edges.iter().filter(|e| e.touches_in().is_none()) {
            edges.push(SliceEdge { src: shift(e.src), dst: shift(e.dst), label: e.label.clone(), weight: e.weight });
        }
        for n in self.out_numbers() {
            let e1 = self.out_edge(n).expect("present");
            let e2 = b.in_edge(n).expect("present");
            let left = if let End::Out(_) = e1.src { e1.dst } else { e1.src };
            let right = shift(if let End::In(_) = e2.src { e2.dst } else { e2.src });
            let (src, dst) = if e1.orientation() > 0 { (left, right) } else { (right, left) };
            edges.push(SliceEdge { src, dst, label: e2.label.clone(), weight: e2.weight });
        }
        Ok(Slice { centers, edges })
    }

    /// Byte string identifying the slice up to renaming of center vertices;
    /// frontier numbers are kept.
    pub fn canonical_key(&self) -> Vec<u8> {
        let k = self.centers.len();
        if k <= 1 {
            return self.encode_with(&[0]);
        }
        if k <= 7 {
            let mut perm: Vec<u32> = (0..k as u32).collect();
            let mut best = self.encode_with(&perm);
            while next_permutation(&mut perm) {
                let enc = self.encode_with(&perm);
                if enc < best {
                    best = enc;
                }
            }
            return best;
        }
        let mut order: Vec<u32> = (0..k as u32).collect();
        order.sort_by_key(|&i| (self.centers[i as usize].clone(), self.center_degree_signature(i)));
        let mut perm = vec![0u32; k];
        for (rank, &i) in order.iter().enumerate() {
            perm[i as usize] = rank as u32;
        }
        self.encode_with(&perm)
    }

    fn center_degree_signature(&self, i: u32) -> (usize, usize) {
        let c = End::Center(i);
        (self.edges.iter().filter(|e| e.src == c).count(), self.edges.iter().filter(|e| e.dst == c).count())
    }

    /// Encoding under the center renaming `perm[old] = new`.
    fn encode_with(&self, perm: &[u32]) -> Vec<u8> {
        let mut out = vec![b'S'];
        let mut centers: Vec<(u32, &str)> =
            self.centers.iter().enumerate().map(|(i, l)| (perm[i], &**l)).collect();
        centers.sort_unstable();
        out.extend_from_slice(&(centers.len() as u32).to_le_bytes());
        for (_, l) in centers {
            push_str(&mut out, l);
        }
        let rename = |end: End| match end {
            End::Center(i) => End::Center(perm[i as usize]),
            e => e,
        };
        let mut edges: Vec<Vec<u8>> = self
            .edges
            .iter()
            .map(|e| {
                let mut buf = Vec::with_capacity(24);
                for end in [rename(e.src), rename(e.dst)] {
                    let (t, n) = end.tag();
                    buf.push(t);
                    buf.extend_from_slice(&n.to_be_bytes());
                }
                buf.extend_from_slice(&e.weight.to_be_bytes());
                push_str(&mut buf, &e.label);
                buf
            })
            .collect();
        edges.sort_unstable();
        out.extend_from_slice(&(edges.len() as u32).to_le_bytes());
        for e in edges {
            out.extend_from_slice(&e);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("slice\n");
        for l in &self.centers {
            writeln!(out, "center {}", escape(l)).unwrap();
        }
        for e in &self.edges {
            writeln!(out, "edge {} {} {} {}", e.src.render(), e.dst.render(), escape(&e.label), e.weight).unwrap();
        }
        out.push_str("end\n");
        out
    }

    pub fn parse_text(text: &str) -> Result<Slice> {
        let mut lines = numbered_lines(text);
        let s = parse_slice_block(&mut lines, 0)?;
        if let Some((line, _)) = lines.next() {
            return Err(Error::parse(line, "trailing content after slice"));
        }
        Ok(s)
    }
}

fn push_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn next_permutation(p: &mut [u32]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '%' => out.push_str("%25"),
            ' ' => out.push_str("%20"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            c => out.push(c),
        }
    }
    if out.is_empty() {
        out.push_str("%");
    }
    out
}

fn unescape(s: &str, line: usize) -> Result<String> {
    if s == "%" {
        return Ok(String::new());
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '%' {
            let hex: String = chars.by_ref().take(2).collect();
            let code = u8::from_str_radix(&hex, 16).map_err(|_| Error::parse(line, format!("bad escape `%{hex}`")))?;
            out.push(code as char);
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

type Lines<'a> = std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>;

fn numbered_lines(text: &str) -> Lines<'_> {
    let it: Box<dyn Iterator<Item = (usize, &str)>> = Box::new(
        text.lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
    );
    it.peekable()
}

fn parse_slice_block(lines: &mut Lines<'_>, _: usize) -> Result<Slice> {
    let (line, head) = lines.next().ok_or_else(|| Error::parse(0, "expected `slice`"))?;
    if head != "slice" {
        return Err(Error::parse(line, format!("expected `slice`, found `{head}`")));
    }
    let mut s = Slice::empty();
    for (line, l) in lines.by_ref() {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["end"] => {
                s.validate().map_err(|e| Error::parse(line, e.to_string()))?;
                return Ok(s);
            }
            ["center", label] => s.centers.push(Arc::from(unescape(label, line)?)),
            ["edge", a, b, label, w] => {
                let src = End::parse(a).ok_or_else(|| Error::parse(line, format!("bad endpoint `{a}`")))?;
                let dst = End::parse(b).ok_or_else(|| Error::parse(line, format!("bad endpoint `{b}`")))?;
                let weight = w.parse().map_err(|_| Error::parse(line, format!("bad weight `{w}`")))?;
                s.edges.push(SliceEdge { src, dst, label: Arc::from(unescape(label, line)?), weight });
            }
            _ => return Err(Error::parse(line, format!("unexpected `{l}`"))),
        }
    }
    Err(Error::parse(0, "unterminated slice"))
}

/// Provenance of a slice taken from a decomposition of a concrete digraph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SliceOrigin {
    /// Original vertex at the center, if any.
    pub center: Option<usize>,
    /// Original edge id of every slice edge, parallel to `Slice::edges`.
    pub edges: Vec<usize>,
}

/// A sequence of glueable unit slices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitDecomposition {
    pub slices: Vec<Slice>,
    pub origins: Option<Vec<SliceOrigin>>,
    pub ordering: Option<Vec<usize>>,
}

impl UnitDecomposition {
    pub fn new(slices: Vec<Slice>) -> Result<Self> {
        let u = UnitDecomposition { slices, origins: None, ordering: None };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        let (first, last) = match (self.slices.first(), self.slices.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::InvalidDecomposition("no slices".into())),
        };
        if !first.is_initial() || !last.is_final() {
            return Err(Error::InvalidDecomposition("frontiers at the ends must be empty".into()));
        }
        for (i, s) in self.slices.iter().enumerate() {
            s.validate()?;
            if !s.is_unit() {
                return Err(Error::InvalidDecomposition(format!("slice {i} has several centers")));
            }
        }
        for (i, w) in self.slices.windows(2).enumerate() {
            if !w[0].can_glue(&w[1]) {
                return Err(Error::InvalidDecomposition(format!("slices {i} and {} do not glue", i + 1)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn width(&self) -> usize {
        self.slices.iter().map(Slice::width).max().unwrap_or(0)
    }

    pub fn is_dilated(&self) -> bool {
        self.slices.iter().any(Slice::is_permutation)
    }

    pub fn is_normalized(&self) -> bool {
        self.slices.iter().all(Slice::is_normalized)
    }

    /// Composes all slices. Vertex `i` of the result is the `i`-th center
    /// in string order.
    pub fn compose_all(&self) -> Result<Digraph> {
        compose_slices(&self.slices)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "decomposition slices={} q={} dilated={} normalized={}\n",
            self.slices.len(),
            self.width(),
            self.is_dilated() as u8,
            self.is_normalized() as u8
        );
        if let Some(o) = &self.ordering {
            out.push_str("ordering");
            for v in o {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        for s in &self.slices {
            out.push_str(&s.to_text());
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<UnitDecomposition> {
        let mut lines = numbered_lines(text);
        let (line, head) = lines.next().ok_or_else(|| Error::parse(1, "empty decomposition"))?;
        let mut toks = head.split_whitespace();
        if toks.next() != Some("decomposition") {
            return Err(Error::parse(line, "expected `decomposition` header"));
        }
        let mut fields = std::collections::HashMap::new();
        for t in toks {
            let (k, v) = t.split_once('=').ok_or_else(|| Error::parse(line, format!("bad header field `{t}`")))?;
            let v: usize = v.parse().map_err(|_| Error::parse(line, format!("bad header value `{t}`")))?;
            fields.insert(k.to_string(), v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::parse(line, format!("missing `{k}`")));
        let count = get("slices")?;
        let mut ordering = None;
        if let Some(&(l, text)) = lines.peek() {
            if let Some(rest) = text.strip_prefix("ordering") {
                let o = rest
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| Error::parse(l, format!("bad vertex `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                ordering = Some(o);
                lines.next();
            }
        }
        let mut slices = Vec::with_capacity(count);
        while lines.peek().is_some() {
            slices.push(parse_slice_block(&mut lines, line)?);
        }
        if slices.len() != count {
            return Err(Error::parse(line, format!("header announces {count} slices, found {}", slices.len())));
        }
        let u = UnitDecomposition { slices, origins: None, ordering };
        u.validate()?;
        if get("q")? != u.width()
            || get("dilated")? != u.is_dilated() as usize
            || get("normalized")? != u.is_normalized() as usize
        {
            return Err(Error::InvalidDecomposition("header flags disagree with the slices".into()));
        }
        Ok(u)
    }
}

/// Composes a glueable sequence of unit or multi-center slices whose ends
/// have empty frontiers.
pub fn compose_slices(slices: &[Slice]) -> Result<Digraph> {
    let mut acc = Slice::empty();
    for s in slices {
        acc = acc.compose(s)?;
    }
    if !acc.is_final() {
        return Err(Error::InvalidDecomposition("composition has a nonempty out-frontier".into()));
    }
    let mut g = Digraph::new(acc.centers.len());
    for (i, l) in acc.centers.iter().enumerate() {
        g.set_vertex_label(i, l.clone());
    }
    for e in &acc.edges {
        match (e.src, e.dst) {
            (End::Center(a), End::Center(b)) => {
                g.add_edge_full(a as usize, b as usize, e.label.clone(), e.weight);
            }
            _ => return Err(Error::InvalidDecomposition("dangling frontier after composition".into())),
        }
    }
    Ok(g)
}

/// Canonical normalized unit decomposition of `g` along `ordering`, with
/// slice `i` centered at `ordering[i]`. At each cut the crossing edges are
/// numbered by (earlier endpoint position, later endpoint position, edge id).
pub fn decompose_along_ordering(g: &Digraph, ordering: &[usize]) -> Result<UnitDecomposition> {
    let n = g.n();
    let pos = positions(n, ordering)?;
    if n == 0 {
        return Ok(UnitDecomposition {
            slices: vec![Slice::empty()],
            origins: Some(vec![SliceOrigin::default()]),
            ordering: Some(Vec::new()),
        });
    }
    // numbers[i][e]: number of edge e at the cut after the first i vertices.
    let mut keyed: Vec<(usize, usize, usize)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| {
            let (a, b) = (pos[e.src].min(pos[e.dst]), pos[e.src].max(pos[e.dst]));
            (a, b, id)
        })
        .collect();
    keyed.sort_unstable();
    let number_at = |cut: usize| -> std::collections::HashMap<usize, u32> {
        keyed
            .iter()
            .filter(|&&(a, b, _)| a < cut && b >= cut)
            .enumerate()
            .map(|(i, &(_, _, id))| (id, i as u32 + 1))
            .collect()
    };
    let cuts: Vec<_> = (0..=n).map(number_at).collect();
    let mut slices = Vec::with_capacity(n);
    let mut origins = Vec::with_capacity(n);
    for (p, &v) in ordering.iter().enumerate() {
        let mut s = Slice::with_center(g.vertex_label(v).clone());
        let mut origin = SliceOrigin { center: Some(v), edges: Vec::new() };
        for &(a, b, id) in &keyed {
            let e = g.edge(id);
            let forward = pos[e.src] <= pos[e.dst];
            let c = End::Center(0);
            let (near, far) = if a == p && b == p {
                (c, c)
            } else if b == p && a < p {
                (End::In(cuts[p][&id]), c)
            } else if a == p && b > p {
                (c, End::Out(cuts[p + 1][&id]))
            } else if a < p && b > p {
                (End::In(cuts[p][&id]), End::Out(cuts[p + 1][&id]))
            } else {
                continue;
            };
            // `near` is the endpoint on the earlier side of the slice.
            let (src, dst) = if forward || a == b { (near, far) } else { (far, near) };
            s.edges.push(SliceEdge { src, dst, label: e.label.clone(), weight: e.weight });
            origin.edges.push(id);
        }
        slices.push(s);
        origins.push(origin);
    }
    Ok(UnitDecomposition { slices, origins: Some(origins), ordering: Some(ordering.to_vec()) })
}

/// A numbered sub-slice of a unit slice and which parts it keeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubSlice {
    pub slice: Slice,
    pub keeps_center: bool,
    /// Indices into the parent's edge list.
    pub kept_edges: Vec<usize>,
}

/// Maximum number of edges in a slice passed to sub-slice enumeration.
pub const MAX_SUBSLICE_EDGES: usize = 24;

/// All sub-slices of the unit slice `s` with width at most `c`, frontier
/// numbers inherited from `s`.
pub fn sub_slices(s: &Slice, c: usize) -> Result<Vec<SubSlice>> {
    if !s.is_unit() {
        return Err(Error::InvalidSlice("sub-slice enumeration needs a unit slice".into()));
    }
    let m = s.edges.len();
    if m > MAX_SUBSLICE_EDGES {
        return Err(Error::Resource(format!("slice with {m} edges exceeds the sub-slice enumeration cap")));
    }
    let touches_center: Vec<bool> = s
        .edges
        .iter()
        .map(|e| matches!(e.src, End::Center(_)) || matches!(e.dst, End::Center(_)))
        .collect();
    let through_mask: u64 = (0..m).filter(|&i| !touches_center[i]).fold(0, |acc, i| acc | 1 << i);
    let in_mask: u64 = (0..m).filter(|&i| s.edges[i].touches_in().is_some()).fold(0, |acc, i| acc | 1 << i);
    let out_mask: u64 = (0..m).filter(|&i| s.edges[i].touches_out().is_some()).fold(0, |acc, i| acc | 1 << i);
    let mut result = Vec::new();
    let center_options: &[bool] = if s.centers.is_empty() { &[false] } else { &[false, true] };
    for &keep in center_options {
        let allowed: u64 = if keep { (1u64 << m) - 1 } else { through_mask };
        // Enumerate all submasks of `allowed`.
        let mut sub = allowed;
        loop {
            if (sub & in_mask).count_ones() as usize <= c && (sub & out_mask).count_ones() as usize <= c {
                let kept: Vec<usize> = (0..m).filter(|&i| sub & (1 << i) != 0).collect();
                let slice = Slice {
                    centers: if keep { s.centers.clone() } else { Vec::new() },
                    edges: kept.iter().map(|&i| s.edges[i].clone()).collect(),
                };
                result.push(SubSlice { slice, keeps_center: keep, kept_edges: kept });
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & allowed;
        }
    }
    result.reverse();
    Ok(result)
}

pub fn enumerate_numbered_sub_slices(s: &Slice, c: usize) -> Result<Vec<Slice>> {
    Ok(sub_slices(s, c)?.into_iter().map(|x| x.slice).collect())
}

/// Vertex of a ⊕-composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OplusVertex {
    Center { slice: usize, label: Label },
    InFrontier { slice: usize, number: u32 },
    OutFrontier { slice: usize, number: u32 },
}

/// ⊕-composition: frontier vertices are kept and consecutive equally
/// numbered frontier vertices are linked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OplusGraph {
    pub vertices: Vec<OplusVertex>,
    /// `(src, dst, label, weight)` over `vertices`.
    pub edges: Vec<(usize, usize, Label, Weight)>,
    /// Links from an out-frontier vertex to the next slice's in-frontier.
    pub links: Vec<(usize, usize)>,
}

pub fn oplus(a: &Slice, b: &Slice) -> Result<OplusGraph> {
    oplus_all(&[a.clone(), b.clone()])
}

pub fn oplus_all(slices: &[Slice]) -> Result<OplusGraph> {
    let mut g = OplusGraph { vertices: Vec::new(), edges: Vec::new(), links: Vec::new() };
    let mut prev_out: std::collections::HashMap<u32, usize> = Default::default();
    for (si, s) in slices.iter().enumerate() {
        if si > 0 && !slices[si - 1].can_glue(s) {
            return Err(Error::NotGlueable(format!("slices {} and {si}", si - 1)));
        }
        let base = g.vertices.len();
        for l in &s.centers {
            g.vertices.push(OplusVertex::Center { slice: si, label: l.clone() });
        }
        let mut out_here = std::collections::HashMap::new();
        let mut vertex_of = |end: End, g: &mut OplusGraph| -> usize {
            match end {
                End::Center(i) => base + i as usize,
                End::In(n) => {
                    g.vertices.push(OplusVertex::InFrontier { slice: si, number: n });
                    let id = g.vertices.len() - 1;
                    if let Some(&o) = prev_out.get(&n) {
                        g.links.push((o, id));
                    }
                    id
                }
                End::Out(n) => {
                    g.vertices.push(OplusVertex::OutFrontier { slice: si, number: n });
                    let id = g.vertices.len() - 1;
                    out_here.insert(n, id);
                    id
                }
            }
        };
        for e in &s.edges {
            let a = vertex_of(e.src, &mut g);
            let b = vertex_of(e.dst, &mut g);
            g.edges.push((a, b, e.label.clone(), e.weight));
        }
        prev_out = out_here;
    }
    Ok(g)
}

impl OplusGraph {
    /// Contracts every chain of frontier vertices into a single edge between
    /// centers. Labels and weights come from the chain's last segment.
    pub fn contract(&self) -> Result<Digraph> {
        let nv = self.vertices.len();
        let mut centers = vec![usize::MAX; nv];
        let mut labels = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if let OplusVertex::Center { label, .. } = v {
                centers[i] = labels.len();
                labels.push(label.clone());
            }
        }
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (i, &(a, b, _, _)) in self.edges.iter().enumerate() {
            incident[a].push(i);
            if b != a {
                incident[b].push(i);
            }
        }
        let mut link = vec![usize::MAX; nv];
        for &(a, b) in &self.links {
            link[a] = b;
            link[b] = a;
        }
        let mut g = Digraph::new(labels.len());
        for (i, l) in labels.into_iter().enumerate() {
            g.set_vertex_label(i, l);
        }
        let mut used = vec![false; self.edges.len()];
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| {
            let (a, b, _, _) = self.edges[i];
            (centers[a] == usize::MAX && centers[b] == usize::MAX, i)
        });
        for start in order {
            if used[start] {
                continue;
            }
            let (a, b, _, _) = self.edges[start];
            let start_vertex = if centers[a] != usize::MAX { a } else if centers[b] != usize::MAX { b } else {
                return Err(Error::InvalidDecomposition("frontier chain without a center endpoint".into()));
            };
            // Walk from the center endpoint through links to the other center.
            let forward = self.edges[start].0 == start_vertex;
            let mut edge = start;
            let mut at = start_vertex;
            loop {
                used[edge] = true;
                let (x, y, ref label, w) = self.edges[edge];
                let next = if x == at { y } else { x };
                if (x == at) != forward {
                    return Err(Error::InvalidDecomposition("chain segments disagree in direction".into()));
                }
                if centers[next] != usize::MAX {
                    let (s, t) = if forward { (start_vertex, next) } else { (next, start_vertex) };
                    g.add_edge_full(centers[s], centers[t], label.clone(), w);
                    break;
                }
                let other = link[next];
                if other == usize::MAX {
                    return Err(Error::InvalidDecomposition("unlinked frontier vertex".into()));
                }
                edge = incident[other][0];
                at = other;
            }
        }
        Ok(g)
    }
}
