//! Nondeterministic scanners for path-shaped predicates.
//!
//! A [`Track`] follows one directed simple path (or, on request, one simple
//! cycle) through a sequence of glued unit slices. Its state records, for
//! every out-frontier chain carrying a path edge, the other end of the path
//! fragment the chain belongs to. The direction of a fragment end is read
//! off the chain orientation, so it is not stored.

use super::symbols::{InSeg, OutSeg, SymInfo};

const CLOSED: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Track {
    /// Per chain: `0` off the path, `1` fragment closed at the other end,
    /// `m + 1` fragment continuing at chain `m`.
    pub ends: Vec<u8>,
    pub done: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FEnd {
    Closed,
    In(u32),
    New(u32),
}

/// Which center-incident new out segments a path takes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Choice {
    pub center: bool,
    pub out_leaving: Option<u32>,
    pub out_entering: Option<u32>,
}

impl Choice {
    pub fn new_outs(&self) -> u64 {
        self.out_leaving.map_or(0, |o| 1 << (o - 1)) | self.out_entering.map_or(0, |o| 1 << (o - 1))
    }
}

/// Every choice of center membership and new out segments for one step.
pub fn choices(sym: &SymInfo, center: Option<bool>) -> Vec<Choice> {
    let mut leaving = vec![None];
    let mut entering = vec![None];
    for (i, seg) in sym.outs.iter().enumerate() {
        match seg {
            OutSeg::FromCenter { outgoing: true } => leaving.push(Some(i as u32 + 1)),
            OutSeg::FromCenter { outgoing: false } => entering.push(Some(i as u32 + 1)),
            OutSeg::Through { .. } => {}
        }
    }
    let centers: &[bool] = match center {
        Some(true) if sym.has_center => &[true],
        Some(true) => &[],
        Some(false) => &[false],
        None if sym.has_center => &[false, true],
        None => &[false],
    };
    let mut out = Vec::new();
    for &c in centers {
        if !c {
            out.push(Choice::default());
            continue;
        }
        for &l in &leaving {
            for &e in &entering {
                out.push(Choice { center: true, out_leaving: l, out_entering: e });
            }
        }
    }
    out
}

impl Track {
    pub fn start() -> Track {
        Track { ends: Vec::new(), done: 0 }
    }

    pub fn is_open(&self) -> bool {
        self.ends.iter().any(|&e| e != 0)
    }

    pub fn active_chains(&self) -> usize {
        self.ends.iter().filter(|&&e| e != 0).count()
    }

    pub fn is_empty_path(&self) -> bool {
        self.done == 0 && !self.is_open()
    }

    fn partner(&self, j: u32) -> FEnd {
        match self.ends[j as usize - 1] {
            CLOSED => FEnd::Closed,
            code => FEnd::In(code as u32 - 1),
        }
    }

    /// In-chains of the path whose segment ends at the center, split by
    /// whether the edge enters or leaves the center.
    pub fn center_segments(&self, sym: &SymInfo) -> (Vec<u32>, Vec<u32>) {
        let mut entering = Vec::new();
        let mut leaving = Vec::new();
        for (i, seg) in sym.ins.iter().enumerate() {
            if self.ends[i] == 0 {
                continue;
            }
            if let InSeg::ToCenter { forward, .. } = seg {
                if *forward {
                    entering.push(i as u32 + 1);
                } else {
                    leaving.push(i as u32 + 1);
                }
            }
        }
        (entering, leaving)
    }

    /// Reads one symbol. Returns `None` when the path cannot continue this
    /// way. With `allow_cycle`, closing a fragment onto itself completes a
    /// simple cycle.
    pub fn step(&self, sym: &SymInfo, choice: Choice, allow_cycle: bool) -> Option<Track> {
        if self.ends.len() != sym.in_count() {
            return None;
        }
        let out_count = sym.out_count();
        if self.done > 0 {
            if choice.center || choice.new_outs() != 0 {
                return None;
            }
            return Some(Track { ends: vec![0; out_count], done: self.done });
        }
        let (entering, leaving) = self.center_segments(sym);
        let n_in = entering.len() + usize::from(choice.out_entering.is_some());
        let n_out = leaving.len() + usize::from(choice.out_leaving.is_some());
        if n_in > 1 || n_out > 1 {
            return None;
        }
        if !choice.center && (n_in + n_out > 0) {
            return None;
        }
        let mut frags: Vec<(FEnd, FEnd)> = Vec::new();
        for j in 1..=self.ends.len() as u32 {
            if self.ends[j as usize - 1] == 0 {
                continue;
            }
            match self.partner(j) {
                FEnd::In(m) if m < j => {}
                p => frags.push((FEnd::In(j), p)),
            }
        }
        let mut done = 0u8;
        if choice.center {
            let tail = match (entering.first(), choice.out_entering) {
                (Some(&j), _) => self.partner(j),
                (None, Some(o)) => FEnd::New(o),
                (None, None) => FEnd::Closed,
            };
            let head = match (leaving.first(), choice.out_leaving) {
                (Some(&j), _) => self.partner(j),
                (None, Some(o)) => FEnd::New(o),
                (None, None) => FEnd::Closed,
            };
            let touches = |f: &(FEnd, FEnd), j: u32| f.0 == FEnd::In(j) || f.1 == FEnd::In(j);
            let cycle = matches!((entering.first(), leaving.first()), (Some(&j), Some(&k)) if self.partner(j) == FEnd::In(k));
            for &j in entering.iter().chain(leaving.iter()) {
                frags.retain(|f| !touches(f, j));
            }
            if cycle {
                if !allow_cycle {
                    return None;
                }
                done += 1;
            } else if tail == FEnd::Closed && head == FEnd::Closed {
                done += 1;
            } else {
                frags.push((tail, head));
            }
        }
        let mut ends = vec![0u8; out_count];
        let place = |e: FEnd| -> Option<Option<u32>> {
            match e {
                FEnd::Closed => Some(None),
                FEnd::New(o) => Some(Some(o)),
                FEnd::In(j) => match sym.ins[j as usize - 1] {
                    InSeg::Through { out } => Some(Some(out)),
                    InSeg::ToCenter { .. } => None,
                },
            }
        };
        for (a, b) in frags {
            let a = place(a)?;
            let b = place(b)?;
            match (a, b) {
                (Some(x), Some(y)) => {
                    ends[x as usize - 1] = y as u8 + 1;
                    ends[y as usize - 1] = x as u8 + 1;
                }
                (Some(x), None) | (None, Some(x)) => ends[x as usize - 1] = CLOSED,
                (None, None) => done += 1,
            }
        }
        if done > 1 || (done == 1 && ends.iter().any(|&e| e != 0)) {
            return None;
        }
        Some(Track { ends, done })
    }
}

/// `Path(X, Y)` scanner: successors of a track under the column masks of
/// `X` (vertices) and `Y` (edges) within one symbol.
pub fn path_successors(t: &Track, sym: &SymInfo, mx: u64, my: u64) -> Vec<Track> {
    if mx & sym.edge_mask != 0 || my & sym.vertex_mask != 0 || my & sym.loop_mask() != 0 {
        return Vec::new();
    }
    if t.ends.len() != sym.in_count() {
        return Vec::new();
    }
    for (i, seg) in sym.ins.iter().enumerate() {
        if let InSeg::ToCenter { col, .. } = seg {
            if (t.ends[i] != 0) != (my >> col & 1 == 1) {
                return Vec::new();
            }
        }
    }
    let center = mx & sym.vertex_mask != 0;
    choices(sym, Some(center)).into_iter().filter_map(|c| t.step(sym, c, false)).collect()
}

pub fn path_accepts(t: &Track) -> bool {
    !t.is_open()
}

/// State of the zig-zag violation scanner: a path or cycle, and whether
/// it has crossed some frontier more than `z` times.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Violation {
    pub track: Track,
    pub flagged: bool,
}

pub enum ViolationStep {
    /// The violation is already certain regardless of the rest of the input.
    Certain,
    Next(Vec<Violation>),
}

pub fn violation_successors(v: &Violation, sym: &SymInfo, z: usize) -> ViolationStep {
    let mut out = Vec::new();
    for c in choices(sym, None) {
        if let Some(t) = v.track.step(sym, c, true) {
            let flagged = v.flagged || t.active_chains() > z;
            if t.done == 1 {
                if flagged {
                    return ViolationStep::Certain;
                }
                continue;
            }
            out.push(Violation { track: t, flagged });
        }
    }
    ViolationStep::Next(out)
}

/// `Unitable(k)` scanner: a sorted tuple of `k` tracks whose union covers
/// every vertex and edge. Self-loops are never covered.
pub fn unitable_successors(ts: &[Track], sym: &SymInfo) -> Vec<Vec<Track>> {
    if sym.loop_mask() != 0 {
        return Vec::new();
    }
    let options: Vec<Vec<(Choice, Track)>> = ts
        .iter()
        .map(|t| choices(sym, None).into_iter().filter_map(|c| t.step(sym, c, false).map(|n| (c, n))).collect())
        .collect();
    let mut needed = 0u64;
    for (i, seg) in sym.outs.iter().enumerate() {
        if let OutSeg::FromCenter { .. } = seg {
            needed |= 1 << i;
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<Track> = Vec::with_capacity(ts.len());
    fn rec(
        i: usize,
        options: &[Vec<(Choice, Track)>],
        center: bool,
        outs: u64,
        need_center: bool,
        needed: u64,
        cur: &mut Vec<Track>,
        out: &mut Vec<Vec<Track>>,
    ) {
        if i == options.len() {
            if (center || !need_center) && outs & needed == needed {
                let mut v = cur.clone();
                v.sort();
                out.push(v);
            }
            return;
        }
        for (c, t) in &options[i] {
            cur.push(t.clone());
            rec(i + 1, options, center || c.center, outs | c.new_outs(), need_center, needed, cur, out);
            cur.pop();
        }
    }
    rec(0, &options, false, 0, sym.has_center, needed, &mut cur, &mut out);
    out.sort();
    out.dedup();
    out
}

pub fn unitable_accepts(ts: &[Track]) -> bool {
    ts.iter().all(path_accepts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;
    use crate::slice::decompose_along_ordering;

    fn syms(g: &Digraph) -> Vec<SymInfo> {
        let order: Vec<usize> = (0..g.n()).collect();
        decompose_along_ordering(g, &order).unwrap().slices.iter().map(|s| SymInfo::new(s).unwrap()).collect()
    }

    fn run_unitable(g: &Digraph, k: usize) -> bool {
        let mut states = vec![vec![Track::start(); k]];
        for s in syms(g) {
            let mut next: Vec<Vec<Track>> = states.iter().flat_map(|ts| unitable_successors(ts, &s)).collect();
            next.sort();
            next.dedup();
            states = next;
        }
        states.iter().any(|ts| unitable_accepts(ts))
    }

    #[test]
    fn unitable_on_small_graphs() {
        assert!(run_unitable(&Digraph::from_edges(3, &[(0, 1), (1, 2)]), 1));
        assert!(run_unitable(&Digraph::from_edges(3, &[(2, 1), (1, 0)]), 1));
        assert!(!run_unitable(&Digraph::from_edges(3, &[(0, 1), (0, 2)]), 1));
        assert!(run_unitable(&Digraph::from_edges(3, &[(0, 1), (0, 2)]), 2));
        assert!(!run_unitable(&Digraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]), 1));
        assert!(run_unitable(&Digraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]), 2));
        assert!(run_unitable(&Digraph::from_edges(2, &[]), 2));
        assert!(!run_unitable(&Digraph::from_edges(3, &[]), 2));
        assert!(run_unitable(&Digraph::from_edges(4, &[(0, 2), (2, 1), (1, 3)]), 1));
    }

    fn run_violation(g: &Digraph, z: usize) -> bool {
        let mut states = vec![Violation { track: Track::start(), flagged: false }];
        for s in syms(g) {
            let mut next = Vec::new();
            for v in &states {
                match violation_successors(v, &s, z) {
                    ViolationStep::Certain => return true,
                    ViolationStep::Next(n) => next.extend(n),
                }
            }
            next.sort();
            next.dedup();
            states = next;
        }
        false
    }

    #[test]
    fn violation_matches_zigzag_number() {
        let g = Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (3, 1)]);
        let zz = crate::ordering::zigzag_number(&g, &[0, 1, 2, 3]).unwrap();
        assert!(run_violation(&g, zz - 1));
        assert!(!run_violation(&g, zz));
        assert!(run_violation(&Digraph::from_edges(2, &[(0, 1), (1, 0)]), 1));
        assert!(!run_violation(&Digraph::from_edges(2, &[(0, 1), (1, 0)]), 2));
    }
}
