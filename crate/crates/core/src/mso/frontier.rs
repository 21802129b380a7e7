//! Deterministic scanners for whole-graph properties.
//!
//! Every out-frontier chain carries the component of its earlier endpoint
//! and, for bipartiteness, that endpoint's colour relative to the
//! component. All edges at a center are visible in the center's slice, so
//! degree constraints are local.

use super::symbols::{InSeg, OutSeg, SymInfo};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphProp {
    Connected,
    Forest,
    Bipartite,
    HamiltonianCycle,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Frontier {
    /// Component label per out chain, numbered by first appearance.
    pub comp: Vec<u8>,
    /// Endpoint colour per out chain; empty unless checking bipartiteness.
    pub color: Vec<u8>,
    /// A component has been completed.
    pub closed: bool,
}

impl Frontier {
    pub fn accepts(&self) -> bool {
        self.comp.is_empty()
    }
}

struct Dsu {
    parent: Vec<usize>,
    parity: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect(), parity: vec![0; n] }
    }

    fn find(&mut self, x: usize) -> (usize, u8) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (r, pp) = self.find(p);
        self.parent[x] = r;
        self.parity[x] ^= pp;
        (r, self.parity[x])
    }

    /// Joins `a` and `b` so that their colours differ by `d`. Returns
    /// `Some(consistent)` if they were already joined.
    fn union(&mut self, a: usize, b: usize, d: u8) -> Option<bool> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return Some(pa ^ pb == d);
        }
        self.parent[ra] = rb;
        self.parity[ra] = pa ^ pb ^ d;
        None
    }
}

pub fn frontier_step(prop: GraphProp, f: &Frontier, sym: &SymInfo) -> Option<Frontier> {
    if f.comp.len() != sym.in_count() {
        return None;
    }
    let labels = f.comp.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let center = labels;
    let mut dsu = Dsu::new(labels + 1);
    let loops = sym.loop_mask().count_ones() as usize;
    if sym.has_center {
        if loops > 0 && matches!(prop, GraphProp::Forest | GraphProp::Bipartite) {
            return None;
        }
        if f.closed && matches!(prop, GraphProp::Connected | GraphProp::HamiltonianCycle) {
            return None;
        }
        let (mut indeg, mut outdeg) = (loops, loops);
        for (j, seg) in sym.ins.iter().enumerate() {
            let InSeg::ToCenter { forward, .. } = *seg else { continue };
            if forward {
                indeg += 1;
            } else {
                outdeg += 1;
            }
            let color = f.color.get(j).copied().unwrap_or(0);
            match dsu.union(f.comp[j] as usize, center, color ^ 1) {
                Some(_) if prop == GraphProp::Forest => return None,
                Some(false) if prop == GraphProp::Bipartite => return None,
                _ => {}
            }
        }
        for seg in &sym.outs {
            if let OutSeg::FromCenter { outgoing } = *seg {
                if outgoing {
                    outdeg += 1;
                } else {
                    indeg += 1;
                }
            }
        }
        if prop == GraphProp::HamiltonianCycle && (indeg != 1 || outdeg != 1) {
            return None;
        }
    }
    let mut ends = Vec::with_capacity(sym.out_count());
    for seg in &sym.outs {
        let (node, color) = match *seg {
            OutSeg::Through { from } => {
                let j = from as usize - 1;
                (f.comp[j] as usize, f.color.get(j).copied().unwrap_or(0))
            }
            OutSeg::FromCenter { .. } => (center, 0),
        };
        let (root, parity) = dsu.find(node);
        ends.push((root, color ^ parity));
    }
    let mut next = Frontier { closed: f.closed, ..Frontier::default() };
    let mut roots: Vec<(usize, u8)> = Vec::new();
    for &(root, color) in &ends {
        let label = match roots.iter().position(|&(r, _)| r == root) {
            Some(i) => i,
            None => {
                roots.push((root, color));
                roots.len() - 1
            }
        };
        next.comp.push(label as u8);
        if prop == GraphProp::Bipartite {
            next.color.push(color ^ roots[label].1);
        }
    }
    if matches!(prop, GraphProp::Connected | GraphProp::HamiltonianCycle) {
        let mut present: Vec<usize> = f.comp.iter().map(|&c| c as usize).collect();
        if sym.has_center {
            present.push(center);
        }
        let mut finished: Vec<usize> = present
            .into_iter()
            .map(|x| dsu.find(x).0)
            .filter(|r| !roots.iter().any(|&(q, _)| q == *r))
            .collect();
        finished.sort_unstable();
        finished.dedup();
        if !finished.is_empty() {
            if finished.len() > 1 || !roots.is_empty() || f.closed {
                return None;
            }
            next.closed = true;
        }
    }
    Some(next)
}
