//! Normalized unit slices as automaton input symbols.
//!
//! Every vertex or edge of a composed digraph is owned by exactly one slice:
//! a vertex by the slice whose center it is, an edge by the slice holding
//! its last segment. Within a slice these elements are numbered by columns:
//! the center first, then completed in-frontier segments by in-number, then
//! self-loops. A set variable restricted to one slice is a bitmask over
//! columns.

use std::collections::HashMap;
use std::sync::Arc;

use crate::digraph::Label;
use crate::error::{Error, Result};
use crate::slice::{End, Slice};

pub const MAX_COLUMNS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Column {
    Center,
    /// Completed segment between in-frontier vertex `num` and the center.
    /// `forward` when the original edge starts at the earlier endpoint.
    InEdge { num: u32, forward: bool },
    Loop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InSeg {
    ToCenter { col: u8, forward: bool },
    /// Continues to out-frontier vertex `out`.
    Through { out: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutSeg {
    /// Starts at the center. `outgoing` when the edge leaves the center.
    FromCenter { outgoing: bool },
    Through { from: u32 },
}

#[derive(Clone, Debug)]
pub struct SymInfo {
    pub slice: Slice,
    pub has_center: bool,
    pub columns: Vec<Column>,
    pub col_labels: Vec<Label>,
    /// Indexed by in-number minus one.
    pub ins: Vec<InSeg>,
    /// Indexed by out-number minus one.
    pub outs: Vec<OutSeg>,
    pub vertex_mask: u64,
    pub edge_mask: u64,
    pub in_sig: Vec<i8>,
    pub out_sig: Vec<i8>,
}

impl SymInfo {
    /// Builds the column view of a unit slice, normalizing it first.
    pub fn new(slice: &Slice) -> Result<SymInfo> {
        slice.validate()?;
        if !slice.is_unit() {
            return Err(Error::InvalidSlice("automaton symbols must be unit slices".into()));
        }
        let slice = slice.normalize();
        let has_center = !slice.centers.is_empty();
        let mut columns = Vec::new();
        let mut col_labels = Vec::new();
        if has_center {
            columns.push(Column::Center);
            col_labels.push(slice.centers[0].clone());
        }
        let in_count = slice.in_size();
        let out_count = slice.out_size();
        let mut ins = vec![InSeg::Through { out: 0 }; in_count];
        let mut outs = vec![OutSeg::Through { from: 0 }; out_count];
        let mut in_sig = vec![0i8; in_count];
        let mut out_sig = vec![0i8; out_count];
        let mut loops = Vec::new();
        for j in 1..=in_count as u32 {
            let e = slice.in_edge(j).expect("normalized");
            in_sig[j as usize - 1] = e.orientation();
            match (e.src, e.dst) {
                (End::In(_), End::Out(o)) | (End::Out(o), End::In(_)) => {
                    ins[j as usize - 1] = InSeg::Through { out: o };
                    outs[o as usize - 1] = OutSeg::Through { from: j };
                }
                (src, _) => {
                    let forward = matches!(src, End::In(_));
                    ins[j as usize - 1] = InSeg::ToCenter { col: columns.len() as u8, forward };
                    columns.push(Column::InEdge { num: j, forward });
                    col_labels.push(e.label.clone());
                }
            }
        }
        for e in &slice.edges {
            match (e.src, e.dst) {
                (End::Center(_), End::Center(_)) => loops.push(e.label.clone()),
                (End::Center(_), End::Out(o)) => outs[o as usize - 1] = OutSeg::FromCenter { outgoing: true },
                (End::Out(o), End::Center(_)) => outs[o as usize - 1] = OutSeg::FromCenter { outgoing: false },
                _ => {}
            }
        }
        for o in 1..=out_count as u32 {
            out_sig[o as usize - 1] = slice.out_edge(o).expect("normalized").orientation();
        }
        for l in loops {
            columns.push(Column::Loop);
            col_labels.push(l);
        }
        if columns.len() > MAX_COLUMNS {
            return Err(Error::Resource(format!("slice with {} elements", columns.len())));
        }
        let all = mask_of(columns.len());
        let vertex_mask = u64::from(has_center);
        Ok(SymInfo {
            slice,
            has_center,
            columns,
            col_labels,
            ins,
            outs,
            vertex_mask,
            edge_mask: all & !vertex_mask,
            in_sig,
            out_sig,
        })
    }

    pub fn all_mask(&self) -> u64 {
        self.vertex_mask | self.edge_mask
    }

    pub fn in_count(&self) -> usize {
        self.ins.len()
    }

    pub fn out_count(&self) -> usize {
        self.outs.len()
    }

    pub fn loop_mask(&self) -> u64 {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Column::Loop)
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

pub fn mask_of(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Interning table from canonical keys of normalized slices to symbol ids.
#[derive(Default)]
pub struct Symbols {
    index: HashMap<Vec<u8>, u32>,
    infos: Vec<Arc<SymInfo>>,
}

impl Symbols {
    pub fn new() -> Self {
        Symbols::default()
    }

    pub fn intern(&mut self, slice: &Slice) -> Result<u32> {
        let info = SymInfo::new(slice)?;
        let key = info.slice.canonical_key();
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        let id = self.infos.len() as u32;
        self.infos.push(Arc::new(info));
        self.index.insert(key, id);
        Ok(id)
    }

    pub fn get(&self, id: u32) -> &Arc<SymInfo> {
        &self.infos[id as usize]
    }

    pub fn len(&self) -> usize {
        self.infos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infos.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::default_label;

    #[test]
    fn columns_of_a_center_slice() {
        let s = Slice::with_center(default_label())
            .push(End::In(2), End::Center(0))
            .push(End::Center(0), End::In(1))
            .push(End::In(3), End::Out(1))
            .push(End::Center(0), End::Out(2))
            .push(End::Center(0), End::Center(0));
        let info = SymInfo::new(&s).unwrap();
        assert_eq!(
            info.columns,
            vec![
                Column::Center,
                Column::InEdge { num: 1, forward: false },
                Column::InEdge { num: 2, forward: true },
                Column::Loop
            ]
        );
        assert_eq!(info.ins[2], InSeg::Through { out: 1 });
        assert_eq!(info.outs[1], OutSeg::FromCenter { outgoing: true });
        assert_eq!(info.vertex_mask, 1);
        assert_eq!(info.edge_mask, 0b1110);
        assert_eq!(info.loop_mask(), 0b1000);
        assert_eq!(info.in_sig, vec![-1, 1, 1]);
        assert_eq!(info.out_sig, vec![1, 1]);
    }

    #[test]
    fn interning_normalizes() {
        let mut t = Symbols::new();
        let a = Slice::empty().push(End::In(3), End::Out(5));
        let b = Slice::empty().push(End::In(1), End::Out(1));
        assert_eq!(t.intern(&a).unwrap(), t.intern(&b).unwrap());
        assert_eq!(t.len(), 1);
    }
}
