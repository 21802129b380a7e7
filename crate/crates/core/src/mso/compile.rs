//! Slice graphs of formulas: the lazy saturated view used by counting, and
//! explicit materialization over a finite alphabet.

use std::collections::{BTreeMap, HashMap};

use super::automaton::{Automaton, AutomatonStats, StateId, DEAD};
use super::formula::{Formula, Sentence};
use crate::digraph::{default_label, Label};
use crate::error::{Error, Result};
use crate::slice::{sub_slices, End, Slice, SliceEdge, UnitDecomposition};
use crate::slice_graph::{AlphabetMeta, Letter, SliceGraph};

pub const DEFAULT_MAX_STATES: usize = 2_000_000;

/// Cap on interned automaton states, overridable by `SLICECOUNT_MAX_STATES`.
pub fn max_states_from_env() -> usize {
    std::env::var("SLICECOUNT_MAX_STATES").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_MAX_STATES)
}

/// `φ ∧ ZigZag(z) ∧ Unitable(k)`.
pub fn saturate(sentence: &Sentence, k: usize, z: usize) -> Sentence {
    Sentence {
        formula: Formula::And(vec![sentence.formula.clone(), Formula::ZigZag(z), Formula::Unitable(k)]),
        names: sentence.names.clone(),
    }
}

/// Normalized copy of a slice with all weights reset.
pub fn strip(slice: &Slice) -> Slice {
    let mut s = slice.normalize();
    for e in &mut s.edges {
        e.weight = 0;
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct ViewState {
    auto: StateId,
    sig: u32,
}

/// The saturated slice language of `φ ∧ ZigZag(z) ∧ Unitable(k)` over
/// unit slices of width at most `c`, explored on demand. States are
/// automaton states paired with the orientation signature of the last
/// out-frontier; frontier numbers and weights are ignored.
pub struct SaturatedView {
    automaton: Automaton,
    c: usize,
    max_states: usize,
    letters: HashMap<Vec<u8>, Option<u32>>,
    sigs: Vec<Vec<i8>>,
    sig_index: HashMap<Vec<i8>, u32>,
    states: Vec<ViewState>,
    state_index: HashMap<ViewState, u32>,
    steps: HashMap<(u32, u32), Option<u32>>,
}

impl SaturatedView {
    pub fn new(sentence: &Sentence, k: usize, z: usize, c: usize) -> Result<Self> {
        if !sentence.formula.free_vars().is_empty() {
            return Err(Error::InvalidQuery("formula must be closed".into()));
        }
        let automaton = Automaton::new(&saturate(sentence, k, z), Some(c))?;
        Ok(SaturatedView {
            automaton,
            c,
            max_states: max_states_from_env(),
            letters: HashMap::new(),
            sigs: Vec::new(),
            sig_index: HashMap::new(),
            states: Vec::new(),
            state_index: HashMap::new(),
            steps: HashMap::new(),
        })
    }

    pub fn with_max_states(mut self, max_states: usize) -> Self {
        self.max_states = max_states;
        self
    }

    pub fn width(&self) -> usize {
        self.c
    }

    pub fn automaton_stats(&self) -> AutomatonStats {
        self.automaton.stats()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    fn symbol(&mut self, letter: &Letter) -> Result<Option<u32>> {
        if let Some(&s) = self.letters.get(&letter.key) {
            return Ok(s);
        }
        let s = &letter.slice;
        let sym = if s.is_unit() && s.in_size() <= self.c && s.out_size() <= self.c {
            Some(self.automaton.symbol(&strip(s))?)
        } else {
            None
        };
        self.letters.insert(letter.key.clone(), sym);
        Ok(sym)
    }

    fn sig_id(&mut self, sig: &[i8]) -> u32 {
        if let Some(&id) = self.sig_index.get(sig) {
            return id;
        }
        let id = self.sigs.len() as u32;
        self.sigs.push(sig.to_vec());
        self.sig_index.insert(sig.to_vec(), id);
        id
    }

    fn intern(&mut self, st: ViewState) -> Result<u32> {
        if let Some(&id) = self.state_index.get(&st) {
            return Ok(id);
        }
        if self.automaton.stats().states > self.max_states {
            return Err(Error::Resource(format!("automaton state cap {} exceeded", self.max_states)));
        }
        let id = self.states.len() as u32;
        self.states.push(st);
        self.state_index.insert(st, id);
        Ok(id)
    }

    fn read(&mut self, from: StateId, sym: u32) -> Result<Option<u32>> {
        let next = self.automaton.step(from, sym);
        if next == DEAD {
            return Ok(None);
        }
        let sig = self.automaton.symbol_info(sym).out_sig.clone();
        let sig = self.sig_id(&sig);
        self.intern(ViewState { auto: next, sig }).map(Some)
    }

    /// State after reading `letter` as the first letter.
    pub fn start(&mut self, letter: &Letter) -> Result<Option<u32>> {
        let Some(sym) = self.symbol(letter)? else { return Ok(None) };
        if self.automaton.symbol_info(sym).in_count() != 0 {
            return Ok(None);
        }
        let init = self.automaton.initial();
        if init == DEAD {
            return Ok(None);
        }
        self.read(init, sym)
    }

    pub fn advance(&mut self, s: u32, letter: &Letter) -> Result<Option<u32>> {
        let Some(sym) = self.symbol(letter)? else { return Ok(None) };
        if let Some(&t) = self.steps.get(&(s, sym)) {
            return Ok(t);
        }
        let st = self.states[s as usize];
        let t = if self.automaton.symbol_info(sym).in_sig != self.sigs[st.sig as usize] {
            None
        } else {
            self.read(st.auto, sym)?
        };
        self.steps.insert((s, sym), t);
        Ok(t)
    }

    /// True if a string ending in state `s` is in the language.
    pub fn accepts(&self, s: u32) -> bool {
        let st = self.states[s as usize];
        self.sigs[st.sig as usize].is_empty() && self.automaton.accepts(st.auto)
    }

    pub fn accepts_word(&mut self, word: &[Slice]) -> Result<bool> {
        let Some(first) = word.first() else { return Ok(false) };
        let mut s = match self.start(&Letter::new(first.clone()))? {
            Some(s) => s,
            None => return Ok(false),
        };
        for slice in &word[1..] {
            s = match self.advance(s, &Letter::new(slice.clone()))? {
                Some(t) => t,
                None => return Ok(false),
            };
        }
        Ok(self.accepts(s))
    }
}

/// A complete deterministic automaton over an explicit alphabet, with a
/// missing transition meaning rejection.
#[derive(Clone, Debug)]
pub struct Dfa {
    pub alphabet: Vec<Slice>,
    pub initial: u32,
    pub accept: Vec<bool>,
    pub delta: Vec<Vec<Option<u32>>>,
}

impl Dfa {
    pub fn len(&self) -> usize {
        self.accept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accept.is_empty()
    }

    pub fn run(&self, word: &[usize]) -> bool {
        let mut s = self.initial;
        for &a in word {
            match self.delta[s as usize][a] {
                Some(t) => s = t,
                None => return false,
            }
        }
        self.accept[s as usize]
    }

    /// Moore partition refinement.
    pub fn minimize(&self) -> Dfa {
        let n = self.len();
        let mut class: Vec<u32> = self.accept.iter().map(|&a| u32::from(a)).collect();
        let mut count = 0;
        loop {
            let mut index: HashMap<(u32, Vec<Option<u32>>), u32> = HashMap::new();
            let mut next = vec![0u32; n];
            for s in 0..n {
                let sig = (class[s], self.delta[s].iter().map(|t| t.map(|t| class[t as usize])).collect());
                let len = index.len() as u32;
                next[s] = *index.entry(sig).or_insert(len);
            }
            let new_count = index.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut delta = vec![Vec::new(); count];
        let mut accept = vec![false; count];
        for s in 0..n {
            let c = class[s] as usize;
            accept[c] = self.accept[s];
            delta[c] = self.delta[s].iter().map(|t| t.map(|t| class[t as usize])).collect();
        }
        Dfa { alphabet: self.alphabet.clone(), initial: class[self.initial as usize], accept, delta }
    }

    /// One slice-graph vertex per (symbol, target state) transition.
    pub fn to_slice_graph(&self, meta: AlphabetMeta) -> SliceGraph {
        let letters: Vec<_> = self.alphabet.iter().map(|s| Letter::new(s.clone())).collect();
        let mut g = SliceGraph::new(meta);
        let mut index: BTreeMap<(usize, u32), u32> = BTreeMap::new();
        let mut targets: Vec<Vec<(usize, u32)>> = vec![Vec::new(); self.len()];
        for s in 0..self.len() {
            for (a, t) in self.delta[s].iter().enumerate() {
                if let Some(t) = *t {
                    targets[s].push((a, t));
                    index.entry((a, t)).or_insert_with(|| {
                        let fin = self.accept[t as usize] && self.alphabet[a].is_final();
                        g.add_vertex(letters[a].clone(), false, fin)
                    });
                }
            }
        }
        for (&(_, t), &v) in &index {
            for &(b, u) in &targets[t as usize] {
                g.add_edge(v, index[&(b, u)]);
            }
        }
        for &(a, t) in &targets[self.initial as usize] {
            g.initial[index[&(a, t)] as usize] = true;
        }
        g.trim()
    }
}

/// Explores the saturated language over `alphabet`.
pub fn materialize(view: &mut SaturatedView, alphabet: &[Slice]) -> Result<Dfa> {
    let letters: Vec<_> = alphabet.iter().map(|s| Letter::new(s.clone())).collect();
    // View states are indexed from 1; 0 is the start state.
    let mut ids: HashMap<u32, u32> = HashMap::new();
    let mut order: Vec<u32> = Vec::new();
    let mut delta: Vec<Vec<Option<u32>>> = vec![Vec::new()];
    let mut accept = vec![false];
    let mut queue = std::collections::VecDeque::new();
    let mut local = |v: u32, order: &mut Vec<u32>, delta: &mut Vec<Vec<Option<u32>>>, accept: &mut Vec<bool>,
                     view: &SaturatedView, queue: &mut std::collections::VecDeque<u32>| {
        *ids.entry(v).or_insert_with(|| {
            order.push(v);
            delta.push(Vec::new());
            accept.push(view.accepts(v));
            queue.push_back(v);
            order.len() as u32
        })
    };
    let mut row = Vec::with_capacity(letters.len());
    for l in &letters {
        row.push(match view.start(l)? {
            Some(v) => Some(local(v, &mut order, &mut delta, &mut accept, view, &mut queue)),
            None => None,
        });
    }
    delta[0] = row;
    while let Some(v) = queue.pop_front() {
        let mut row = Vec::with_capacity(letters.len());
        for l in &letters {
            row.push(match view.advance(v, l)? {
                Some(w) => Some(local(w, &mut order, &mut delta, &mut accept, view, &mut queue)),
                None => None,
            });
        }
        let me = local(v, &mut order, &mut delta, &mut accept, view, &mut queue);
        delta[me as usize] = row;
    }
    Ok(Dfa { alphabet: alphabet.to_vec(), initial: 0, accept, delta })
}

/// Compiles `SG(φ, k, z)` over `alphabet` into a minimized slice graph.
pub fn compile(sentence: &Sentence, k: usize, z: usize, c: usize, alphabet: &[Slice]) -> Result<SliceGraph> {
    let mut view = SaturatedView::new(sentence, k, z, c)?;
    let dfa = materialize(&mut view, alphabet)?.minimize();
    Ok(dfa.to_slice_graph(AlphabetMeta { c, q: c }))
}

/// Normalized, weight-free sub-slices of width at most `c` of the slices of
/// `u`: the alphabet an input decomposition can present.
pub fn input_alphabet(u: &UnitDecomposition, c: usize) -> Result<Vec<Slice>> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for s in &u.slices {
        for sub in sub_slices(s, c)? {
            let t = strip(&sub.slice);
            let key = t.canonical_key();
            if seen.insert(key, ()).is_none() {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Every normalized unit slice with frontiers of size at most `c`, over the
/// given labels, with at most `max_loops` self-loops.
pub fn unit_alphabet(c: usize, vlabels: &[Label], elabels: &[Label], max_loops: usize) -> Vec<Slice> {
    let vlabels = if vlabels.is_empty() { vec![default_label()] } else { vlabels.to_vec() };
    let elabels = if elabels.is_empty() { vec![default_label()] } else { elabels.to_vec() };
    let mut shapes: Vec<Slice> = Vec::new();
    for a in 0..=c as u32 {
        for b in 0..=c as u32 {
            // Each in-vertex goes through to an unused out-vertex, or to
            // the center in either direction.
            let mut assign: Vec<Option<u32>> = Vec::new();
            fn rec(a: u32, b: u32, assign: &mut Vec<Option<u32>>, out: &mut Vec<Vec<Option<u32>>>) {
                if assign.len() == a as usize {
                    out.push(assign.clone());
                    return;
                }
                assign.push(None);
                rec(a, b, assign, out);
                assign.pop();
                for o in 1..=b {
                    if !assign.contains(&Some(o)) {
                        assign.push(Some(o));
                        rec(a, b, assign, out);
                        assign.pop();
                    }
                }
            }
            let mut all = Vec::new();
            rec(a, b, &mut assign, &mut all);
            for asg in all {
                let through = asg.iter().filter(|x| x.is_some()).count() as u32;
                let centered = asg.len() as u32 - through + (b - through);
                for center in [false, true] {
                    if !center && centered > 0 {
                        continue;
                    }
                    // Orientation bit per edge, in-vertices first.
                    let edges_n = a + (b - through);
                    for bits in 0u32..1 << edges_n {
                        let mut s = if center { Slice::with_center(default_label()) } else { Slice::empty() };
                        let mut idx = 0;
                        for (j, t) in asg.iter().enumerate() {
                            let i = End::In(j as u32 + 1);
                            let other = match t {
                                Some(o) => End::Out(*o),
                                None => End::Center(0),
                            };
                            let fwd = bits >> idx & 1 == 0;
                            idx += 1;
                            s.edges.push(if fwd { SliceEdge::new(i, other) } else { SliceEdge::new(other, i) });
                        }
                        for o in 1..=b {
                            if asg.contains(&Some(o)) {
                                continue;
                            }
                            let fwd = bits >> idx & 1 == 0;
                            idx += 1;
                            let (oe, ce) = (End::Out(o), End::Center(0));
                            s.edges.push(if fwd { SliceEdge::new(ce, oe) } else { SliceEdge::new(oe, ce) });
                        }
                        shapes.push(s);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for shape in shapes {
        let mut variants = vec![shape];
        if !variants[0].centers.is_empty() {
            variants = vlabels
                .iter()
                .map(|l| {
                    let mut s = variants[0].clone();
                    s.centers[0] = l.clone();
                    s
                })
                .collect();
            let mut with_loops = Vec::new();
            for base in variants {
                let mut multisets: Vec<Vec<usize>> = vec![Vec::new()];
                for _ in 0..max_loops {
                    let mut more = Vec::new();
                    for m in &multisets {
                        let from = m.last().copied().unwrap_or(0);
                        for l in from..elabels.len() {
                            let mut m2 = m.clone();
                            m2.push(l);
                            more.push(m2);
                        }
                    }
                    multisets.extend(more.into_iter().filter(|m| m.len() <= max_loops));
                    multisets.sort();
                    multisets.dedup();
                }
                for m in multisets {
                    let mut s = base.clone();
                    for &l in &m {
                        let mut e = SliceEdge::new(End::Center(0), End::Center(0));
                        e.label = elabels[l].clone();
                        s.edges.push(e);
                    }
                    with_loops.push(s);
                }
            }
            variants = with_loops;
        }
        for v in variants {
            let n = v.edges.len();
            let mut labeled = vec![v.clone()];
            for i in 0..n {
                if v.edges[i].src == v.edges[i].dst {
                    continue;
                }
                labeled = labeled
                    .into_iter()
                    .flat_map(|s| {
                        elabels.iter().map(move |l| {
                            let mut t = s.clone();
                            t.edges[i].label = l.clone();
                            t
                        })
                    })
                    .collect();
            }
            out.extend(labeled);
        }
    }
    let mut seen = HashMap::new();
    out.retain(|s| seen.insert(s.canonical_key(), ()).is_none());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::digraph::Digraph;
    use crate::mso::formula::parse_formula;
    use crate::slice::decompose_along_ordering;

    #[test]
    fn alphabet_sizes() {
        // c = 1: empty, through edge (2), center alone, center with one in
        // (2), one out (2), both (4), center beside a through edge (2).
        assert_eq!(unit_alphabet(1, &[], &[], 0).len(), 1 + 2 + 1 + 2 + 2 + 4 + 2);
        assert!(unit_alphabet(2, &[], &[], 1).iter().all(|s| s.validate().is_ok() && s.is_normalized()));
    }

    #[test]
    fn true_with_one_path_accepts_paths() {
        let s = parse_formula("(true)").unwrap();
        let mut view = SaturatedView::new(&s, 1, 1, 1).unwrap();
        for n in 1..=4 {
            let p = corpus::directed_path(n);
            let u = decompose_along_ordering(&p, &(0..n).collect::<Vec<_>>()).unwrap();
            assert!(view.accepts_word(&u.slices).unwrap());
            let rev: Vec<usize> = (0..n).rev().collect();
            let u = decompose_along_ordering(&p, &rev).unwrap();
            assert!(view.accepts_word(&u.slices).unwrap());
        }
        let two = Digraph::from_edges(4, &[(0, 1), (2, 3)]);
        let u = decompose_along_ordering(&two, &[0, 1, 2, 3]).unwrap();
        assert!(!view.accepts_word(&u.slices).unwrap());
    }

    #[test]
    fn minimization_preserves_language() {
        let s = parse_formula("(connected)").unwrap();
        let alphabet = unit_alphabet(1, &[], &[], 0);
        let mut view = SaturatedView::new(&s, 2, 1, 1).unwrap();
        let dfa = materialize(&mut view, &alphabet).unwrap();
        let min = dfa.minimize();
        assert!(min.len() <= dfa.len());
        let a = alphabet.len();
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..3 {
            words = words.iter().flat_map(|w| (0..a).map(move |x| [w.clone(), vec![x]].concat())).collect();
            for w in &words {
                assert_eq!(dfa.run(w), min.run(w));
            }
        }
    }

    #[test]
    fn compiled_graph_accepts_cycle_decompositions() {
        let s = parse_formula("(hamiltonian-cycle)").unwrap();
        let c3 = corpus::directed_cycle(3);
        let u = decompose_along_ordering(&c3, &[0, 1, 2]).unwrap();
        let alphabet = input_alphabet(&u, 2).unwrap();
        let sg = compile(&s, 2, 2, 2, &alphabet).unwrap();
        assert!(sg.is_deterministic());
        let word: Vec<Slice> = u.slices.iter().map(strip).collect();
        assert!(sg.accepts(&word));
        let p = corpus::directed_path(3);
        let up = decompose_along_ordering(&p, &[0, 1, 2]).unwrap();
        let word: Vec<Slice> = up.slices.iter().map(strip).collect();
        assert!(!sg.accepts(&word));
    }
}
