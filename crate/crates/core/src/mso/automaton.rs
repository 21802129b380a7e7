//! Lazily determinized automata for formulas over slice strings.
//!
//! Every formula node owns a state table. State `0` rejects every
//! continuation and state `1` accepts every continuation in all nodes, which
//! lets negation swap them and lets conjunctions and projections stop early.
//! Transitions are computed on demand and memoized per node on the state,
//! the symbol and the column masks of the node's free variables.

use std::collections::HashMap;

use super::formula::{Formula, Sentence, Var};
use super::frontier::{frontier_step, Frontier, GraphProp};
use super::scanners::{
    path_accepts, path_successors, unitable_accepts, unitable_successors, violation_successors, Track, Violation,
    ViolationStep,
};
use super::symbols::{Column, SymInfo, Symbols};
use crate::digraph::Label;
use crate::error::{Error, Result};
use crate::slice::Slice;

pub type StateId = u32;
pub const DEAD: StateId = 0;
pub const UNIV: StateId = 1;

#[derive(Clone, Debug)]
enum Atom {
    V(Var),
    E(Var),
    Singleton(Var),
    Subset(Var, Var),
    Incidence { edge: Var, vertex: Var, source: bool },
    VLabel(Var, Label),
    ELabel(Var, Label),
}

#[derive(Clone, Copy, Debug)]
enum Scan {
    Path(Var, Var),
    Violation(usize),
    Unitable(usize),
    Graph(GraphProp),
}

/// How graph-property macros are compiled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Macros {
    /// Component-tracking scanners.
    #[default]
    Native,
    /// Their definitions as formulas.
    Expanded,
}

#[derive(Clone, Debug, Default)]
struct Guard {
    vertex_only: bool,
    edge_only: bool,
    singleton: bool,
    within: Vec<Var>,
}

#[derive(Clone, Debug)]
enum Kind {
    Const(bool),
    Atom(Atom),
    And(Vec<usize>),
    Or(Vec<usize>),
    Not(usize),
    Exists { var: Var, body: usize, guard: Guard },
    Scan(Scan),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Reserved(u8),
    Words(Vec<u64>),
    Ids(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Item {
    Track(Track),
    Violation(Violation),
    Tuple(Vec<Track>),
    Frontier(Frontier),
}

#[derive(Default)]
struct Nfa {
    index: HashMap<Item, u32>,
    items: Vec<Item>,
    accept: Vec<bool>,
}

impl Nfa {
    fn intern(&mut self, item: Item) -> u32 {
        if let Some(&id) = self.index.get(&item) {
            return id;
        }
        let acc = match &item {
            Item::Track(t) => path_accepts(t),
            Item::Violation(_) => false,
            Item::Tuple(ts) => unitable_accepts(ts),
            Item::Frontier(f) => f.accepts(),
        };
        let id = self.items.len() as u32;
        self.items.push(item.clone());
        self.accept.push(acc);
        self.index.insert(item, id);
        id
    }
}

struct Node {
    kind: Kind,
    free: Vec<Var>,
    keys: Vec<Key>,
    index: HashMap<Key, StateId>,
    accept: Vec<bool>,
    memo: HashMap<Vec<u64>, StateId>,
    nfa: Nfa,
}

impl Node {
    fn new(kind: Kind, free: Vec<Var>) -> Node {
        let keys = vec![Key::Reserved(0), Key::Reserved(1)];
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i as StateId)).collect();
        Node { kind, free, keys, index, accept: vec![false, true], memo: HashMap::new(), nfa: Nfa::default() }
    }
}

/// Statistics about the explored part of an automaton.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AutomatonStats {
    pub nodes: usize,
    pub states: usize,
    pub transitions: usize,
}

pub struct Automaton {
    nodes: Vec<Node>,
    root: usize,
    symbols: Symbols,
    var_count: usize,
    states: usize,
}

impl Automaton {
    /// Builds the automaton of `sentence`. When all symbols are known to
    /// have frontiers of size at most `max_width`, zig-zag constraints with
    /// `z >= max_width` are replaced by `true`.
    pub fn new(sentence: &Sentence, max_width: Option<usize>) -> Result<Automaton> {
        Automaton::with_macros(sentence, max_width, Macros::Native)
    }

    pub fn with_macros(sentence: &Sentence, max_width: Option<usize>, macros: Macros) -> Result<Automaton> {
        let expanded = match macros {
            Macros::Native => sentence.expand_path_macros(),
            Macros::Expanded => sentence.expand_macros(),
        };
        let mut a = Automaton {
            nodes: Vec::new(),
            root: 0,
            symbols: Symbols::new(),
            var_count: expanded.var_count(),
            states: 0,
        };
        a.root = a.build(&expanded.formula, max_width)?;
        Ok(a)
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn free_vars(&self) -> &[Var] {
        &self.nodes[self.root].free
    }

    pub fn symbol(&mut self, slice: &Slice) -> Result<u32> {
        self.symbols.intern(slice)
    }

    pub fn symbol_info(&self, id: u32) -> &SymInfo {
        self.symbols.get(id)
    }

    pub fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    pub fn stats(&self) -> AutomatonStats {
        AutomatonStats {
            nodes: self.nodes.len(),
            states: self.states,
            transitions: self.nodes.iter().map(|n| n.memo.len()).sum(),
        }
    }

    pub fn initial(&mut self) -> StateId {
        self.initial_of(self.root)
    }

    pub fn accepts(&self, s: StateId) -> bool {
        self.accepts_of(self.root, s)
    }

    fn accepts_of(&self, node: usize, s: StateId) -> bool {
        match self.nodes[node].kind {
            Kind::Not(c) => !self.accepts_of(c, swap(s)),
            _ => self.nodes[node].accept[s as usize],
        }
    }

    /// Transition of a closed formula.
    pub fn step(&mut self, s: StateId, sym: u32) -> StateId {
        let mut env = vec![0u64; self.var_count];
        self.step_node(self.root, s, sym, &mut env)
    }

    /// Transition with the given column masks for the variables; entries for
    /// bound variables are ignored.
    pub fn step_env(&mut self, s: StateId, sym: u32, env: &[u64]) -> StateId {
        let mut env = env.to_vec();
        env.resize(self.var_count, 0);
        self.step_node(self.root, s, sym, &mut env)
    }

    /// Runs the automaton on a string of unit slices.
    pub fn run(&mut self, word: &[Slice]) -> Result<bool> {
        let mut s = self.initial();
        for slice in word {
            let sym = self.symbol(slice)?;
            s = self.step(s, sym);
        }
        Ok(self.accepts(s))
    }

    fn add(&mut self, kind: Kind, free: Vec<Var>) -> usize {
        self.nodes.push(Node::new(kind, free));
        self.nodes.len() - 1
    }

    fn build(&mut self, f: &Formula, max_width: Option<usize>) -> Result<usize> {
        let free = f.free_vars();
        let kind = match f {
            Formula::True => Kind::Const(true),
            Formula::False => Kind::Const(false),
            Formula::V(x) => Kind::Atom(Atom::V(*x)),
            Formula::E(x) => Kind::Atom(Atom::E(*x)),
            Formula::Singleton(x) => Kind::Atom(Atom::Singleton(*x)),
            Formula::Subset(x, y) => Kind::Atom(Atom::Subset(*x, *y)),
            Formula::Src(e, v) => Kind::Atom(Atom::Incidence { edge: *e, vertex: *v, source: true }),
            Formula::Tgt(e, v) => Kind::Atom(Atom::Incidence { edge: *e, vertex: *v, source: false }),
            Formula::VLabel(x, a) => Kind::Atom(Atom::VLabel(*x, a.clone())),
            Formula::ELabel(x, b) => Kind::Atom(Atom::ELabel(*x, b.clone())),
            Formula::And(fs) => {
                let ch = fs.iter().map(|g| self.build(g, max_width)).collect::<Result<Vec<_>>>()?;
                Kind::And(ch)
            }
            Formula::Or(fs) => {
                let ch = fs.iter().map(|g| self.build(g, max_width)).collect::<Result<Vec<_>>>()?;
                Kind::Or(ch)
            }
            Formula::Not(g) => Kind::Not(self.build(g, max_width)?),
            Formula::Exists(v, g) => {
                let body = self.build(g, max_width)?;
                Kind::Exists { var: *v, body, guard: guard_of(*v, g) }
            }
            Formula::Path(x, y) => Kind::Scan(Scan::Path(*x, *y)),
            Formula::ZigZag(z) => {
                if max_width.is_some_and(|c| *z >= c) {
                    Kind::Const(true)
                } else {
                    let v = self.add(Kind::Scan(Scan::Violation(*z)), Vec::new());
                    Kind::Not(v)
                }
            }
            Formula::Unitable(k) => Kind::Scan(Scan::Unitable(*k)),
            Formula::Connected => Kind::Scan(Scan::Graph(GraphProp::Connected)),
            Formula::Forest => Kind::Scan(Scan::Graph(GraphProp::Forest)),
            Formula::Bipartite => Kind::Scan(Scan::Graph(GraphProp::Bipartite)),
            Formula::HamiltonianCycle => Kind::Scan(Scan::Graph(GraphProp::HamiltonianCycle)),
            other => {
                return Err(Error::InvalidQuery(format!("macro {other:?} was not expanded")));
            }
        };
        Ok(self.add(kind, free))
    }

    fn intern(&mut self, node: usize, key: Key) -> StateId {
        let n = &self.nodes[node];
        if let Some(&id) = n.index.get(&key) {
            return id;
        }
        let acc = self.key_accepts(node, &key);
        let n = &mut self.nodes[node];
        let id = n.keys.len() as StateId;
        n.keys.push(key.clone());
        n.accept.push(acc);
        n.index.insert(key, id);
        self.states += 1;
        id
    }

    fn key_accepts(&self, node: usize, key: &Key) -> bool {
        let n = &self.nodes[node];
        match (&n.kind, key) {
            (_, Key::Reserved(r)) => *r == 1,
            (Kind::Atom(atom), Key::Words(w)) => atom_accepts(atom, w),
            (Kind::And(ch), Key::Ids(ids)) => ch.iter().zip(ids).all(|(&c, &s)| self.accepts_of(c, s)),
            (Kind::Or(ch), Key::Ids(ids)) => ch.iter().zip(ids).any(|(&c, &s)| self.accepts_of(c, s)),
            (Kind::Exists { body, .. }, Key::Ids(ids)) => ids.iter().any(|&s| self.accepts_of(*body, s)),
            (Kind::Scan(_), Key::Ids(ids)) => ids.iter().any(|&i| n.nfa.accept[i as usize]),
            _ => unreachable!("key does not match node kind"),
        }
    }

    fn initial_of(&mut self, node: usize) -> StateId {
        let kind = self.nodes[node].kind.clone();
        match kind {
            Kind::Const(b) => StateId::from(b),
            Kind::Atom(atom) => {
                let w = match atom {
                    Atom::Singleton(_) => vec![0],
                    Atom::Incidence { .. } => vec![0, 0, 0, 0],
                    _ => vec![],
                };
                self.intern(node, Key::Words(w))
            }
            Kind::And(ch) | Kind::Or(ch) => {
                let ids: Vec<StateId> = ch.iter().map(|&c| self.initial_of(c)).collect();
                self.combine(node, ids)
            }
            Kind::Not(c) => swap(self.initial_of(c)),
            Kind::Exists { body, .. } => {
                let s = self.initial_of(body);
                self.set_state(node, vec![s])
            }
            Kind::Scan(scan) => {
                let item = match scan {
                    Scan::Path(..) => Item::Track(Track::start()),
                    Scan::Violation(_) => Item::Violation(Violation { track: Track::start(), flagged: false }),
                    Scan::Unitable(k) => Item::Tuple(vec![Track::start(); k]),
                    Scan::Graph(_) => Item::Frontier(Frontier::default()),
                };
                let id = self.nodes[node].nfa.intern(item);
                self.intern(node, Key::Ids(vec![id]))
            }
        }
    }

    fn combine(&mut self, node: usize, ids: Vec<StateId>) -> StateId {
        let is_and = matches!(self.nodes[node].kind, Kind::And(_));
        let (absorbing, neutral) = if is_and { (DEAD, UNIV) } else { (UNIV, DEAD) };
        if ids.contains(&absorbing) {
            return absorbing;
        }
        if ids.iter().all(|&s| s == neutral) {
            return neutral;
        }
        self.intern(node, Key::Ids(ids))
    }

    fn set_state(&mut self, node: usize, mut ids: Vec<StateId>) -> StateId {
        if ids.contains(&UNIV) {
            return UNIV;
        }
        ids.retain(|&s| s != DEAD);
        if ids.is_empty() {
            return DEAD;
        }
        ids.sort_unstable();
        ids.dedup();
        self.intern(node, Key::Ids(ids))
    }

    fn step_node(&mut self, node: usize, s: StateId, sym: u32, env: &mut [u64]) -> StateId {
        if s == DEAD || s == UNIV {
            return s;
        }
        let n = &self.nodes[node];
        let mut memo_key = Vec::with_capacity(2 + n.free.len());
        memo_key.push(u64::from(s));
        memo_key.push(u64::from(sym));
        memo_key.extend(n.free.iter().map(|&v| env[v as usize]));
        if let Some(&t) = n.memo.get(&memo_key) {
            return t;
        }
        let t = self.compute(node, s, sym, env);
        self.nodes[node].memo.insert(memo_key, t);
        t
    }

    fn compute(&mut self, node: usize, s: StateId, sym: u32, env: &mut [u64]) -> StateId {
        let kind = self.nodes[node].kind.clone();
        if let Kind::Not(c) = kind {
            return swap(self.step_node(c, swap(s), sym, env));
        }
        let key = self.nodes[node].keys[s as usize].clone();
        let info = self.symbols.get(sym).clone();
        match (kind, key) {
            (Kind::Atom(atom), Key::Words(w)) => match atom_step(&atom, &w, &info, env) {
                Some(w) => self.intern(node, Key::Words(w)),
                None => DEAD,
            },
            (Kind::And(ch), Key::Ids(ids)) | (Kind::Or(ch), Key::Ids(ids)) => {
                let is_and = matches!(self.nodes[node].kind, Kind::And(_));
                let mut next = Vec::with_capacity(ids.len());
                for (&c, &cs) in ch.iter().zip(&ids) {
                    let t = self.step_node(c, cs, sym, env);
                    if (is_and && t == DEAD) || (!is_and && t == UNIV) {
                        return t;
                    }
                    next.push(t);
                }
                self.combine(node, next)
            }
            (Kind::Exists { var, body, guard }, Key::Ids(ids)) => {
                let masks = guard_masks(&guard, &info, env);
                let saved = env[var as usize];
                let mut next = Vec::new();
                'outer: for &bs in &ids {
                    for &m in &masks {
                        env[var as usize] = m;
                        let t = self.step_node(body, bs, sym, env);
                        if t == UNIV {
                            next.clear();
                            next.push(UNIV);
                            break 'outer;
                        }
                        if t != DEAD {
                            next.push(t);
                        }
                    }
                }
                env[var as usize] = saved;
                self.set_state(node, next)
            }
            (Kind::Scan(scan), Key::Ids(ids)) => {
                let mut next: Vec<u32> = Vec::new();
                for &i in &ids {
                    let item = self.nodes[node].nfa.items[i as usize].clone();
                    let succ: Vec<Item> = match (scan, item) {
                        (Scan::Path(x, y), Item::Track(t)) => {
                            path_successors(&t, &info, env[x as usize], env[y as usize])
                                .into_iter()
                                .map(Item::Track)
                                .collect()
                        }
                        (Scan::Violation(z), Item::Violation(v)) => match violation_successors(&v, &info, z) {
                            ViolationStep::Certain => return UNIV,
                            ViolationStep::Next(vs) => vs.into_iter().map(Item::Violation).collect(),
                        },
                        (Scan::Unitable(_), Item::Tuple(ts)) => {
                            unitable_successors(&ts, &info).into_iter().map(Item::Tuple).collect()
                        }
                        (Scan::Graph(prop), Item::Frontier(f)) => {
                            frontier_step(prop, &f, &info).into_iter().map(Item::Frontier).collect()
                        }
                        _ => unreachable!("scanner item mismatch"),
                    };
                    let nfa = &mut self.nodes[node].nfa;
                    next.extend(succ.into_iter().map(|it| nfa.intern(it)));
                }
                next.sort_unstable();
                next.dedup();
                if next.is_empty() {
                    DEAD
                } else {
                    self.intern(node, Key::Ids(next))
                }
            }
            (Kind::Const(_), _) => unreachable!("constants only use reserved states"),
            _ => unreachable!("key does not match node kind"),
        }
    }
}

fn swap(s: StateId) -> StateId {
    match s {
        DEAD => UNIV,
        UNIV => DEAD,
        other => other,
    }
}

fn guard_of(var: Var, body: &Formula) -> Guard {
    let mut g = Guard::default();
    let conjuncts: Vec<&Formula> = match body {
        Formula::And(fs) => fs.iter().collect(),
        other => vec![other],
    };
    for c in conjuncts {
        match c {
            Formula::V(x) | Formula::VLabel(x, _) if *x == var => g.vertex_only = true,
            Formula::E(x) | Formula::ELabel(x, _) if *x == var => g.edge_only = true,
            Formula::Singleton(x) if *x == var => g.singleton = true,
            Formula::Subset(x, y) if *x == var && *y != var => g.within.push(*y),
            Formula::Src(e, v) | Formula::Tgt(e, v) => {
                if *e == var {
                    g.edge_only = true;
                    g.singleton = true;
                }
                if *v == var {
                    g.vertex_only = true;
                    g.singleton = true;
                }
            }
            Formula::Path(x, y) => {
                if *x == var {
                    g.vertex_only = true;
                }
                if *y == var {
                    g.edge_only = true;
                }
            }
            _ => {}
        }
    }
    g
}

fn guard_masks(g: &Guard, info: &SymInfo, env: &[u64]) -> Vec<u64> {
    let mut allowed = info.all_mask();
    if g.vertex_only {
        allowed &= info.vertex_mask;
    }
    if g.edge_only {
        allowed &= info.edge_mask;
    }
    for &y in &g.within {
        allowed &= env[y as usize];
    }
    let mut out = vec![0];
    if g.singleton {
        let mut rest = allowed;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            out.push(bit);
            rest &= rest - 1;
        }
    } else {
        let mut sub = allowed;
        while sub != 0 {
            out.push(sub);
            sub = (sub - 1) & allowed;
        }
    }
    out
}

fn atom_accepts(atom: &Atom, w: &[u64]) -> bool {
    match atom {
        Atom::Singleton(_) => w[0] == 1,
        Atom::Incidence { .. } => w[0] == 1 && w[1] == 1 && w[2] == 1,
        _ => true,
    }
}

fn atom_step(atom: &Atom, w: &[u64], info: &SymInfo, env: &[u64]) -> Option<Vec<u64>> {
    let m = |v: &Var| env[*v as usize];
    match atom {
        Atom::V(x) => (m(x) & info.edge_mask == 0).then(|| w.to_vec()),
        Atom::E(x) => (m(x) & info.vertex_mask == 0).then(|| w.to_vec()),
        Atom::Singleton(x) => {
            let c = w[0] + u64::from(m(x).count_ones());
            (c <= 1).then(|| vec![c])
        }
        Atom::Subset(x, y) => (m(x) & !m(y) == 0).then(|| w.to_vec()),
        Atom::VLabel(x, a) => {
            let mx = m(x);
            let ok = mx & info.edge_mask == 0 && (mx & info.vertex_mask == 0 || info.col_labels[0] == *a);
            ok.then(|| w.to_vec())
        }
        Atom::ELabel(x, b) => {
            let mx = m(x);
            if mx & info.vertex_mask != 0 {
                return None;
            }
            let ok = (0..info.columns.len()).filter(|&i| mx >> i & 1 == 1).all(|i| info.col_labels[i] == *b);
            ok.then(|| w.to_vec())
        }
        Atom::Incidence { edge, vertex, source } => {
            let (mx, my) = (m(edge), m(vertex));
            if mx & info.vertex_mask != 0 || my & info.edge_mask != 0 {
                return None;
            }
            let xc = w[0] + u64::from(mx.count_ones());
            let yc = w[1] + u64::from(my.count_ones());
            if xc > 1 || yc > 1 {
                return None;
            }
            let ycenter = my & info.vertex_mask != 0;
            let pending = w[3];
            let mut matched = w[2];
            if mx != 0 {
                let col = mx.trailing_zeros() as usize;
                let ok = match info.columns[col] {
                    Column::Loop => ycenter,
                    Column::InEdge { num, forward } => {
                        if *source == forward {
                            pending >> (num - 1) & 1 == 1
                        } else {
                            ycenter
                        }
                    }
                    Column::Center => false,
                };
                if !ok {
                    return None;
                }
                matched = 1;
            }
            let mut next = 0u64;
            if xc == 0 && yc == 1 {
                for (o, seg) in info.outs.iter().enumerate() {
                    let bit = match seg {
                        super::symbols::OutSeg::FromCenter { .. } => ycenter,
                        super::symbols::OutSeg::Through { from } => pending >> (from - 1) & 1 == 1,
                    };
                    if bit {
                        next |= 1 << o;
                    }
                }
            }
            Some(vec![xc, yc, matched, next])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::digraph::Digraph;
    use crate::mso::formula::parse_formula;
    use crate::oracle::model_check;
    use crate::slice::decompose_along_ordering;

    fn accepts(a: &mut Automaton, g: &Digraph, order: &[usize]) -> bool {
        let u = decompose_along_ordering(g, order).unwrap();
        a.run(&u.slices).unwrap()
    }

    fn agree_on_all(text: &str, n: usize) {
        let s = parse_formula(text).unwrap();
        let mut a = Automaton::new(&s, None).unwrap();
        for g in corpus::all_simple_digraphs(n) {
            let order: Vec<usize> = (0..n).collect();
            assert_eq!(accepts(&mut a, &g, &order), model_check(&g, &s).unwrap(), "{text} on {:?}", g.edges());
        }
    }

    #[test]
    fn atoms_agree_with_oracle() {
        for text in [
            "(true)",
            "(not (exists X (and (singleton X) (E X))))",
            "(exists X (and (singleton X) (V X)))",
            "(exists e (exists v (and (src e v) (not (exists f (and (E f) (singleton f) (tgt f v)))))))",
            "(exists e (exists f (and (singleton e) (singleton f) (not (subset e f))
               (exists v (and (tgt e v) (src f v))))))",
            "(exists X (and (E X) (exists e (and (singleton e) (subset e X))) (path-edges X)))",
            "(exists X (and (V X) (exists Y (and (singleton Y) (V Y) (not (subset Y X)))) (path-vertices X)))",
        ] {
            agree_on_all(text, 3);
        }
    }

    #[test]
    fn macros_agree_with_oracle() {
        for text in ["(connected)", "(forest)", "(bipartite)", "(hamiltonian-cycle)", "(unitable 1)", "(unitable 2)"] {
            agree_on_all(text, 3);
        }
    }

    #[test]
    fn native_macros_match_definitions() {
        let mut rng = corpus::rng(5);
        let mut graphs: Vec<Digraph> = corpus::all_simple_digraphs(3).collect();
        graphs.push(Digraph::from_edges(2, &[(0, 1), (0, 1)]));
        graphs.push(Digraph::from_edges(2, &[(0, 0), (0, 1), (1, 0)]));
        graphs.push(Digraph::from_edges(4, &[(0, 1), (2, 3)]));
        graphs.push(Digraph::from_edges(4, &[(0, 2), (2, 1), (1, 3), (3, 0)]));
        graphs.extend((0..40).map(|_| corpus::random_digraph(&mut rng, 5, 0.3)));
        for text in ["(connected)", "(forest)", "(bipartite)", "(hamiltonian-cycle)"] {
            let s = parse_formula(text).unwrap();
            let mut native = Automaton::with_macros(&s, None, Macros::Native).unwrap();
            for g in &graphs {
                let order: Vec<usize> = (0..g.n()).collect();
                let want = model_check(g, &s).unwrap();
                assert_eq!(accepts(&mut native, g, &order), want, "{text} on {:?}", g.edges());
                if g.n() <= 3 {
                    let mut expanded = Automaton::with_macros(&s, None, Macros::Expanded).unwrap();
                    assert_eq!(accepts(&mut expanded, g, &order), want, "{text} on {:?}", g.edges());
                }
            }
        }
    }

    #[test]
    fn unitable_scanner_matches_definition() {
        let direct = parse_formula("(unitable 1)").unwrap();
        let defined = crate::mso::formula::unitable_formula(1);
        let mut a = Automaton::new(&direct, None).unwrap();
        let mut b = Automaton::new(&defined, None).unwrap();
        for g in corpus::all_simple_digraphs(3) {
            let order = [0, 1, 2];
            assert_eq!(accepts(&mut a, &g, &order), accepts(&mut b, &g, &order));
        }
    }

    #[test]
    fn zigzag_of_figure_graph() {
        let g = Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (3, 1)]);
        let order = [0, 1, 2, 3];
        let mut z2 = Automaton::new(&parse_formula("(zigzag 2)").unwrap(), None).unwrap();
        let mut z3 = Automaton::new(&parse_formula("(zigzag 3)").unwrap(), None).unwrap();
        assert!(!accepts(&mut z2, &g, &order));
        assert!(accepts(&mut z3, &g, &order));
        let dag = Digraph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]);
        let mut z1 = Automaton::new(&parse_formula("(zigzag 1)").unwrap(), None).unwrap();
        assert!(accepts(&mut z1, &dag, &order));
    }

    #[test]
    fn negation_is_complement() {
        let s = parse_formula("(connected)").unwrap();
        let ns = parse_formula("(not (connected))").unwrap();
        let mut a = Automaton::new(&s, None).unwrap();
        let mut b = Automaton::new(&ns, None).unwrap();
        for g in corpus::all_simple_digraphs(3) {
            let order = [2, 0, 1];
            assert_ne!(accepts(&mut a, &g, &order), accepts(&mut b, &g, &order));
        }
    }
}
