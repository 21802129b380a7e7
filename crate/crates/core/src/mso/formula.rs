//! Formula syntax: an s-expression language over set variables.
//!
//! ```text
//! (exists X body)  (forall X body)  (and ...)  (or ...)  (not f)  (implies f g)
//! (V X) (E X) (singleton X) (subset X Y) (src X Y) (tgt X Y)
//! (vlabel X a) (elabel X b) (true) (false)
//! (path X Y) (path-vertices X) (path-edges Y) (zigzag z) (unitable k)
//! (hamiltonian-cycle) (connected) (forest) (bipartite)
//! ```
//!
//! `;` starts a comment that runs to the end of the line.

use std::fmt;
use std::sync::Arc;

use crate::digraph::Label;
use crate::error::{Error, Result};

pub type Var = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    V(Var),
    E(Var),
    Singleton(Var),
    Subset(Var, Var),
    /// `Src(e, v)`: `e` is a single edge whose source is the single vertex `v`.
    Src(Var, Var),
    Tgt(Var, Var),
    VLabel(Var, Label),
    ELabel(Var, Label),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Exists(Var, Box<Formula>),
    /// `X` and `Y` are the vertices and edges of one directed simple path.
    Path(Var, Var),
    PathVertices(Var),
    PathEdges(Var),
    ZigZag(usize),
    Unitable(usize),
    HamiltonianCycle,
    Connected,
    Forest,
    Bipartite,
}

/// A formula together with the names of its variables, indexed by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub formula: Formula,
    pub names: Vec<String>,
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn exists(v: Var, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    /// Free variables in ascending order.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        let mut use_var = |v: Var, bound: &Vec<Var>| {
            if !bound.contains(&v) {
                out.push(v);
            }
        };
        match self {
            Formula::V(x)
            | Formula::E(x)
            | Formula::Singleton(x)
            | Formula::VLabel(x, _)
            | Formula::ELabel(x, _)
            | Formula::PathVertices(x)
            | Formula::PathEdges(x) => use_var(*x, bound),
            Formula::Subset(x, y) | Formula::Src(x, y) | Formula::Tgt(x, y) | Formula::Path(x, y) => {
                use_var(*x, bound);
                use_var(*y, bound);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::Exists(v, f) => {
                bound.push(*v);
                f.collect_free(bound, out);
                bound.pop();
            }
            _ => {}
        }
    }

    /// True if the formula mentions a macro other than the direct
    /// path-based scanners.
    pub fn has_graph_macros(&self) -> bool {
        match self {
            Formula::HamiltonianCycle | Formula::Connected | Formula::Forest | Formula::Bipartite => true,
            Formula::PathVertices(_) | Formula::PathEdges(_) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_graph_macros),
            Formula::Not(f) | Formula::Exists(_, f) => f.has_graph_macros(),
            _ => false,
        }
    }
}

pub const CONNECTED: &str = "
(not (exists X (and (V X)
  (exists u (and (singleton u) (subset u X)))
  (exists w (and (singleton w) (V w) (not (subset w X))))
  (not (exists e (and (singleton e) (E e)
    (exists a (and (singleton a) (subset a X)
      (exists b (and (singleton b) (V b) (not (subset b X))
        (or (and (src e a) (tgt e b)) (and (src e b) (tgt e a)))))))))))))
";

/// No nonempty edge set in which every touched vertex has degree at least
/// two (a self-loop counts twice): the disorientation has no cycle.
pub const FOREST: &str = "
(not (exists Y (and (E Y)
  (exists f (and (singleton f) (subset f Y)))
  (not (exists v (and (singleton v) (V v)
    (exists e (and (singleton e) (subset e Y) (or (src e v) (tgt e v))
      (not (and (src e v) (tgt e v)))
      (not (exists g (and (singleton g) (subset g Y) (not (subset g e))
        (or (src g v) (tgt g v)))))))))))))
";

pub const BIPARTITE: &str = "
(exists X (and (V X)
  (not (exists e (and (singleton e) (E e)
    (exists a (and (singleton a) (V a)
      (exists b (and (singleton b) (V b) (src e a) (tgt e b)
        (or (and (subset a X) (subset b X))
            (and (not (subset a X)) (not (subset b X)))))))))))))
";

/// Connected, and every vertex has exactly one incoming and one outgoing
/// edge: a single directed cycle through all vertices.
pub const HAMILTONIAN_CYCLE: &str = "
(and (connected)
  (not (exists v (and (singleton v) (V v)
    (not (exists e (and (singleton e) (E e) (tgt e v)))))))
  (not (exists v (and (singleton v) (V v)
    (not (exists e (and (singleton e) (E e) (src e v)))))))
  (not (exists v (and (singleton v) (V v)
    (exists e (and (singleton e) (E e) (tgt e v)
      (exists f (and (singleton f) (E f) (tgt f v) (not (subset f e)))))))))
  (not (exists v (and (singleton v) (V v)
    (exists e (and (singleton e) (E e) (src e v)
      (exists f (and (singleton f) (E f) (src f v) (not (subset f e))))))))))
";

/// The displayed definition of "union of `k` paths" in terms of `path`.
pub fn unitable_text(k: usize) -> String {
    let mut body = String::from("(and");
    for i in 1..=k {
        body.push_str(&format!(" (path X{i} Y{i})"));
    }
    let xs: Vec<String> = (1..=k).map(|i| format!("(subset u X{i})")).collect();
    let ys: Vec<String> = (1..=k).map(|i| format!("(subset e Y{i})")).collect();
    body.push_str(&format!(
        " (not (exists u (and (singleton u) (V u) (not (or {})))))",
        xs.join(" ")
    ));
    body.push_str(&format!(
        " (not (exists e (and (singleton e) (E e) (not (or {})))))",
        ys.join(" ")
    ));
    body.push(')');
    let mut text = body;
    for i in (1..=k).rev() {
        text = format!("(exists X{i} (exists Y{i} {text}))");
    }
    text
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

fn tokenize(text: &str) -> Result<Vec<(String, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c == ';' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c.is_whitespace() {
            chars.next();
        } else if c == '(' || c == ')' {
            out.push((c.to_string(), i));
            chars.next();
        } else {
            let mut tok = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                    break;
                }
                tok.push(c);
                chars.next();
            }
            out.push((tok, i));
        }
    }
    Ok(out)
}

fn read_sexp(tokens: &[(String, usize)], at: &mut usize, end: usize) -> Result<Sexp> {
    let (tok, pos) = tokens.get(*at).ok_or(Error::Syntax { position: end, message: "unexpected end of input".into() })?;
    *at += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*at) {
                    None => return Err(Error::Syntax { position: end, message: "unclosed `(`".into() }),
                    Some((t, _)) if t == ")" => {
                        *at += 1;
                        return Ok(Sexp::List(items, *pos));
                    }
                    _ => items.push(read_sexp(tokens, at, end)?),
                }
            }
        }
        ")" => Err(Error::Syntax { position: *pos, message: "unexpected `)`".into() }),
        _ => Ok(Sexp::Atom(tok.clone(), *pos)),
    }
}

struct Parser<'a> {
    names: &'a mut Vec<String>,
    scope: Vec<(String, Var)>,
}

impl Parser<'_> {
    fn var(&self, s: &Sexp) -> Result<Var> {
        match s {
            Sexp::Atom(name, pos) => self
                .scope
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|&(_, v)| v)
                .ok_or_else(|| {
                    if name.chars().next().is_some_and(|c| c.is_alphabetic()) {
                        Error::UnboundVariable(name.clone())
                    } else {
                        Error::Syntax { position: *pos, message: format!("`{name}` is not a variable") }
                    }
                }),
            Sexp::List(_, pos) => Err(Error::Syntax { position: *pos, message: "expected a variable".into() }),
        }
    }

    fn number(&self, s: &Sexp) -> Result<usize> {
        match s {
            Sexp::Atom(t, pos) => {
                t.parse().map_err(|_| Error::Syntax { position: *pos, message: format!("expected a number, got `{t}`") })
            }
            Sexp::List(_, pos) => Err(Error::Syntax { position: *pos, message: "expected a number".into() }),
        }
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula> {
        let (items, pos) = match s {
            Sexp::List(items, pos) => (items, *pos),
            Sexp::Atom(t, pos) => {
                return Err(Error::Syntax { position: *pos, message: format!("expected a formula, got `{t}`") })
            }
        };
        let head = match items.first() {
            Some(Sexp::Atom(h, _)) => h.as_str(),
            _ => return Err(Error::Syntax { position: pos, message: "expected an operator".into() }),
        };
        let args = &items[1..];
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Syntax { position: pos, message: format!("`{head}` takes {n} argument(s)") })
            }
        };
        let label = |s: &Sexp| -> Result<Label> {
            match s {
                Sexp::Atom(t, _) => Ok(Arc::from(t.as_str())),
                Sexp::List(_, p) => Err(Error::Syntax { position: *p, message: "expected a label".into() }),
            }
        };
        Ok(match head {
            "true" => {
                arity(0)?;
                Formula::True
            }
            "false" => {
                arity(0)?;
                Formula::False
            }
            "exists" | "forall" => {
                arity(2)?;
                let name = match &args[0] {
                    Sexp::Atom(n, _) => n.clone(),
                    Sexp::List(_, p) => {
                        return Err(Error::Syntax { position: *p, message: "expected a variable name".into() })
                    }
                };
                let id = self.names.len() as Var;
                self.names.push(name.clone());
                self.scope.push((name, id));
                let body = self.formula(&args[1]);
                self.scope.pop();
                let body = body?;
                if head == "exists" {
                    Formula::exists(id, body)
                } else {
                    Formula::not(Formula::exists(id, Formula::not(body)))
                }
            }
            "and" | "or" => {
                let fs = args.iter().map(|a| self.formula(a)).collect::<Result<Vec<_>>>()?;
                if head == "and" {
                    Formula::And(fs)
                } else {
                    Formula::Or(fs)
                }
            }
            "not" => {
                arity(1)?;
                Formula::not(self.formula(&args[0])?)
            }
            "implies" => {
                arity(2)?;
                Formula::Or(vec![Formula::not(self.formula(&args[0])?), self.formula(&args[1])?])
            }
            "V" => {
                arity(1)?;
                Formula::V(self.var(&args[0])?)
            }
            "E" => {
                arity(1)?;
                Formula::E(self.var(&args[0])?)
            }
            "singleton" => {
                arity(1)?;
                Formula::Singleton(self.var(&args[0])?)
            }
            "subset" => {
                arity(2)?;
                Formula::Subset(self.var(&args[0])?, self.var(&args[1])?)
            }
            "src" => {
                arity(2)?;
                Formula::Src(self.var(&args[0])?, self.var(&args[1])?)
            }
            "tgt" => {
                arity(2)?;
                Formula::Tgt(self.var(&args[0])?, self.var(&args[1])?)
            }
            "vlabel" => {
                arity(2)?;
                Formula::VLabel(self.var(&args[0])?, label(&args[1])?)
            }
            "elabel" => {
                arity(2)?;
                Formula::ELabel(self.var(&args[0])?, label(&args[1])?)
            }
            "path" => {
                arity(2)?;
                Formula::Path(self.var(&args[0])?, self.var(&args[1])?)
            }
            "path-vertices" => {
                arity(1)?;
                Formula::PathVertices(self.var(&args[0])?)
            }
            "path-edges" => {
                arity(1)?;
                Formula::PathEdges(self.var(&args[0])?)
            }
            "zigzag" => {
                arity(1)?;
                Formula::ZigZag(self.number(&args[0])?)
            }
            "unitable" => {
                arity(1)?;
                Formula::Unitable(self.number(&args[0])?)
            }
            "hamiltonian-cycle" => {
                arity(0)?;
                Formula::HamiltonianCycle
            }
            "connected" => {
                arity(0)?;
                Formula::Connected
            }
            "forest" => {
                arity(0)?;
                Formula::Forest
            }
            "bipartite" => {
                arity(0)?;
                Formula::Bipartite
            }
            other => return Err(Error::Syntax { position: pos, message: format!("unknown operator `{other}`") }),
        })
    }
}

fn parse_into(text: &str, names: &mut Vec<String>, free: &[(String, Var)]) -> Result<Formula> {
    let tokens = tokenize(text)?;
    let mut at = 0;
    let sexp = read_sexp(&tokens, &mut at, text.len())?;
    if let Some((_, pos)) = tokens.get(at) {
        return Err(Error::Syntax { position: *pos, message: "trailing input after formula".into() });
    }
    let mut p = Parser { names, scope: free.to_vec() };
    p.formula(&sexp)
}

/// Parses a closed formula. Bound variables receive distinct ids.
pub fn parse_formula(text: &str) -> Result<Sentence> {
    parse_with_free(text, &[])
}

/// Parses a formula whose free variables are `free`, which receive ids
/// `0..free.len()`.
pub fn parse_with_free(text: &str, free: &[&str]) -> Result<Sentence> {
    let mut names: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    let scope: Vec<(String, Var)> = free.iter().enumerate().map(|(i, s)| (s.to_string(), i as Var)).collect();
    let formula = parse_into(text, &mut names, &scope)?;
    Ok(Sentence { formula, names })
}

impl Sentence {
    /// Replaces graph-property macros by their definitions. The path,
    /// zig-zag and unitable primitives are kept.
    pub fn expand_macros(&self) -> Sentence {
        let mut names = self.names.clone();
        let formula = expand(&self.formula, &mut names, true);
        Sentence { formula, names }
    }

    /// Expands only `path-vertices` and `path-edges`.
    pub fn expand_path_macros(&self) -> Sentence {
        let mut names = self.names.clone();
        let formula = expand(&self.formula, &mut names, false);
        Sentence { formula, names }
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }
}

fn macro_body(text: &str, names: &mut Vec<String>) -> Formula {
    let f = parse_into(text, names, &[]).expect("bundled macro text parses");
    expand(&f, names, true)
}

fn expand(f: &Formula, names: &mut Vec<String>, graph: bool) -> Formula {
    match f {
        Formula::Connected | Formula::Forest | Formula::Bipartite | Formula::HamiltonianCycle if !graph => f.clone(),
        Formula::Connected => macro_body(CONNECTED, names),
        Formula::Forest => macro_body(FOREST, names),
        Formula::Bipartite => macro_body(BIPARTITE, names),
        Formula::HamiltonianCycle => macro_body(HAMILTONIAN_CYCLE, names),
        Formula::PathVertices(x) => {
            let y = names.len() as Var;
            names.push("_pe".into());
            Formula::exists(y, Formula::Path(*x, y))
        }
        Formula::PathEdges(y) => {
            let x = names.len() as Var;
            names.push("_pv".into());
            Formula::exists(x, Formula::Path(x, *y))
        }
        Formula::And(fs) => Formula::And(fs.iter().map(|g| expand(g, names, graph)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| expand(g, names, graph)).collect()),
        Formula::Not(g) => Formula::not(expand(g, names, graph)),
        Formula::Exists(v, g) => Formula::exists(*v, expand(g, names, graph)),
        other => other.clone(),
    }
}

/// Expands `(unitable k)` into its definition in terms of `path`.
pub fn unitable_formula(k: usize) -> Sentence {
    parse_formula(&unitable_text(k)).expect("generated text parses")
}

struct Show<'a>(&'a Formula, &'a [String]);

impl fmt::Display for Show<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |v: &Var| self.1.get(*v as usize).cloned().unwrap_or_else(|| format!("_{v}"));
        match self.0 {
            Formula::True => write!(out, "(true)"),
            Formula::False => write!(out, "(false)"),
            Formula::V(x) => write!(out, "(V {})", n(x)),
            Formula::E(x) => write!(out, "(E {})", n(x)),
            Formula::Singleton(x) => write!(out, "(singleton {})", n(x)),
            Formula::Subset(x, y) => write!(out, "(subset {} {})", n(x), n(y)),
            Formula::Src(x, y) => write!(out, "(src {} {})", n(x), n(y)),
            Formula::Tgt(x, y) => write!(out, "(tgt {} {})", n(x), n(y)),
            Formula::VLabel(x, a) => write!(out, "(vlabel {} {a})", n(x)),
            Formula::ELabel(x, b) => write!(out, "(elabel {} {b})", n(x)),
            Formula::And(fs) | Formula::Or(fs) => {
                write!(out, "({}", if matches!(self.0, Formula::And(_)) { "and" } else { "or" })?;
                for f in fs {
                    write!(out, " {}", Show(f, self.1))?;
                }
                write!(out, ")")
            }
            Formula::Not(f) => write!(out, "(not {})", Show(f, self.1)),
            Formula::Exists(v, f) => write!(out, "(exists {} {})", n(v), Show(f, self.1)),
            Formula::Path(x, y) => write!(out, "(path {} {})", n(x), n(y)),
            Formula::PathVertices(x) => write!(out, "(path-vertices {})", n(x)),
            Formula::PathEdges(y) => write!(out, "(path-edges {})", n(y)),
            Formula::ZigZag(z) => write!(out, "(zigzag {z})"),
            Formula::Unitable(k) => write!(out, "(unitable {k})"),
            Formula::HamiltonianCycle => write!(out, "(hamiltonian-cycle)"),
            Formula::Connected => write!(out, "(connected)"),
            Formula::Forest => write!(out, "(forest)"),
            Formula::Bipartite => write!(out, "(bipartite)"),
        }
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        Show(&self.formula, &self.names).fmt(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_sentences() {
        let s = parse_formula("(exists X (V X))").unwrap();
        assert_eq!(s.formula, Formula::exists(0, Formula::V(0)));
        let s = parse_formula("(and (hamiltonian-cycle) (unitable 2))").unwrap();
        assert_eq!(s.formula, Formula::And(vec![Formula::HamiltonianCycle, Formula::Unitable(2)]));
        let s = parse_formula("(not (exists X (and (singleton X) (E X))))").unwrap();
        assert_eq!(
            s.formula,
            Formula::not(Formula::exists(0, Formula::And(vec![Formula::Singleton(0), Formula::E(0)])))
        );
    }

    #[test]
    fn alpha_renaming_and_sugar() {
        let s = parse_formula("(and (exists X (V X)) (forall X (implies (V X) (V X))))").unwrap();
        assert_eq!(s.names.len(), 2);
        assert!(s.formula.free_vars().is_empty());
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(parse_formula("(exists X (V Y))"), Err(Error::UnboundVariable(v)) if v == "Y"));
        assert!(matches!(parse_formula("(and (V"), Err(Error::Syntax { .. })));
        match parse_formula("(frob)") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn printing_round_trips() {
        for text in [CONNECTED, FOREST, BIPARTITE, HAMILTONIAN_CYCLE, &unitable_text(2)] {
            let s = parse_formula(text).unwrap();
            let again = parse_formula(&s.to_string()).unwrap();
            assert_eq!(again.formula, s.formula);
        }
    }

    #[test]
    fn macros_expand_to_closed_formulas() {
        let s = parse_formula("(and (hamiltonian-cycle) (forest) (bipartite))").unwrap().expand_macros();
        assert!(!s.formula.has_graph_macros());
        assert!(s.formula.free_vars().is_empty());
        let p = parse_with_free("(path-vertices X)", &["X"]).unwrap().expand_macros();
        assert_eq!(p.formula.free_vars(), vec![0]);
    }
}
