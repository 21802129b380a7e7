//! Compilation of monadic second-order formulas into slice languages.

pub mod automaton;
pub mod compile;
pub mod formula;
pub mod frontier;
pub mod scanners;
pub mod symbols;

pub use automaton::{Automaton, AutomatonStats, Macros, StateId, DEAD, UNIV};
pub use formula::{parse_formula, parse_with_free, Formula, Sentence, Var};
pub use compile::{compile, SaturatedView};
