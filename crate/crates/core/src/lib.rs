//! Counting subgraphs that satisfy a monadic second-order property and are
//! unions of a bounded number of directed paths, by intersecting slice
//! languages along a vertex ordering of bounded zig-zag number.

pub mod corpus;
pub mod digraph;
pub mod error;
pub mod mso;
pub mod oracle;
pub mod ordering;
pub mod pipeline;
pub mod slice;
pub mod slice_graph;

pub use digraph::{Digraph, WeightSemigroup};
pub use error::{Error, Result};
