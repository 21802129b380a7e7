//! Graph families and seeded random generators used by tests, benchmarks
//! and the bundled corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::{Digraph, WeightSemigroup};

pub const DEFAULT_SEED: u64 = 0x5eed_2013;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `D(n)`: the complete binary tree on `n` heap-numbered vertices with
/// every edge replaced by an antiparallel pair.
pub fn binary_tree(n: usize) -> Digraph {
    let mut g = Digraph::new(n);
    for child in 1..n {
        let parent = (child - 1) / 2;
        g.add_edge(parent, child);
        g.add_edge(child, parent);
    }
    g
}

/// Complete digraph on `n` vertices: every ordered pair is an edge.
pub fn bidirected_complete(n: usize) -> Digraph {
    let mut g = Digraph::new(n);
    for a in 0..n {
        for b in 0..n {
            if a != b {
                g.add_edge(a, b);
            }
        }
    }
    g
}

pub fn directed_cycle(n: usize) -> Digraph {
    let mut g = Digraph::new(n);
    for v in 0..n {
        g.add_edge(v, (v + 1) % n);
    }
    g
}

pub fn directed_path(n: usize) -> Digraph {
    let mut g = Digraph::new(n);
    for v in 1..n {
        g.add_edge(v - 1, v);
    }
    g
}

/// `a × b` grid oriented as the union of a row snake and a column snake.
/// Boundary edges where the two snakes disagree appear in both directions.
pub fn grid_of_paths(a: usize, b: usize) -> Digraph {
    let id = |i: usize, j: usize| i * b + j;
    let mut pairs = Vec::new();
    for i in 0..a {
        for j in 0..b - 1 {
            pairs.push(if i % 2 == 0 { (id(i, j), id(i, j + 1)) } else { (id(i, j + 1), id(i, j)) });
        }
        if i + 1 < a {
            let j = if i % 2 == 0 { b - 1 } else { 0 };
            pairs.push((id(i, j), id(i + 1, j)));
        }
    }
    for j in 0..b {
        for i in 0..a - 1 {
            pairs.push(if j % 2 == 0 { (id(i, j), id(i + 1, j)) } else { (id(i + 1, j), id(i, j)) });
        }
        if j + 1 < b {
            let i = if j % 2 == 0 { a - 1 } else { 0 };
            pairs.push((id(i, j), id(i, j + 1)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    Digraph::from_edges(a * b, &pairs)
}

/// Random DAG whose edges point from lower to higher ids in a hidden
/// random permutation. Vertex ids are shuffled so the identity is not
/// automatically topological.
pub fn random_dag(rng: &mut impl Rng, n: usize, p: f64) -> Digraph {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut g = Digraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(perm[i], perm[j]);
            }
        }
    }
    g
}

/// Random simple digraph without self-loops: each ordered pair is an edge
/// with probability `p`.
pub fn random_digraph(rng: &mut impl Rng, n: usize, p: f64) -> Digraph {
    let mut g = Digraph::new(n);
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(p) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Assigns uniformly random weights from the semigroup to every edge.
pub fn randomize_weights(rng: &mut impl Rng, g: &mut Digraph, omega: &WeightSemigroup, max: u32) {
    let top = (omega.size() as u32 - 1).min(max);
    for e in 0..g.m() {
        g.set_weight(e, rng.gen_range(0..=top));
    }
}

/// All digraphs on `n` vertices without self-loops or parallel edges,
/// indexed by the subset of ordered pairs present.
pub fn all_simple_digraphs(n: usize) -> impl Iterator<Item = Digraph> {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let total = 1u64 << pairs.len();
    (0..total).map(move |mask| {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
        Digraph::from_edges(n, &edges)
    })
}

/// One counting query of the bundled corpus.
#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub name: String,
    pub graph: Digraph,
    pub ordering: Vec<usize>,
    pub preset: &'static str,
    pub k: usize,
    pub z: usize,
    pub l: Option<usize>,
}

const PRESET_NAMES: [&str; 4] = ["hamiltonian", "connected-spanning", "forest", "bipartite"];

/// Desk-scale graphs paired with every preset. Orderings come from the
/// separation-number search, and `z` is the measured zig-zag number of the
/// ordering, capped at 3.
pub fn bundled(seed: u64) -> Vec<CorpusCase> {
    let mut r = rng(seed);
    let mut graphs: Vec<(String, Digraph)> = vec![
        ("cycle2".into(), directed_cycle(2)),
        ("cycle3".into(), directed_cycle(3)),
        ("cycle5".into(), directed_cycle(5)),
        ("path4".into(), directed_path(4)),
        ("complete3".into(), bidirected_complete(3)),
        ("complete4".into(), bidirected_complete(4)),
        ("tree3".into(), binary_tree(3)),
        ("tree5".into(), binary_tree(5)),
        ("loops".into(), Digraph::from_edges(3, &[(0, 0), (0, 1), (1, 2), (2, 0), (1, 1)])),
        ("parallel".into(), Digraph::from_edges(3, &[(0, 1), (0, 1), (1, 2), (2, 0)])),
    ];
    for i in 0..8 {
        graphs.push((format!("dag{i}"), random_dag(&mut r, 5, 0.5)));
    }
    for i in 0..12 {
        let n = 4 + i % 2;
        graphs.push((format!("random{i}"), random_digraph(&mut r, n, if n == 4 { 0.35 } else { 0.25 })));
    }
    let mut out = Vec::new();
    for (name, g) in graphs {
        let (ordering, _) = crate::ordering::search_min_dvsn_ordering(&g, None).expect("small graph");
        let z = crate::ordering::zigzag_number(&g, &ordering).expect("valid ordering").clamp(1, 3);
        for preset in PRESET_NAMES {
            let l = match preset {
                "forest" | "bipartite" => Some(r.gen_range(1..=g.n())),
                _ => None,
            };
            out.push(CorpusCase { name: name.clone(), graph: g.clone(), ordering: ordering.clone(), preset, k: 2, z, l });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        assert_eq!(binary_tree(7).m(), 12);
        assert_eq!(bidirected_complete(5).m(), 20);
        assert!(!directed_cycle(3).is_dag());
        assert!(directed_path(4).is_dag());
        let mut r = rng(1);
        for _ in 0..10 {
            assert!(random_dag(&mut r, 6, 0.5).is_dag());
        }
        assert_eq!(all_simple_digraphs(3).count(), 64);
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_digraph(&mut rng(7), 6, 0.4);
        let b = random_digraph(&mut rng(7), 6, 0.4);
        assert_eq!(a, b);
    }

    #[test]
    fn bundled_corpus_size() {
        let c = bundled(DEFAULT_SEED);
        assert!(c.len() >= 100);
        assert!(c.iter().all(|q| q.graph.n() <= 5));
    }
}
