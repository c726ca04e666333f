//! Test corpora: exhaustive small graphs and seeded random families.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::graph::Multigraph;

/// Hex digest identifying an ordered list of graphs.
pub fn corpus_digest(graphs: &[Multigraph]) -> String {
    let mut hasher = Sha256::new();
    for g in graphs {
        hasher.update(g.to_edge_list().as_bytes());
        hasher.update(b";");
    }
    hex::encode(&hasher.finalize()[..8])
}

/// Every connected simple graph on `1..=max_n` labeled vertices.
pub fn connected_simple_graphs(max_n: usize) -> Vec<Multigraph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        for subset in 0u64..1 << pairs.len() {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| subset >> i & 1 == 1)
                .map(|(_, p)| *p);
            let g = Multigraph::new(n, edges).expect("labels are in range");
            if g.is_connected() {
                out.push(g);
            }
        }
    }
    out
}

/// The exhaustive corpus: all connected simple graphs on at most 5 vertices.
pub fn small_corpus() -> Vec<Multigraph> {
    connected_simple_graphs(5)
}

/// Random labeled tree on `n` vertices: vertex `i` attaches to a uniform
/// earlier vertex, then labels are shuffled.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Multigraph {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let edges = (1..n).map(|i| (labels[rng.gen_range(0..i)], labels[i]));
    Multigraph::new(n, edges).expect("labels are in range")
}

/// Random forest on `1..=max_n` vertices: a random tree with a random
/// number of its edges removed.
pub fn random_forest<R: Rng>(rng: &mut R, max_n: usize) -> Multigraph {
    let n = rng.gen_range(1..=max_n);
    let tree = random_tree(rng, n);
    let edges: Vec<(usize, usize)> = tree
        .edges()
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.8))
        .collect();
    Multigraph::new(n, edges).expect("labels are in range")
}

/// Random connected simple graph with `3..=8` vertices and at most
/// `max_edges` edges: a random spanning tree plus random extra pairs.
pub fn random_connected_graph<R: Rng>(rng: &mut R, max_edges: usize) -> Multigraph {
    let n = rng.gen_range(3..=8usize.min(max_edges + 1));
    let tree = random_tree(rng, n);
    let mut edges: Vec<(usize, usize)> = tree.edges().to_vec();
    let mut missing: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|p| !edges.contains(p))
        .collect();
    missing.shuffle(rng);
    let room = max_edges.saturating_sub(edges.len()).min(missing.len());
    let extra = rng.gen_range(0..=room);
    edges.extend(missing.into_iter().take(extra));
    edges.shuffle(rng);
    Multigraph::new(n, edges).expect("labels are in range")
}

/// Random multigraph on `1..=5` vertices with `0..=max_edges` edges drawn
/// uniformly from all vertex pairs, loops included.
pub fn random_multigraph<R: Rng>(rng: &mut R, max_edges: usize) -> Multigraph {
    let n = rng.gen_range(1..=5);
    let m = rng.gen_range(0..=max_edges);
    let edges: Vec<(usize, usize)> = (0..m)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    Multigraph::new(n, edges).expect("labels are in range")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErdosRenyiParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub edge_probability: f64,
    pub max_edges: usize,
}

impl Default for ErdosRenyiParams {
    fn default() -> Self {
        ErdosRenyiParams {
            min_vertices: 4,
            max_vertices: 7,
            edge_probability: 0.4,
            max_edges: 12,
        }
    }
}

/// `G(n, p)` with `n` uniform in the given range; draws with more than
/// `max_edges` edges are rejected and redrawn.
pub fn erdos_renyi<R: Rng>(rng: &mut R, params: &ErdosRenyiParams) -> Multigraph {
    loop {
        let n = rng.gen_range(params.min_vertices..=params.max_vertices);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect::<Vec<_>>()
            .into_iter()
            .filter(|_| rng.gen_bool(params.edge_probability))
            .collect();
        if edges.len() <= params.max_edges {
            return Multigraph::new(n, edges).expect("labels are in range");
        }
    }
}
