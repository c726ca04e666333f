//! κ(Y) by deletion/contraction of cycle-edges, without touching the
//! orientation space.
//!
//! Every call simplifies the graph, deletes bridges, multiplies over the
//! remaining non-trivial components, and on each component recurses on one
//! cycle-edge: `κ(Y) = κ(Y − e) + κ(simplify(Y / e))`. Components are
//! memoized on their [`GraphKey`].

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::key::{normalize, GraphKey};

/// Counts are `u64`; κ ≤ α ≤ 2^m stays representable below this.
pub const MAX_KAPPA_EDGES: usize = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeChoice {
    /// The least edge of the normalized graph.
    Lexicographic,
    /// A uniformly random cycle-edge, for differential testing.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Product,
    BridgePrune,
    Base,
    Recursion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    pub key: String,
    pub rule: Rule,
    /// Endpoints of the chosen cycle-edge, in the labels of `key`.
    pub edge: Option<[usize; 2]>,
    pub children: Vec<TraceNode>,
    pub value: u64,
}

impl TraceNode {
    pub fn leaves(&self) -> Vec<&TraceNode> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaResult {
    pub value: u64,
    pub trace: Option<TraceNode>,
    pub cache_stats: CacheStats,
}

pub struct KappaEngine {
    cache: Option<HashMap<GraphKey, u64>>,
    rng: Option<ChaCha8Rng>,
    tracing: bool,
    stats: CacheStats,
}

impl Default for KappaEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl KappaEngine {
    pub fn new() -> Self {
        KappaEngine {
            cache: Some(HashMap::new()),
            rng: None,
            tracing: false,
            stats: CacheStats::default(),
        }
    }

    /// No memoization at all.
    pub fn uncached() -> Self {
        KappaEngine {
            cache: None,
            ..Self::new()
        }
    }

    pub fn with_edge_choice(mut self, choice: EdgeChoice) -> Self {
        self.rng = match choice {
            EdgeChoice::Lexicographic => None,
            EdgeChoice::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        self
    }

    /// Records the full recursion tree. Memoization is switched off so the
    /// tree is completely unfolded.
    pub fn with_trace(mut self) -> Self {
        self.tracing = true;
        self.cache = None;
        self
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.stats
    }

    pub fn kappa(&mut self, g: &Multigraph) -> Result<KappaResult> {
        if g.has_loops() {
            return Err(Error::domain(
                "kappa: graph has a loop, which admits no acyclic orientation",
            ));
        }
        let simple = g.simplify().graph;
        if simple.edge_count() > MAX_KAPPA_EDGES {
            return Err(Error::ResourceLimit {
                what: "kappa recursion",
                cap: MAX_KAPPA_EDGES,
                actual: simple.edge_count(),
            });
        }
        let before = self.stats;
        let (value, trace) = self.eval_simple(&simple)?;
        Ok(KappaResult {
            value,
            trace,
            cache_stats: CacheStats {
                hits: self.stats.hits - before.hits,
                misses: self.stats.misses - before.misses,
            },
        })
    }

    /// `g` is simple; it may be disconnected and may have bridges.
    fn eval_simple(&mut self, g: &Multigraph) -> Result<(u64, Option<TraceNode>)> {
        let pruned = g.cycle_subgraph();
        let pieces: Vec<Multigraph> = pruned
            .component_subgraphs()
            .into_iter()
            .filter(|p| p.edge_count() > 0)
            .collect();

        let mut value = 1u64;
        let mut nodes = Vec::new();
        for piece in &pieces {
            let (v, node) = self.solve_piece(piece)?;
            value = value
                .checked_mul(v)
                .ok_or(Error::Overflow("kappa product"))?;
            nodes.extend(node);
        }
        if !self.tracing {
            return Ok((value, None));
        }

        let key = || normalize(g).1.to_string();
        let mut node = match nodes.len() {
            0 => TraceNode {
                key: key(),
                rule: Rule::Base,
                edge: None,
                children: Vec::new(),
                value,
            },
            1 => nodes.pop().expect("one node"),
            _ => TraceNode {
                key: normalize(&pruned).1.to_string(),
                rule: Rule::Product,
                edge: None,
                children: nodes,
                value,
            },
        };
        if !pieces.is_empty() && pruned.edge_count() < g.edge_count() {
            node = TraceNode {
                key: key(),
                rule: Rule::BridgePrune,
                edge: None,
                children: vec![node],
                value,
            };
        }
        Ok((value, Some(node)))
    }

    /// `piece` is simple, connected and bridgeless with at least one edge.
    fn solve_piece(&mut self, piece: &Multigraph) -> Result<(u64, Option<TraceNode>)> {
        let (norm, key) = normalize(piece);
        if let Some(&hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            self.stats.hits += 1;
            return Ok((hit, None));
        }
        if self.cache.is_some() {
            self.stats.misses += 1;
        }

        let e = match &mut self.rng {
            None => 0,
            Some(rng) => rng.gen_range(0..norm.edge_count()),
        };
        let deleted = norm.delete_edge(e)?.graph;
        let contracted = norm.contract_edge(e)?.graph.simplify().graph;
        let (a, left) = self.eval_simple(&deleted)?;
        let (b, right) = self.eval_simple(&contracted)?;
        let value = a.checked_add(b).ok_or(Error::Overflow("kappa recursion"))?;

        if let Some(cache) = &mut self.cache {
            cache.insert(key.clone(), value);
        }
        let node = self.tracing.then(|| {
            let (u, v) = norm.edges()[e];
            TraceNode {
                key: key.to_string(),
                rule: Rule::Recursion,
                edge: Some([u, v]),
                children: left.into_iter().chain(right).collect(),
                value,
            }
        });
        Ok((value, node))
    }
}

/// κ(Y) with a fresh memo table.
pub fn kappa(g: &Multigraph) -> Result<KappaResult> {
    KappaEngine::new().kappa(g)
}

/// κ(Y) with the unfolded recursion tree attached.
pub fn kappa_with_trace(g: &Multigraph) -> Result<KappaResult> {
    KappaEngine::new().with_trace().kappa(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> Multigraph {
        Multigraph::new(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn forests_give_one() {
        let forest = g(7, &[(0, 1), (1, 2), (1, 3), (4, 5)]);
        assert_eq!(kappa(&forest).unwrap().value, 1);
        assert_eq!(kappa(&Multigraph::edgeless(0)).unwrap().value, 1);
    }

    #[test]
    fn cycles() {
        for n in 3..=8 {
            assert_eq!(kappa(&Multigraph::cycle(n)).unwrap().value, n as u64 - 1);
        }
    }

    #[test]
    fn disjoint_triangles_multiply() {
        let two = g(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(kappa(&two).unwrap().value, 4);
    }

    #[test]
    fn complete_graphs() {
        assert_eq!(kappa(&Multigraph::complete(4)).unwrap().value, 6);
        // T(K5; 1, 0) = 24
        assert_eq!(kappa(&Multigraph::complete(5)).unwrap().value, 24);
    }

    #[test]
    fn multigraphs_simplify_and_loops_are_rejected() {
        let doubled = g(3, &[(0, 1), (0, 1), (1, 2), (0, 2)]);
        assert_eq!(kappa(&doubled).unwrap().value, 2);
        assert!(matches!(
            kappa(&g(2, &[(0, 0), (0, 1)])),
            Err(Error::InputDomain(_))
        ));
    }

    #[test]
    fn trace_shapes() {
        let tree = kappa_with_trace(&Multigraph::path(4)).unwrap();
        let t = tree.trace.unwrap();
        assert_eq!(t.rule, Rule::Base);
        assert!(t.children.is_empty());

        let tri = kappa_with_trace(&Multigraph::cycle(3))
            .unwrap()
            .trace
            .unwrap();
        assert_eq!(tri.rule, Rule::Recursion);
        assert_eq!(tri.edge, Some([0, 1]));
        assert_eq!(tri.children.len(), 2);
        assert!(tri
            .children
            .iter()
            .all(|c| c.rule == Rule::Base && c.value == 1));

        let k4 = kappa_with_trace(&Multigraph::complete(4)).unwrap();
        let t = k4.trace.unwrap();
        let leaves = t.leaves();
        assert!(leaves.iter().all(|l| l.value == 1 && l.rule == Rule::Base));
        assert_eq!(leaves.len(), 6);
        assert_eq!(k4.cache_stats, CacheStats::default());
    }

    #[test]
    fn bridge_prune_and_product_nodes() {
        // two triangles joined by a bridge
        let dumbbell = g(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]);
        let r = kappa_with_trace(&dumbbell).unwrap();
        assert_eq!(r.value, 4);
        let t = r.trace.unwrap();
        assert_eq!(t.rule, Rule::BridgePrune);
        assert_eq!(t.children[0].rule, Rule::Product);
        assert_eq!(t.children[0].children.len(), 2);
    }

    #[test]
    fn cache_counts_hits() {
        let mut engine = KappaEngine::new();
        let k5 = Multigraph::complete(5);
        let first = engine.kappa(&k5).unwrap();
        assert!(first.cache_stats.misses > 0);
        let again = engine.kappa(&k5).unwrap();
        assert_eq!(again.value, first.value);
        assert_eq!(again.cache_stats, CacheStats { hits: 1, misses: 0 });
    }

    #[test]
    fn random_edge_choice_agrees() {
        let k5 = Multigraph::complete(5);
        for seed in 0..10 {
            let v = KappaEngine::uncached()
                .with_edge_choice(EdgeChoice::Seeded(seed))
                .kappa(&k5)
                .unwrap()
                .value;
            assert_eq!(v, 24);
        }
    }
}
