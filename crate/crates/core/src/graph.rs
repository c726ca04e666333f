//! Undirected multigraphs with stable edge identities.
//!
//! Vertices are the dense labels `0..n`. Edges are addressed by their
//! position in the edge list and stored canonically as `(min, max)`.
//! Parallel edges and loops are allowed. Every structural operation returns
//! a fresh graph together with the tables needed to carry vertex and edge
//! ids from the input across to the result.

use std::fmt;
use std::sync::OnceLock;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Content hash of a graph's edge-list serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphId(pub u64);

impl fmt::Display for GraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Bridge,
    CycleEdge,
    Loop,
}

#[derive(Clone, Default)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    id: OnceLock<GraphId>,
}

impl PartialEq for Multigraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Multigraph {}

impl fmt::Debug for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multigraph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

/// A graph derived from another one, with the id translation tables.
///
/// `vertex_map[old]` is the vertex of `graph` that `old` became.
/// `edge_map[old]` is the edge of `graph` that edge `old` became, or `None`
/// when the edge was removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minor {
    pub graph: Multigraph,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<Option<usize>>,
}

impl Multigraph {
    /// Builds a graph, validating endpoint labels. Endpoints are stored as
    /// `(min, max)`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut stored = Vec::new();
        for (i, (a, b)) in edges.into_iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::domain(format!(
                    "edge {i} = ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            stored.push((a.min(b), a.max(b)));
        }
        Ok(Self::from_canonical(n, stored))
    }

    fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Multigraph {
            n,
            edges,
            id: OnceLock::new(),
        }
    }

    pub fn edgeless(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        let edges = (0..n).map(|i| (i, (i + 1) % n));
        Self::new(n, edges).expect("labels are in range")
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i));
        Self::new(n, edges).expect("labels are in range")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Self::new(n, edges).expect("labels are in range")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<(usize, usize)> {
        self.edges.get(e).copied().ok_or_else(|| {
            Error::domain(format!(
                "edge-id {e} out of range for a graph with {} edges",
                self.edges.len()
            ))
        })
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a == b).count()
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|(a, b)| a == b)
    }

    /// True when there are no loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        if self.has_loops() {
            return false;
        }
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    /// `incidence[v]` lists `(edge-id, other endpoint)` for each edge at `v`.
    /// A loop appears once.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.n];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            inc[a].push((e, b));
            if a != b {
                inc[b].push((e, a));
            }
        }
        inc
    }

    /// Stable content hash of the edge-list serialization.
    pub fn id(&self) -> GraphId {
        *self.id.get_or_init(|| {
            let digest = Sha256::digest(self.to_edge_list().as_bytes());
            let mut head = [0u8; 8];
            head.copy_from_slice(&digest[..8]);
            GraphId(u64::from_be_bytes(head))
        })
    }

    /// Parses the edge-list text format: a header line `n m` followed by `m`
    /// lines `u v`. Blank lines are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing `n m` header".into(),
        })?;
        let (n, m) = parse_pair(header, header_line)?;

        let mut edges = Vec::with_capacity(m);
        for (line, body) in lines.by_ref() {
            if edges.len() == m {
                return Err(Error::Parse {
                    line,
                    message: format!("header declares {m} edges but more lines follow"),
                });
            }
            let (u, v) = parse_pair(body, line)?;
            if u >= n || v >= n {
                return Err(Error::Parse {
                    line,
                    message: format!("vertex id out of range 0..{n}"),
                });
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Multigraph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    /// Removes edge `e`. Vertices are untouched; surviving edges keep their
    /// relative order.
    pub fn delete_edge(&self, e: usize) -> Result<Minor> {
        self.edge(e)?;
        let mut edge_map = Vec::with_capacity(self.edges.len());
        let mut edges = Vec::with_capacity(self.edges.len() - 1);
        for (i, &uv) in self.edges.iter().enumerate() {
            if i == e {
                edge_map.push(None);
            } else {
                edge_map.push(Some(edges.len()));
                edges.push(uv);
            }
        }
        Ok(Minor {
            graph: Self::from_canonical(self.n, edges),
            vertex_map: (0..self.n).collect(),
            edge_map,
        })
    }

    /// Contracts the non-loop edge `e`: its endpoints merge into the smaller
    /// label, labels above the larger endpoint shift down by one. Parallel
    /// edges and loops created by the merge are kept.
    pub fn contract_edge(&self, e: usize) -> Result<Minor> {
        let (keep, gone) = self.edge(e)?;
        if keep == gone {
            return Err(Error::domain(format!(
                "edge {e} is a loop and cannot be contracted"
            )));
        }
        let vertex_map: Vec<usize> = (0..self.n)
            .map(|v| match v.cmp(&gone) {
                std::cmp::Ordering::Less => v,
                std::cmp::Ordering::Equal => keep,
                std::cmp::Ordering::Greater => v - 1,
            })
            .collect();
        let mut edge_map = Vec::with_capacity(self.edges.len());
        let mut edges = Vec::with_capacity(self.edges.len() - 1);
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if i == e {
                edge_map.push(None);
                continue;
            }
            let (a, b) = (vertex_map[a], vertex_map[b]);
            edge_map.push(Some(edges.len()));
            edges.push((a.min(b), a.max(b)));
        }
        Ok(Minor {
            graph: Self::from_canonical(self.n - 1, edges),
            vertex_map,
            edge_map,
        })
    }

    /// Removes loops and collapses every parallel class onto its lowest
    /// edge-id. Duplicates map to the surviving representative; loops map
    /// to `None`.
    pub fn simplify(&self) -> Minor {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut seen = std::collections::HashMap::new();
        let edge_map = self
            .edges
            .iter()
            .map(|&(a, b)| {
                if a == b {
                    return None;
                }
                let next = edges.len();
                let id = *seen.entry((a, b)).or_insert(next);
                if id == next {
                    edges.push((a, b));
                }
                Some(id)
            })
            .collect();
        Minor {
            graph: Self::from_canonical(self.n, edges),
            vertex_map: (0..self.n).collect(),
            edge_map,
        }
    }

    /// Blocks of the vertex partition into connected components. Blocks are
    /// sorted internally and ordered by their smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let labels = self.component_labels();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (v, &c) in labels.iter().enumerate() {
            blocks[c].push(v);
        }
        blocks
    }

    /// `labels[v]` is the index of `v`'s component, numbered in order of
    /// smallest member.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::<usize>::new(self.n);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut root_label = vec![usize::MAX; self.n];
        let mut next = 0;
        (0..self.n)
            .map(|v| {
                let r = uf.find(v);
                if root_label[r] == usize::MAX {
                    root_label[r] = next;
                    next += 1;
                }
                root_label[r]
            })
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Tags every edge as a loop, a bridge, or a cycle-edge.
    pub fn classify_edges(&self) -> Vec<EdgeKind> {
        let inc = self.incidence();
        let mut kinds: Vec<EdgeKind> = self
            .edges
            .iter()
            .map(|(a, b)| {
                if a == b {
                    EdgeKind::Loop
                } else {
                    EdgeKind::CycleEdge
                }
            })
            .collect();
        let mut disc = vec![usize::MAX; self.n];
        let mut low = vec![0; self.n];
        let mut clock = 0;
        for root in 0..self.n {
            if disc[root] == usize::MAX {
                bridge_dfs(
                    root, None, &inc, &mut disc, &mut low, &mut clock, &mut kinds,
                );
            }
        }
        kinds
    }

    /// Cycle(Y): the same vertex set with every bridge deleted.
    pub fn cycle_subgraph(&self) -> Multigraph {
        let kinds = self.classify_edges();
        let edges = self
            .edges
            .iter()
            .zip(&kinds)
            .filter(|(_, k)| **k != EdgeKind::Bridge)
            .map(|(uv, _)| *uv)
            .collect();
        Self::from_canonical(self.n, edges)
    }

    /// Splits into one graph per connected component, each relabeled to
    /// `0..k` preserving relative vertex order and edge order.
    pub fn component_subgraphs(&self) -> Vec<Multigraph> {
        let labels = self.component_labels();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut local = vec![0; self.n];
        let mut sizes = vec![0; count];
        for v in 0..self.n {
            local[v] = sizes[labels[v]];
            sizes[labels[v]] += 1;
        }
        let mut parts: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
        for &(a, b) in &self.edges {
            parts[labels[a]].push((local[a], local[b]));
        }
        parts
            .into_iter()
            .zip(sizes)
            .map(|(edges, n)| Self::from_canonical(n, edges))
            .collect()
    }

    /// Relabels vertices by `perm[old] = new` and sorts the edge list.
    pub(crate) fn relabeled_sorted(&self, perm: &[usize]) -> Multigraph {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (perm[a], perm[b]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        Self::from_canonical(self.n, edges)
    }
}

fn bridge_dfs(
    v: usize,
    via: Option<usize>,
    inc: &[Vec<(usize, usize)>],
    disc: &mut [usize],
    low: &mut [usize],
    clock: &mut usize,
    kinds: &mut [EdgeKind],
) {
    disc[v] = *clock;
    low[v] = *clock;
    *clock += 1;
    for &(e, w) in &inc[v] {
        if Some(e) == via || w == v {
            continue;
        }
        if disc[w] == usize::MAX {
            bridge_dfs(w, Some(e), inc, disc, low, clock, kinds);
            low[v] = low[v].min(low[w]);
            if low[w] > disc[v] {
                kinds[e] = EdgeKind::Bridge;
            }
        } else {
            low[v] = low[v].min(disc[w]);
        }
    }
}

fn parse_pair(body: &str, line: usize) -> Result<(usize, usize)> {
    let mut it = body.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line,
            message: format!("expected two integers, missing {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line,
            message: format!("`{tok}` is not a non-negative integer"),
        })
    };
    let a = next("first value")?;
    let b = next("second value")?;
    if let Some(extra) = it.next() {
        return Err(Error::Parse {
            line,
            message: format!("unexpected trailing token `{extra}`"),
        });
    }
    Ok((a, b))
}
