//! Memo keys for the deletion/contraction engines.
//!
//! A key is the graph relabeled by a degree-then-BFS vertex order with its
//! edge list sorted. Two isomorphic graphs may still get different keys; the
//! engines only rely on equal keys meaning equal graphs.

use std::collections::VecDeque;
use std::fmt;

use crate::graph::Multigraph;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphKey {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl fmt::Display for GraphKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

/// `perm[old] = new`. Each component is entered at its highest-degree
/// vertex (smallest label on ties); neighbors are queued by descending
/// degree, then label.
fn degree_bfs_order(g: &Multigraph) -> Vec<usize> {
    let n = g.vertex_count();
    let deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in g.edges() {
        if a != b {
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
    }
    for list in &mut nbrs {
        list.sort_unstable_by_key(|&w| (std::cmp::Reverse(deg[w]), w));
        list.dedup();
    }
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));

    let mut perm = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in by_degree {
        if perm[start] != usize::MAX {
            continue;
        }
        perm[start] = next;
        next += 1;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &nbrs[v] {
                if perm[w] == usize::MAX {
                    perm[w] = next;
                    next += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    perm
}

/// The relabeled, edge-sorted graph and its key.
pub fn normalize(g: &Multigraph) -> (Multigraph, GraphKey) {
    let norm = g.relabeled_sorted(&degree_bfs_order(g));
    let key = GraphKey {
        n: norm.vertex_count(),
        edges: norm
            .edges()
            .iter()
            .map(|&(a, b)| (a as u32, b as u32))
            .collect(),
    };
    (norm, key)
}
