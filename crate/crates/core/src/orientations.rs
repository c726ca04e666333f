//! Brute-force layer over the orientation space of a graph.
//!
//! An orientation is a bitmask with one bit per edge-id: bit `0` directs the
//! edge from its smaller endpoint to its larger one, bit `1` the reverse.
//! Everything here enumerates `Acyc(Y)` explicitly, so it is exact but only
//! usable below the brute-force edge cap.

use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphId, Multigraph};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;

/// Bitmasks are `u64`, and `2^m` masks must be countable.
const HARD_EDGE_LIMIT: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation {
    graph: GraphId,
    bits: u64,
}

impl Orientation {
    pub fn new(g: &Multigraph, bits: u64) -> Result<Self> {
        let m = g.edge_count();
        if m > HARD_EDGE_LIMIT {
            return Err(Error::ResourceLimit {
                what: "orientation bitmask",
                cap: HARD_EDGE_LIMIT,
                actual: m,
            });
        }
        if bits >> m != 0 {
            return Err(Error::domain(format!(
                "bitmask {bits:#x} has bits beyond the {m} edges of the graph"
            )));
        }
        Ok(Orientation {
            graph: g.id(),
            bits,
        })
    }

    pub(crate) fn from_parts(graph: GraphId, bits: u64) -> Self {
        Orientation { graph, bits }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn graph_id(&self) -> GraphId {
        self.graph
    }

    /// Whether edge `e` is directed from its larger endpoint to its smaller.
    pub fn is_reversed(&self, e: usize) -> bool {
        self.bits >> e & 1 == 1
    }

    /// `(tail, head)` of edge `e` under this orientation.
    pub fn arc(&self, g: &Multigraph, e: usize) -> Result<(usize, usize)> {
        let (a, b) = g.edge(e)?;
        Ok(if self.is_reversed(e) { (b, a) } else { (a, b) })
    }

    /// Lowercase hex bitmask followed by `@` and the graph's edge-list hash.
    pub fn to_hex(&self) -> String {
        format!("{:x}@{}", self.bits, self.graph)
    }

    pub fn parse(g: &Multigraph, text: &str) -> Result<Self> {
        let (hex_bits, hash) = text.split_once('@').ok_or_else(|| {
            Error::domain(format!("`{text}` is not of the form <hex>@<graph-hash>"))
        })?;
        if hash != g.id().to_string() {
            return Err(Error::domain(format!(
                "orientation belongs to graph {hash}, not {}",
                g.id()
            )));
        }
        let bits = u64::from_str_radix(hex_bits, 16)
            .map_err(|_| Error::domain(format!("`{hex_bits}` is not a hex bitmask")))?;
        Orientation::new(g, bits)
    }

    fn check_graph(&self, g: &Multigraph) -> Result<()> {
        if self.graph != g.id() {
            return Err(Error::domain(format!(
                "orientation of graph {} used with graph {}",
                self.graph,
                g.id()
            )));
        }
        Ok(())
    }
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Per-vertex edge masks used by the bitwise kernels.
pub(crate) struct Frame {
    n: usize,
    m: usize,
    /// Non-loop edges incident to `v`.
    star: Vec<u64>,
    /// Edges whose smaller endpoint is `v`.
    low: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl Frame {
    pub(crate) fn new(g: &Multigraph) -> Self {
        let n = g.vertex_count();
        let mut star = vec![0u64; n];
        let mut low = vec![0u64; n];
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            if a == b {
                continue;
            }
            star[a] |= 1 << e;
            star[b] |= 1 << e;
            low[a] |= 1 << e;
        }
        Frame {
            n,
            m: g.edge_count(),
            star,
            low,
            edges: g.edges().to_vec(),
        }
    }

    fn out_edges(&self, mask: u64, v: usize) -> u64 {
        let s = self.star[v];
        (s & self.low[v] & !mask) | (s & !self.low[v] & mask)
    }

    fn in_edges(&self, mask: u64, v: usize) -> u64 {
        self.star[v] & !self.out_edges(mask, v)
    }

    /// A vertex of positive degree with no incoming edge.
    pub(crate) fn is_clickable(&self, mask: u64, v: usize) -> bool {
        self.star[v] != 0 && self.in_edges(mask, v) == 0
    }

    pub(crate) fn click(&self, mask: u64, v: usize) -> u64 {
        mask ^ self.star[v]
    }

    fn head_tail(&self, mask: u64, e: usize) -> (usize, usize) {
        let (a, b) = self.edges[e];
        if mask >> e & 1 == 1 {
            (b, a)
        } else {
            (a, b)
        }
    }

    /// Kahn peeling, smallest label first. `None` if a directed cycle exists.
    fn topological_order(&self, mask: u64) -> Option<Vec<usize>> {
        let mut indeg: Vec<u32> = (0..self.n)
            .map(|v| self.in_edges(mask, v).count_ones())
            .collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..self.n)
            .filter(|&v| indeg[v] == 0)
            .map(std::cmp::Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(std::cmp::Reverse(v)) = ready.pop() {
            order.push(v);
            let mut out = self.out_edges(mask, v);
            while out != 0 {
                let e = out.trailing_zeros() as usize;
                out &= out - 1;
                let (_, w) = self.head_tail(mask, e);
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(std::cmp::Reverse(w));
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub(crate) fn is_acyclic(&self, mask: u64) -> bool {
        let mut indeg: Vec<u32> = (0..self.n)
            .map(|v| self.in_edges(mask, v).count_ones())
            .collect();
        let mut stack: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            let mut out = self.out_edges(mask, v);
            while out != 0 {
                let e = out.trailing_zeros() as usize;
                out &= out - 1;
                let (_, w) = self.head_tail(mask, e);
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        seen == self.n
    }

    pub(crate) fn acyclic_masks(&self) -> Vec<u64> {
        (0..1u64 << self.m)
            .filter(|&mask| self.is_acyclic(mask))
            .collect()
    }

    /// Disagreement set is empty or an oriented cut.
    pub(crate) fn cut_equivalent(&self, a: u64, b: u64) -> bool {
        let diff = a ^ b;
        if diff == 0 {
            return true;
        }
        let mut uf = UnionFind::<usize>::new(self.n);
        for (e, &(x, y)) in self.edges.iter().enumerate() {
            if diff >> e & 1 == 0 {
                uf.union(x, y);
            }
        }
        // side: 0 unset, 1 tail side, 2 head side
        let mut side = vec![0u8; self.n];
        let mut rest = diff;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let (tail, head) = self.head_tail(a, e);
            for (v, want) in [(uf.find(tail), 1u8), (uf.find(head), 2u8)] {
                match side[v] {
                    0 => side[v] = want,
                    s if s != want => return false,
                    _ => {}
                }
            }
        }
        true
    }
}

fn reject_loops(g: &Multigraph, what: &str) -> Result<()> {
    if g.has_loops() {
        return Err(Error::domain(format!(
            "{what}: graph has a loop, which admits no acyclic orientation"
        )));
    }
    Ok(())
}

fn check_cap(g: &Multigraph, cap: usize) -> Result<()> {
    let m = g.edge_count();
    let limit = cap.min(HARD_EDGE_LIMIT);
    if m > limit {
        return Err(Error::ResourceLimit {
            what: "brute-force orientation enumeration",
            cap: limit,
            actual: m,
        });
    }
    Ok(())
}

fn check_vertex(g: &Multigraph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        return Err(Error::domain(format!(
            "vertex {v} out of range 0..{}",
            g.vertex_count()
        )));
    }
    Ok(())
}

pub fn is_acyclic(g: &Multigraph, o: &Orientation) -> Result<bool> {
    o.check_graph(g)?;
    reject_loops(g, "is_acyclic")?;
    Ok(Frame::new(g).is_acyclic(o.bits))
}

/// All acyclic orientations in ascending bitmask order.
pub fn enumerate_acyclic(g: &Multigraph, cap: usize) -> Result<Vec<Orientation>> {
    reject_loops(g, "enumerate_acyclic")?;
    check_cap(g, cap)?;
    let id = g.id();
    Ok(Frame::new(g)
        .acyclic_masks()
        .into_iter()
        .map(|bits| Orientation::from_parts(id, bits))
        .collect())
}

/// Vertices with no incoming edge and at least one incident edge.
pub fn sources(g: &Multigraph, o: &Orientation) -> Result<Vec<usize>> {
    o.check_graph(g)?;
    let frame = Frame::new(g);
    Ok((0..g.vertex_count())
        .filter(|&v| frame.is_clickable(o.bits, v))
        .collect())
}

/// Topological order of `o`, smallest available label first.
pub fn topological_order(g: &Multigraph, o: &Orientation) -> Result<Vec<usize>> {
    o.check_graph(g)?;
    reject_loops(g, "topological_order")?;
    Frame::new(g)
        .topological_order(o.bits)
        .ok_or_else(|| Error::domain("orientation has a directed cycle"))
}

/// Source-to-sink conversion at `v`.
pub fn click(g: &Multigraph, o: &Orientation, v: usize) -> Result<Orientation> {
    o.check_graph(g)?;
    check_vertex(g, v)?;
    let frame = Frame::new(g);
    if !frame.is_clickable(o.bits, v) {
        return Err(Error::Precondition(format!(
            "vertex {v} is not a source of positive degree"
        )));
    }
    Ok(Orientation::from_parts(o.graph, frame.click(o.bits, v)))
}

pub fn apply_click_sequence(g: &Multigraph, o: &Orientation, seq: &[usize]) -> Result<Orientation> {
    o.check_graph(g)?;
    let frame = Frame::new(g);
    let mut bits = o.bits;
    for (position, &vertex) in seq.iter().enumerate() {
        if vertex >= g.vertex_count() || !frame.is_clickable(bits, vertex) {
            return Err(Error::ClickSequence { position, vertex });
        }
        bits = frame.click(bits, vertex);
    }
    Ok(Orientation::from_parts(o.graph, bits))
}

/// The partition of `Acyc(Y)` into click-equivalence classes.
///
/// Classes are ordered by representative, and each class lists its members
/// in ascending bitmask order, so the representative is always the first
/// member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaPartition {
    graph: GraphId,
    classes: Vec<Vec<Orientation>>,
    masks: Vec<u64>,
    class_index: Vec<usize>,
}

impl KappaPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Vec<Orientation>] {
        &self.classes
    }

    pub fn representative(&self, class: usize) -> Orientation {
        self.classes[class][0]
    }

    pub fn representatives(&self) -> Vec<Orientation> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    /// Number of acyclic orientations covered.
    pub fn orientation_count(&self) -> usize {
        self.masks.len()
    }

    pub fn class_of(&self, o: &Orientation) -> Option<usize> {
        if o.graph != self.graph {
            return None;
        }
        self.class_of_bits(o.bits)
    }

    pub(crate) fn class_of_bits(&self, bits: u64) -> Option<usize> {
        self.masks
            .binary_search(&bits)
            .ok()
            .map(|i| self.class_index[i])
    }

    /// Builds the partition from a union-find over the sorted masks.
    fn from_union_find(graph: GraphId, masks: Vec<u64>, uf: &mut UnionFind<usize>) -> Self {
        let mut root_class = vec![usize::MAX; masks.len()];
        let mut classes: Vec<Vec<Orientation>> = Vec::new();
        let mut class_index = Vec::with_capacity(masks.len());
        for (i, &bits) in masks.iter().enumerate() {
            let r = uf.find(i);
            if root_class[r] == usize::MAX {
                root_class[r] = classes.len();
                classes.push(Vec::new());
            }
            classes[root_class[r]].push(Orientation::from_parts(graph, bits));
            class_index.push(root_class[r]);
        }
        KappaPartition {
            graph,
            classes,
            masks,
            class_index,
        }
    }
}

/// Connected components of the click graph on `Acyc(Y)`.
///
/// Works directly on loop-free multigraphs: parallel edges stay co-directed
/// under clicks, and anti-parallel pairs are cyclic.
pub fn kappa_partition_bruteforce(g: &Multigraph, cap: usize) -> Result<KappaPartition> {
    reject_loops(g, "kappa_partition_bruteforce")?;
    check_cap(g, cap)?;
    let frame = Frame::new(g);
    let masks = frame.acyclic_masks();
    let mut uf = UnionFind::<usize>::new(masks.len());
    for (i, &bits) in masks.iter().enumerate() {
        for v in 0..g.vertex_count() {
            if frame.is_clickable(bits, v) {
                let j = masks
                    .binary_search(&frame.click(bits, v))
                    .map_err(|_| Error::Internal("click left the acyclic set".into()))?;
                uf.union(i, j);
            }
        }
    }
    Ok(KappaPartition::from_union_find(g.id(), masks, &mut uf))
}

/// Transitive closure of cut-equivalence over `Acyc(Y)`, in the same shape
/// as [`kappa_partition_bruteforce`].
pub fn cut_partition_bruteforce(g: &Multigraph, cap: usize) -> Result<KappaPartition> {
    reject_loops(g, "cut_partition_bruteforce")?;
    check_cap(g, cap)?;
    let frame = Frame::new(g);
    let masks = frame.acyclic_masks();
    let mut uf = UnionFind::<usize>::new(masks.len());
    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            if frame.cut_equivalent(masks[i], masks[j]) {
                uf.union(i, j);
            }
        }
    }
    Ok(KappaPartition::from_union_find(g.id(), masks, &mut uf))
}

/// A simple path, optionally closed, with the edge used at each step.
///
/// `vertices` never repeats the first vertex; a closed path additionally
/// steps from the last vertex back to the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSpec {
    pub vertices: Vec<usize>,
    pub closed: bool,
    pub edges: Vec<usize>,
}

impl PathSpec {
    /// Resolves each step to the lowest edge-id joining its endpoints. For a
    /// closed walk given as `v1 .. vk v1` the trailing repeat is dropped.
    pub fn resolve(g: &Multigraph, vertices: &[usize], closed: bool) -> Result<Self> {
        let mut vertices = vertices.to_vec();
        if closed && vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let steps = step_pairs(&vertices, closed);
        let mut edges = Vec::with_capacity(steps.len());
        for (a, b) in steps {
            let key = (a.min(b), a.max(b));
            let taken: &[usize] = &edges;
            let e = g
                .edges()
                .iter()
                .enumerate()
                .find(|(e, uv)| **uv == key && !taken.contains(e))
                .map(|(e, _)| e)
                .ok_or_else(|| Error::domain(format!("no unused edge joins {a} and {b}")))?;
            edges.push(e);
        }
        Self::with_edges(g, vertices, closed, edges)
    }

    pub fn with_edges(
        g: &Multigraph,
        vertices: Vec<usize>,
        closed: bool,
        edges: Vec<usize>,
    ) -> Result<Self> {
        let p = PathSpec {
            vertices,
            closed,
            edges,
        };
        p.validate(g)?;
        Ok(p)
    }

    pub fn validate(&self, g: &Multigraph) -> Result<()> {
        let k = self.vertices.len();
        if k == 0 {
            return Err(Error::domain("path has no vertices"));
        }
        if self.closed && k < 2 {
            return Err(Error::domain("closed path needs at least two vertices"));
        }
        for &v in &self.vertices {
            check_vertex(g, v)?;
        }
        let mut sorted = self.vertices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("path repeats a vertex"));
        }
        let steps = step_pairs(&self.vertices, self.closed);
        if steps.len() != self.edges.len() {
            return Err(Error::domain(format!(
                "path has {} steps but {} edge choices",
                steps.len(),
                self.edges.len()
            )));
        }
        let mut used = self.edges.clone();
        used.sort_unstable();
        if used.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("path uses an edge twice"));
        }
        for ((a, b), &e) in steps.into_iter().zip(&self.edges) {
            if g.edge(e)? != (a.min(b), a.max(b)) {
                return Err(Error::domain(format!("edge {e} does not join {a} and {b}")));
            }
        }
        Ok(())
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// `(from, to, edge)` for every step in traversal order.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        step_pairs(&self.vertices, self.closed)
            .into_iter()
            .zip(&self.edges)
            .map(|((a, b), &e)| (a, b, e))
    }
}

fn step_pairs(vertices: &[usize], closed: bool) -> Vec<(usize, usize)> {
    let mut steps: Vec<(usize, usize)> = vertices.windows(2).map(|w| (w[0], w[1])).collect();
    if closed && vertices.len() >= 2 {
        steps.push((vertices[vertices.len() - 1], vertices[0]));
    }
    steps
}

/// Every simple closed path, once per direction of traversal, each starting
/// at its smallest vertex. Parallel edges give distinct paths.
pub fn simple_closed_paths(g: &Multigraph) -> Vec<PathSpec> {
    let inc = g.incidence();
    let mut out = Vec::new();
    for start in 0..g.vertex_count() {
        let mut vertices = vec![start];
        let mut edges = Vec::new();
        extend_closed_paths(&inc, start, &mut vertices, &mut edges, &mut out);
    }
    out
}

fn extend_closed_paths(
    inc: &[Vec<(usize, usize)>],
    start: usize,
    vertices: &mut Vec<usize>,
    edges: &mut Vec<usize>,
    out: &mut Vec<PathSpec>,
) {
    let here = *vertices.last().expect("path is never empty");
    for &(e, w) in &inc[here] {
        if edges.contains(&e) || w == here {
            continue;
        }
        if w == start && vertices.len() >= 2 {
            let mut closing = edges.clone();
            closing.push(e);
            out.push(PathSpec {
                vertices: vertices.clone(),
                closed: true,
                edges: closing,
            });
        } else if w > start && !vertices.contains(&w) {
            vertices.push(w);
            edges.push(e);
            extend_closed_paths(inc, start, vertices, edges, out);
            vertices.pop();
            edges.pop();
        }
    }
}

/// Forward edges minus backward edges along `p`.
pub fn nu_path(g: &Multigraph, o: &Orientation, p: &PathSpec) -> Result<i64> {
    o.check_graph(g)?;
    p.validate(g)?;
    let mut total = 0i64;
    for (from, _, e) in p.steps() {
        let (tail, _) = o.arc(g, e)?;
        total += if tail == from { 1 } else { -1 };
    }
    Ok(total)
}

/// Whether the two orientations differ on nothing or on exactly an oriented
/// cut.
pub fn cut_equivalent(g: &Multigraph, o1: &Orientation, o2: &Orientation) -> Result<bool> {
    o1.check_graph(g)?;
    o2.check_graph(g)?;
    reject_loops(g, "cut_equivalent")?;
    let frame = Frame::new(g);
    if !frame.is_acyclic(o1.bits) || !frame.is_acyclic(o2.bits) {
        return Err(Error::domain("cut_equivalent needs acyclic orientations"));
    }
    Ok(frame.cut_equivalent(o1.bits, o2.bits))
}

fn require_connected(g: &Multigraph, what: &str) -> Result<()> {
    if !g.is_connected() {
        return Err(Error::domain(format!("{what} requires a connected graph")));
    }
    Ok(())
}

/// `Acyc_v(Y)`: acyclic orientations whose only source is `v`.
pub fn unique_source_orientations(
    g: &Multigraph,
    v: usize,
    cap: usize,
) -> Result<Vec<Orientation>> {
    check_vertex(g, v)?;
    require_connected(g, "unique_source_orientations")?;
    reject_loops(g, "unique_source_orientations")?;
    check_cap(g, cap)?;
    let frame = Frame::new(g);
    let id = g.id();
    Ok(frame
        .acyclic_masks()
        .into_iter()
        .filter(|&bits| (0..g.vertex_count()).all(|u| (u == v) == (frame.in_edges(bits, u) == 0)))
        .map(|bits| Orientation::from_parts(id, bits))
        .collect())
}

/// Clicks sources other than `v`, smallest label first, until `v` is the
/// unique source. Returns the result and the click sequence used.
pub fn normalize_to_unique_source(
    g: &Multigraph,
    o: &Orientation,
    v: usize,
) -> Result<(Orientation, Vec<usize>)> {
    o.check_graph(g)?;
    check_vertex(g, v)?;
    require_connected(g, "normalize_to_unique_source")?;
    reject_loops(g, "normalize_to_unique_source")?;
    let frame = Frame::new(g);
    if !frame.is_acyclic(o.bits) {
        return Err(Error::domain(
            "normalize_to_unique_source needs an acyclic orientation",
        ));
    }
    let guard = 1u64
        .checked_shl(g.edge_count() as u32)
        .unwrap_or(u64::MAX)
        .saturating_mul(g.vertex_count() as u64);
    let mut bits = o.bits;
    let mut seq = Vec::new();
    while let Some(u) = (0..g.vertex_count()).find(|&u| u != v && frame.is_clickable(bits, u)) {
        if seq.len() as u64 >= guard {
            return Err(Error::Internal(format!(
                "normalize_to_unique_source did not terminate within {guard} clicks"
            )));
        }
        bits = frame.click(bits, u);
        seq.push(u);
    }
    Ok((Orientation::from_parts(o.graph, bits), seq))
}

/// Directs every edge from the earlier to the later vertex of `perm`.
pub fn orientation_from_permutation(g: &Multigraph, perm: &[usize]) -> Result<Orientation> {
    let n = g.vertex_count();
    let mut pos = vec![usize::MAX; n];
    if perm.len() != n {
        return Err(Error::domain(format!(
            "permutation has {} entries for {n} vertices",
            perm.len()
        )));
    }
    for (i, &v) in perm.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(Error::domain(
                "sequence is not a permutation of the vertices",
            ));
        }
        pos[v] = i;
    }
    let mut bits = 0u64;
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if pos[b] < pos[a] {
            bits |= 1 << e;
        }
    }
    Orientation::new(g, bits)
}
