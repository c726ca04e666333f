//! The collapse graph of a graph and one of its cycle-edges.
//!
//! Nodes are the κ-classes of `Y`. Every κ-class of `Y/e` lifts to two
//! orientations of `Y` that differ only on `e`, one per direction of `e`,
//! and the classes of those two lifts are joined by an edge. The structure
//! checks below recount both sides of the deletion/contraction recursion
//! from this graph alone.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, Multigraph};
use crate::kappa::kappa;
use crate::orientations::{
    kappa_partition_bruteforce, nu_path, Frame, KappaPartition, Orientation, PathSpec,
};

/// Direction given to the cycle-edge `e = {v, w}`, `v < w`, by a lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lift {
    /// `e` oriented `v → w`.
    Forward,
    /// `e` oriented `w → v`.
    Backward,
}

/// `Y/e` with loops and parallels removed, and the composite id maps from
/// `Y` into it.
#[derive(Debug, Clone)]
pub struct ContractionLift {
    graph: Multigraph,
    edge: usize,
    contracted: Multigraph,
    vertex_map: Vec<usize>,
    edge_map: Vec<Option<usize>>,
}

impl ContractionLift {
    pub fn new(g: &Multigraph, e: usize) -> Result<Self> {
        match g.classify_edges().get(e) {
            None => return Err(Error::domain(format!("edge-id {e} out of range"))),
            Some(EdgeKind::CycleEdge) => {}
            Some(kind) => {
                return Err(Error::domain(format!(
                    "edge {e} is a {kind:?}, not a cycle-edge"
                )))
            }
        }
        let contracted = g.contract_edge(e)?;
        let simple = contracted.graph.simplify();
        let edge_map = contracted
            .edge_map
            .iter()
            .map(|f| f.and_then(|f| simple.edge_map[f]))
            .collect();
        Ok(ContractionLift {
            graph: g.clone(),
            edge: e,
            contracted: simple.graph,
            vertex_map: contracted.vertex_map,
            edge_map,
        })
    }

    pub fn contracted(&self) -> &Multigraph {
        &self.contracted
    }

    pub fn cycle_edge(&self) -> usize {
        self.edge
    }

    fn lift_bits(&self, below: u64, lift: Lift) -> u64 {
        let e_bit = match lift {
            Lift::Forward => 0,
            Lift::Backward => 1,
        };
        let mut bits = 0u64;
        for (f, &(a, _)) in self.graph.edges().iter().enumerate() {
            let reversed = match self.edge_map[f] {
                // e itself, or an edge parallel to it
                None => e_bit == 1,
                Some(low) => {
                    let (x, y) = self.contracted.edges()[low];
                    let tail = if below >> low & 1 == 1 { y } else { x };
                    self.vertex_map[a] != tail
                }
            };
            if reversed {
                bits |= 1 << f;
            }
        }
        bits
    }

    /// Lifts an orientation of the contracted graph, inheriting every edge
    /// other than `e`.
    pub fn lift(&self, below: &Orientation, lift: Lift) -> Result<Orientation> {
        if below.graph_id() != self.contracted.id() {
            return Err(Error::domain(
                "orientation does not belong to the contracted graph",
            ));
        }
        let bits = self.lift_bits(below.bits(), lift);
        if !Frame::new(&self.graph).is_acyclic(bits) {
            return Err(Error::Internal(format!(
                "lift of {below} along edge {} is cyclic",
                self.edge
            )));
        }
        Orientation::new(&self.graph, bits)
    }
}

/// One-shot lift of `below`, an acyclic orientation of
/// `simplify(contract_edge(g, e))`.
pub fn iota(g: &Multigraph, e: usize, below: &Orientation, lift: Lift) -> Result<Orientation> {
    ContractionLift::new(g, e)?.lift(below, lift)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapseEdge {
    /// Node of the forward lift.
    pub forward: usize,
    /// Node of the backward lift.
    pub backward: usize,
    /// Representative of the contracted-graph class that induced this edge.
    pub label: Orientation,
}

#[derive(Debug, Clone)]
pub struct CollapseGraph {
    pub cycle_edge: usize,
    pub endpoints: (usize, usize),
    /// κ-class representatives of `Y`, in partition order.
    pub nodes: Vec<Orientation>,
    pub edges: Vec<CollapseEdge>,
    partition: KappaPartition,
}

impl CollapseGraph {
    pub fn partition(&self) -> &KappaPartition {
        &self.partition
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for edge in &self.edges {
            deg[edge.forward] += 1;
            deg[edge.backward] += 1;
        }
        deg
    }

    /// `labels[node]` = component index, numbered by smallest node.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::<usize>::new(self.nodes.len());
        for edge in &self.edges {
            uf.union(edge.forward, edge.backward);
        }
        let mut seen = HashMap::new();
        (0..self.nodes.len())
            .map(|i| {
                let next = seen.len();
                *seen.entry(uf.find(i)).or_insert(next)
            })
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.component_labels()
            .into_iter()
            .collect::<HashSet<_>>()
            .len()
    }

    pub fn to_dot(&self) -> String {
        let (v, w) = self.endpoints;
        let mut out = String::from("graph collapse {\n");
        let _ = writeln!(out, "  label=\"edge {} {{{v},{w}}}\";", self.cycle_edge);
        for (i, rep) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{:x}\"];", rep.bits());
        }
        for edge in &self.edges {
            let _ = writeln!(
                out,
                "  n{} -- n{} [label=\"{:x}\"];",
                edge.forward,
                edge.backward,
                edge.label.bits()
            );
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_collapse_graph(g: &Multigraph, e: usize, cap: usize) -> Result<CollapseGraph> {
    if !g.is_simple() {
        return Err(Error::domain("collapse graph needs a simple graph"));
    }
    if !g.is_connected() {
        return Err(Error::domain("collapse graph needs a connected graph"));
    }
    let lift = ContractionLift::new(g, e)?;
    let upper = kappa_partition_bruteforce(g, cap)?;
    let lower = kappa_partition_bruteforce(lift.contracted(), cap)?;

    let class_of = |below: &Orientation, dir: Lift| -> Result<usize> {
        let up = lift.lift(below, dir)?;
        upper
            .class_of(&up)
            .ok_or_else(|| Error::Internal(format!("lift {up} is not in the partition")))
    };

    let mut edges = Vec::with_capacity(lower.len());
    for class in lower.classes() {
        let rep = class[0];
        let forward = class_of(&rep, Lift::Forward)?;
        let backward = class_of(&rep, Lift::Backward)?;
        for member in &class[1..] {
            if class_of(member, Lift::Forward)? != forward
                || class_of(member, Lift::Backward)? != backward
            {
                return Err(Error::Internal(format!(
                    "lifts of class {rep} do not land in a single class"
                )));
            }
        }
        edges.push(CollapseEdge {
            forward,
            backward,
            label: rep,
        });
    }
    Ok(CollapseGraph {
        cycle_edge: e,
        endpoints: g.edge(e)?,
        nodes: upper.representatives(),
        edges,
        partition: upper,
    })
}

/// A simple closed path that starts by traversing `e` from its smaller
/// endpoint to its larger one. `None` if `e` lies on no cycle.
pub fn closed_path_through(g: &Multigraph, e: usize) -> Result<Option<PathSpec>> {
    let (v, w) = g.edge(e)?;
    if v == w {
        return Ok(None);
    }
    let inc = g.incidence();
    // BFS from w back to v without using e
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[w] = true;
    let mut queue = VecDeque::from([w]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            break;
        }
        for &(f, y) in &inc[x] {
            if f != e && !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, f));
                queue.push_back(y);
            }
        }
    }
    if !seen[v] {
        return Ok(None);
    }
    let mut back = Vec::new();
    let mut cur = v;
    while let Some((prev, f)) = parent[cur] {
        back.push((prev, f));
        cur = prev;
    }
    back.reverse();
    // back = [(w, f1), (p1, f2), ...] walking w -> ... -> v
    let mut vertices = vec![v];
    let mut edges = vec![e];
    for (x, f) in back {
        vertices.push(x);
        edges.push(f);
    }
    PathSpec::with_edges(g, vertices, true, edges).map(Some)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapseReport {
    pub cycle_edge: usize,
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub max_degree: usize,
    pub kappa_deleted: u64,
    pub kappa_contracted: u64,
    pub violations: Vec<Violation>,
}

impl CollapseReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the collapse graph against its structural guarantees: a simple,
/// loop-free disjoint union of paths whose components match the κ-classes
/// of `Y − e` and whose edges match the κ-classes of `Y / e`.
pub fn verify_collapse_structure(
    cg: &CollapseGraph,
    g: &Multigraph,
    e: usize,
    cap: usize,
) -> Result<CollapseReport> {
    if cg.cycle_edge != e
        || cg.partition.class_of(&cg.nodes[0]).is_none()
        || cg.nodes[0].graph_id() != g.id()
    {
        return Err(Error::domain(
            "collapse graph was not built from this graph and edge",
        ));
    }
    let mut violations = Vec::new();
    let mut flag =
        |property: &'static str, detail: String| violations.push(Violation { property, detail });

    for edge in &cg.edges {
        if edge.forward == edge.backward {
            flag(
                "no-self-loops",
                format!("class {} lifts to a single node", edge.label),
            );
        }
    }
    let mut pairs = HashSet::new();
    for edge in &cg.edges {
        let pair = (
            edge.forward.min(edge.backward),
            edge.forward.max(edge.backward),
        );
        if !pairs.insert(pair) {
            flag("simple", format!("nodes {pair:?} joined more than once"));
        }
    }
    let degrees = cg.degrees();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    if max_degree > 2 {
        flag(
            "degree-at-most-two",
            format!("a node has degree {max_degree}"),
        );
    }

    let labels = cg.component_labels();
    let components = cg.component_count();
    let mut node_count = vec![0usize; components];
    let mut edge_count = vec![0usize; components];
    for &c in &labels {
        node_count[c] += 1;
    }
    for edge in &cg.edges {
        edge_count[labels[edge.forward]] += 1;
    }
    for c in 0..components {
        if edge_count[c] + 1 != node_count[c] {
            flag(
                "component-is-path",
                format!(
                    "component {c} has {} nodes and {} edges",
                    node_count[c], edge_count[c]
                ),
            );
        }
    }

    let deleted = g.delete_edge(e)?;
    let lift = ContractionLift::new(g, e)?;
    let kappa_deleted = kappa(&deleted.graph)?.value;
    let kappa_contracted = kappa(lift.contracted())?.value;
    if components as u64 != kappa_deleted {
        flag(
            "components-equal-kappa-of-deletion",
            format!("{components} components, κ(Y − e) = {kappa_deleted}"),
        );
    }
    if cg.edges.len() as u64 != kappa_contracted {
        flag(
            "edges-equal-kappa-of-contraction",
            format!("{} edges, κ(Y / e) = {kappa_contracted}", cg.edges.len()),
        );
    }

    // Components must be exactly the classes that merge once e is deleted.
    let below = kappa_partition_bruteforce(&deleted.graph, cap)?;
    let mut comp_class: HashMap<usize, usize> = HashMap::new();
    let mut class_comp: HashMap<usize, usize> = HashMap::new();
    for (node, rep) in cg.nodes.iter().enumerate() {
        let mut bits = 0u64;
        for (f, target) in deleted.edge_map.iter().enumerate() {
            if let Some(t) = target {
                bits |= (rep.bits() >> f & 1) << t;
            }
        }
        let class = below
            .class_of(&Orientation::new(&deleted.graph, bits)?)
            .ok_or_else(|| {
                Error::Internal("restriction of an acyclic orientation is cyclic".into())
            })?;
        let comp = labels[node];
        if *comp_class.entry(comp).or_insert(class) != class {
            flag(
                "component-within-one-deletion-class",
                format!("component {comp} spans several classes of Y − e"),
            );
        }
        if *class_comp.entry(class).or_insert(comp) != comp {
            flag(
                "deletion-class-within-one-component",
                format!("class {class} of Y − e spans several components"),
            );
        }
    }
    if class_comp.len() != below.len() {
        flag(
            "components-cover-deletion-classes",
            format!(
                "{} of {} classes of Y − e reached",
                class_comp.len(),
                below.len()
            ),
        );
    }

    // Forward lifts sit exactly 2 above backward lifts on a closed path
    // through e, and ν is constant on classes.
    if let Some(path) = closed_path_through(g, e)? {
        let nu_of = |o: &Orientation| nu_path(g, o, &path);
        for edge in &cg.edges {
            let up = nu_of(&cg.nodes[edge.forward])?;
            let down = nu_of(&cg.nodes[edge.backward])?;
            if up - down != 2 {
                flag(
                    "nu-step-across-edge",
                    format!(
                        "ν differs by {} across the edge labeled {}",
                        up - down,
                        edge.label
                    ),
                );
            }
        }
    }

    // Acyclicity: a forest has exactly nodes − components edges.
    if cg.edges.len() + components != cg.nodes.len() {
        flag(
            "acyclic",
            format!(
                "{} nodes, {} edges, {components} components",
                cg.nodes.len(),
                cg.edges.len()
            ),
        );
    }

    Ok(CollapseReport {
        cycle_edge: e,
        nodes: cg.nodes.len(),
        edges: cg.edges.len(),
        components,
        max_degree,
        kappa_deleted,
        kappa_contracted,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orientations::{enumerate_acyclic, DEFAULT_BRUTE_FORCE_CAP as CAP};

    #[test]
    fn triangle_lifts() {
        let tri = Multigraph::cycle(3);
        let lift = ContractionLift::new(&tri, 0).unwrap();
        assert_eq!(lift.contracted().edge_count(), 1);
        let below = enumerate_acyclic(lift.contracted(), CAP).unwrap();
        assert_eq!(below.len(), 2);
        for o in &below {
            let up = lift.lift(o, Lift::Forward).unwrap();
            let down = lift.lift(o, Lift::Backward).unwrap();
            assert!(!up.is_reversed(0));
            assert_eq!(up.bits() ^ down.bits(), 1);
            let path = closed_path_through(&tri, 0).unwrap().unwrap();
            assert_eq!(
                nu_path(&tri, &up, &path).unwrap(),
                nu_path(&tri, &down, &path).unwrap() + 2
            );
        }
        let bits: HashSet<u64> = below
            .iter()
            .map(|o| lift.lift(o, Lift::Forward).unwrap().bits())
            .collect();
        assert_eq!(bits.len(), 2);
    }

    #[test]
    fn lifts_reject_bridges() {
        let p = Multigraph::path(3);
        assert!(matches!(
            ContractionLift::new(&p, 0),
            Err(Error::InputDomain(_))
        ));
    }

    #[test]
    fn c4_is_a_three_node_path() {
        let c4 = Multigraph::cycle(4);
        for e in 0..4 {
            let cg = build_collapse_graph(&c4, e, CAP).unwrap();
            assert_eq!(cg.nodes.len(), 3);
            assert_eq!(cg.edges.len(), 2);
            let mut deg = cg.degrees();
            deg.sort_unstable();
            assert_eq!(deg, vec![1, 1, 2]);
            let report = verify_collapse_structure(&cg, &c4, e, CAP).unwrap();
            assert!(report.ok(), "{report:?}");
            assert_eq!((report.components, report.edges), (1, 2));
        }
    }

    #[test]
    fn triangle_is_a_single_edge() {
        let tri = Multigraph::cycle(3);
        let cg = build_collapse_graph(&tri, 1, CAP).unwrap();
        assert_eq!((cg.nodes.len(), cg.edges.len()), (2, 1));
        assert!(cg.to_dot().contains("n0 -- n1") || cg.to_dot().contains("n1 -- n0"));
    }

    #[test]
    fn c5_report() {
        let c5 = Multigraph::cycle(5);
        let cg = build_collapse_graph(&c5, 2, CAP).unwrap();
        let report = verify_collapse_structure(&cg, &c5, 2, CAP).unwrap();
        assert!(report.ok());
        assert_eq!((report.nodes, report.edges, report.components), (4, 3, 1));
    }

    #[test]
    fn k4_counts_match_the_engine() {
        let k4 = Multigraph::complete(4);
        for e in 0..6 {
            let cg = build_collapse_graph(&k4, e, CAP).unwrap();
            let report = verify_collapse_structure(&cg, &k4, e, CAP).unwrap();
            assert!(report.ok(), "{report:?}");
            // K4 − e has κ = 4 (T(K4−e; 1, 0)); K4 / e simplified is a triangle.
            assert_eq!(report.kappa_deleted, 4);
            assert_eq!(report.kappa_contracted, 2);
            assert_eq!(report.components, 4);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let split = Multigraph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(build_collapse_graph(&split, 0, CAP).is_err());
        let multi = Multigraph::new(3, [(0, 1), (0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(build_collapse_graph(&multi, 2, CAP).is_err());
        assert!(build_collapse_graph(&Multigraph::complete(5), 0, 8).is_err());
    }

    #[test]
    fn closed_paths() {
        let tail = Multigraph::new(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let p = closed_path_through(&tail, 0).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(p.edges, vec![0, 1, 2]);
        assert!(closed_path_through(&tail, 3).unwrap().is_none());
    }

    #[test]
    fn parallel_edges_follow_the_cycle_edge() {
        let multi = Multigraph::new(3, [(0, 1), (0, 1), (1, 2), (0, 2)]).unwrap();
        let lift = ContractionLift::new(&multi, 0).unwrap();
        for o in enumerate_acyclic(lift.contracted(), CAP).unwrap() {
            let up = lift.lift(&o, Lift::Backward).unwrap();
            assert!(up.is_reversed(0) && up.is_reversed(1));
        }
    }
}
