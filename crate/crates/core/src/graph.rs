//! Abstract framed 4-graphs.
//!
//! Half-edges are numbered `4 * v + slot`. The slots of a vertex are read in
//! cyclic order and opposite slots differ by two, so `{0, 2}` and `{1, 3}` are
//! the two opposite pairs and `opposite(h) == h ^ 2`.
//!
//! For a graph built from a Gauss code the vertex of a label whose
//! occurrences sit at global positions `p < q` has slots
//! `[in(p), in(q), out(p), out(q)]`, and edge `p` runs from `out(p)` to
//! `in(next(p))`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::LinkCode;

pub type HalfEdge = usize;
pub type EdgeId = usize;
pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    In,
    Out,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("half-edge {0} is out of range")]
    OutOfRange(HalfEdge),
    #[error("half-edge {0} is covered by {1} edges")]
    Coverage(HalfEdge, usize),
}

#[inline]
pub fn vertex_of(h: HalfEdge) -> VertexId {
    h / 4
}

#[inline]
pub fn opposite(h: HalfEdge) -> HalfEdge {
    h ^ 2
}

#[inline]
pub fn slot(h: HalfEdge) -> usize {
    h % 4
}

/// Links half-edges back to Gauss code positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeOrigin {
    at_position: Vec<[HalfEdge; 2]>,
    position: Vec<(usize, Dir)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramedGraph {
    labels: Vec<u32>,
    mate: Vec<HalfEdge>,
    edge_of: Vec<EdgeId>,
    edges: Vec<(HalfEdge, HalfEdge)>,
    free_loops: usize,
    origin: Option<CodeOrigin>,
}

impl FramedGraph {
    /// Builds a graph on `n` vertices from a perfect matching of the `4n`
    /// half-edges. Vertex labels are `1..=n`.
    pub fn from_edges(n: usize, edges: &[(HalfEdge, HalfEdge)]) -> Result<Self, GraphError> {
        let total = 4 * n;
        let mut mate = vec![usize::MAX; total];
        let mut cover = vec![0usize; total];
        let mut edge_of = vec![0; total];
        for (e, &(a, b)) in edges.iter().enumerate() {
            for h in [a, b] {
                if h >= total {
                    return Err(GraphError::OutOfRange(h));
                }
                cover[h] += 1;
                edge_of[h] = e;
            }
            mate[a] = b;
            mate[b] = a;
        }
        if let Some(h) = (0..total).find(|&h| cover[h] != 1) {
            return Err(GraphError::Coverage(h, cover[h]));
        }
        Ok(FramedGraph {
            labels: (1..=n as u32).collect(),
            mate,
            edge_of,
            edges: edges.to_vec(),
            free_loops: 0,
            origin: None,
        })
    }

    pub fn from_code(code: &LinkCode) -> Self {
        let labels = code.labels();
        let occ = code.occurrences();
        let n_pos = code.total_positions();
        let mut at_position = vec![[0; 2]; n_pos];
        let mut position = vec![(0, Dir::In); 4 * labels.len()];
        for (v, label) in labels.iter().enumerate() {
            let [p, q] = occ[label];
            let (gp, gq) = (code.global_index(p), code.global_index(q));
            let base = 4 * v;
            at_position[gp] = [base, base + 2];
            at_position[gq] = [base + 1, base + 3];
            position[base] = (gp, Dir::In);
            position[base + 2] = (gp, Dir::Out);
            position[base + 1] = (gq, Dir::In);
            position[base + 3] = (gq, Dir::Out);
        }
        let mut mate = vec![0; 4 * labels.len()];
        let mut edge_of = vec![0; 4 * labels.len()];
        let mut edges = Vec::with_capacity(n_pos);
        for g in 0..n_pos {
            let pos = code.pos_of_global(g);
            let nxt = code.global_index(code.next(pos));
            let tail = at_position[g][1];
            let head = at_position[nxt][0];
            mate[tail] = head;
            mate[head] = tail;
            edge_of[tail] = g;
            edge_of[head] = g;
            edges.push((tail, head));
        }
        FramedGraph {
            labels,
            mate,
            edge_of,
            edges,
            free_loops: code.circles().iter().filter(|c| c.is_empty()).count(),
            origin: Some(CodeOrigin {
                at_position,
                position,
            }),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.mate.len()
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn label(&self, v: VertexId) -> u32 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn vertex_of_label(&self, label: u32) -> Option<VertexId> {
        self.labels.binary_search(&label).ok()
    }

    pub fn mate(&self, h: HalfEdge) -> HalfEdge {
        self.mate[h]
    }

    pub fn edge_of(&self, h: HalfEdge) -> EdgeId {
        self.edge_of[h]
    }

    /// Tail and head of an edge in its stored direction.
    pub fn edge_ends(&self, e: EdgeId) -> (HalfEdge, HalfEdge) {
        self.edges[e]
    }

    pub fn half_edges(&self, v: VertexId) -> [HalfEdge; 4] {
        [4 * v, 4 * v + 1, 4 * v + 2, 4 * v + 3]
    }

    /// Half-edge sitting at a global code position, if built from a code.
    pub fn half_edge_at(&self, position: usize, dir: Dir) -> Option<HalfEdge> {
        let o = self.origin.as_ref()?;
        let pair = o.at_position.get(position)?;
        Some(match dir {
            Dir::In => pair[0],
            Dir::Out => pair[1],
        })
    }

    /// Code position of a half-edge, if built from a code.
    pub fn position_of(&self, h: HalfEdge) -> Option<(usize, Dir)> {
        self.origin.as_ref().map(|o| o.position[h])
    }

    /// Number of connected components of the underlying graph, free loops
    /// excluded.
    pub fn graph_components(&self) -> usize {
        let n = self.vertex_count();
        let mut uf = UnionFind::new(n);
        for &(a, b) in &self.edges {
            uf.union(vertex_of(a), vertex_of(b));
        }
        uf.count()
    }

    /// Dimension of the Z2 cycle space, free loops excluded.
    pub fn cycle_space_dim(&self) -> usize {
        self.edge_count() + self.graph_components() - self.vertex_count()
    }
}

/// Unicursal components: edges joined through opposite half-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPartition {
    /// Component id of every half-edge.
    pub assignment: Vec<usize>,
    /// Number of components, free loops included.
    pub count: usize,
    /// For each component with edges, its half-edges of departure in
    /// traversal order. Components made of free loops have empty lists.
    pub traversals: Vec<Vec<HalfEdge>>,
}

impl ComponentPartition {
    pub fn of_edge(&self, graph: &FramedGraph, e: EdgeId) -> usize {
        self.assignment[graph.edge_ends(e).0]
    }

    /// Components of the two opposite pairs of a vertex.
    pub fn pair_components(&self, v: VertexId) -> (usize, usize) {
        (self.assignment[4 * v], self.assignment[4 * v + 1])
    }

    pub fn is_mixed(&self, v: VertexId) -> bool {
        let (a, b) = self.pair_components(v);
        a != b
    }

    /// Edge sets of one component.
    pub fn edges_of(&self, graph: &FramedGraph, comp: usize) -> Vec<EdgeId> {
        let mut es: Vec<EdgeId> = self.traversals[comp]
            .iter()
            .map(|&h| graph.edge_of(h))
            .collect();
        es.sort_unstable();
        es
    }
}

pub fn unicursal_components(graph: &FramedGraph) -> ComponentPartition {
    let m = graph.edge_count();
    let mut seen = vec![false; m];
    let mut assignment = vec![usize::MAX; graph.half_edge_count()];
    let mut traversals = Vec::new();
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let comp = traversals.len();
        let mut order = Vec::new();
        let first = graph.edge_ends(start).0;
        let mut exit = first;
        loop {
            let e = graph.edge_of(exit);
            seen[e] = true;
            order.push(exit);
            let arrive = graph.mate(exit);
            assignment[exit] = comp;
            assignment[arrive] = comp;
            exit = opposite(arrive);
            if exit == first {
                break;
            }
        }
        traversals.push(order);
    }
    let count = traversals.len() + graph.free_loops();
    traversals.extend((0..graph.free_loops()).map(|_| Vec::new()));
    ComponentPartition {
        assignment,
        count,
        traversals,
    }
}

/// Simple graph whose nodes are unicursal components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionGraph {
    pub nodes: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl IntersectionGraph {
    pub fn neighbors(&self, n: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == n {
                    Some(b)
                } else if b == n {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.nodes);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        uf.count() <= 1
    }
}

pub fn intersection_graph(graph: &FramedGraph, parts: &ComponentPartition) -> IntersectionGraph {
    let mut edges = BTreeSet::new();
    for v in 0..graph.vertex_count() {
        let (a, b) = parts.pair_components(v);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    IntersectionGraph {
        nodes: parts.count,
        edges,
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    pub(crate) fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{parse_code, CodeKind};

    fn graph(s: &str) -> FramedGraph {
        FramedGraph::from_code(&parse_code(s, CodeKind::Free).unwrap())
    }

    #[test]
    fn vertex_and_edge_counts() {
        for (s, v, e) in [("1 1", 1, 2), ("1 2 1 2", 2, 4), ("1 2 3 1 2 3", 3, 6)] {
            let g = graph(s);
            assert_eq!((g.vertex_count(), g.edge_count()), (v, e), "{s}");
        }
        let g = graph("*");
        assert_eq!((g.vertex_count(), g.edge_count(), g.free_loops()), (0, 0, 1));
    }

    #[test]
    fn passages_form_opposite_pairs() {
        let g = graph("1 2 3 1 2 3");
        for p in 0..6 {
            let i = g.half_edge_at(p, Dir::In).unwrap();
            let o = g.half_edge_at(p, Dir::Out).unwrap();
            assert_eq!(opposite(i), o);
            assert_eq!(g.position_of(o), Some((p, Dir::Out)));
        }
    }

    #[test]
    fn component_counts() {
        assert_eq!(unicursal_components(&graph("1 2 1 2")).count, 1);
        assert_eq!(unicursal_components(&graph("1 2 ; 1 2")).count, 2);
        assert_eq!(unicursal_components(&graph("1 1 ; * ; *")).count, 3);
    }

    #[test]
    fn hand_built_one_vertex_graph() {
        // h1-h2, h3-h4 with opposite pairs {h1,h3}, {h2,h4}: h1=0, h3=2, h2=1, h4=3.
        let g = FramedGraph::from_edges(1, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(unicursal_components(&g).count, 1);
        assert!(FramedGraph::from_edges(1, &[(0, 1), (1, 3)]).is_err());
        assert!(FramedGraph::from_edges(1, &[(0, 1), (2, 7)]).is_err());
    }

    #[test]
    fn intersection_graphs() {
        let g = graph("1 2 ; 1 2");
        let ig = intersection_graph(&g, &unicursal_components(&g));
        assert_eq!(ig.edges.iter().copied().collect::<Vec<_>>(), vec![(0, 1)]);

        let g = graph("1 2 1 2");
        let ig = intersection_graph(&g, &unicursal_components(&g));
        assert_eq!((ig.nodes, ig.edges.len()), (1, 0));

        let g = graph("1 2 ; 1 3 ; 2 3");
        let ig = intersection_graph(&g, &unicursal_components(&g));
        assert_eq!(
            ig.edges.iter().copied().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 2)]
        );
        assert!(ig.is_connected());
    }

    #[test]
    fn cycle_space_dimension() {
        let g = graph("1 2 ; 1 2");
        assert_eq!(g.cycle_space_dim(), 3);
        let g = graph("1 1 ; 2 2");
        assert_eq!(g.graph_components(), 2);
        assert_eq!(g.cycle_space_dim(), 4);
    }
}
