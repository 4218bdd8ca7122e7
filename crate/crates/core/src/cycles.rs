//! Closed walks on framed graphs and the Z2 cycle space.
//!
//! A [`CycleWalk`] is a cyclic list of vertex visits. Each visit names the
//! half-edge it arrives through and the half-edge it leaves through; the
//! visit is transversal when these are opposite and a rotation otherwise.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::LinkCode;
use crate::gf2::{Eliminator, Gf2Vec};
use crate::graph::{
    intersection_graph, opposite, unicursal_components, vertex_of, ComponentPartition, Dir, EdgeId,
    FramedGraph, HalfEdge, IntersectionGraph, VertexId,
};
use crate::moves::{apply_move_traced, resolve_r3, Move};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("vertex {0} is a mixed crossing; halves are defined at self-crossings only")]
    MixedCrossing(u32),
    #[error("visit {0} enters and leaves through the same half-edge")]
    Backtrack(usize),
    #[error("visit {0} uses half-edges of different vertices")]
    SplitVisit(usize),
    #[error("visit {0} does not continue along the edge left by the previous visit")]
    Broken(usize),
    #[error("target is not an even-degree edge set")]
    NotACycle,
    #[error("target is not in the span of the generating family")]
    NotInSpan,
    #[error("walk text: {0}")]
    Syntax(String),
    #[error("walk passes a crossing removed by the move and cannot be rerouted")]
    NotTransportable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PassageTag {
    Rotation,
    Transversal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Visit {
    pub enter: HalfEdge,
    pub exit: HalfEdge,
}

impl Visit {
    pub fn vertex(&self) -> VertexId {
        vertex_of(self.enter)
    }

    pub fn tag(&self) -> PassageTag {
        if opposite(self.enter) == self.exit {
            PassageTag::Transversal
        } else {
            PassageTag::Rotation
        }
    }

    pub fn reversed(self) -> Visit {
        Visit {
            enter: self.exit,
            exit: self.enter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleWalk {
    visits: Vec<Visit>,
}

/// Rotation and transversal visit counts at one vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassageCount {
    pub rotations: usize,
    pub transversals: usize,
}

impl CycleWalk {
    /// Checks that the visits close up into a walk on `graph`.
    pub fn new(graph: &FramedGraph, visits: Vec<Visit>) -> Result<Self, CycleError> {
        let n = visits.len();
        for (i, v) in visits.iter().enumerate() {
            if v.enter == v.exit {
                return Err(CycleError::Backtrack(i));
            }
            if vertex_of(v.enter) != vertex_of(v.exit) {
                return Err(CycleError::SplitVisit(i));
            }
            let next = &visits[(i + 1) % n];
            if graph.mate(v.exit) != next.enter {
                return Err(CycleError::Broken((i + 1) % n));
            }
        }
        Ok(CycleWalk { visits })
    }

    /// The empty walk, used for crossing-free circles.
    pub fn empty() -> Self {
        CycleWalk { visits: Vec::new() }
    }

    pub fn visits(&self) -> &[Visit] {
        &self.visits
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    /// Edges in walk order; edge `i` leaves visit `i`.
    pub fn edges(&self, graph: &FramedGraph) -> Vec<EdgeId> {
        self.visits.iter().map(|v| graph.edge_of(v.exit)).collect()
    }

    pub fn class(&self, graph: &FramedGraph) -> CycleClass {
        CycleClass(Gf2Vec::from_ones(graph.edge_count(), self.edges(graph)))
    }

    pub fn transversal_count(&self) -> usize {
        self.visits
            .iter()
            .filter(|v| v.tag() == PassageTag::Transversal)
            .count()
    }

    /// Vertices of rotation visits, with multiplicity.
    pub fn rotation_vertices(&self) -> Vec<VertexId> {
        self.visits
            .iter()
            .filter(|v| v.tag() == PassageTag::Rotation)
            .map(Visit::vertex)
            .collect()
    }

    pub fn reversed(&self) -> CycleWalk {
        CycleWalk {
            visits: self.visits.iter().rev().map(|v| v.reversed()).collect(),
        }
    }

    /// Text form `v<label>:<R|T> e<edge> ...`.
    pub fn to_text(&self, graph: &FramedGraph) -> String {
        let mut s = String::new();
        for (i, v) in self.visits.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let tag = match v.tag() {
                PassageTag::Rotation => 'R',
                PassageTag::Transversal => 'T',
            };
            let _ = write!(s, "v{}:{} e{}", graph.label(v.vertex()), tag, graph.edge_of(v.exit));
        }
        s
    }

    /// Parses the text form, recovering half-edges from vertex, tag and edge.
    pub fn parse(graph: &FramedGraph, text: &str) -> Result<Self, CycleError> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if !toks.len().is_multiple_of(2) {
            return Err(CycleError::Syntax("expected vertex/edge pairs".into()));
        }
        let mut items = Vec::new();
        for pair in toks.chunks(2) {
            let (vt, et) = (pair[0], pair[1]);
            let bad = || CycleError::Syntax(format!("bad item `{vt} {et}`"));
            let (vpart, tag) = vt.strip_prefix('v').and_then(|r| r.split_once(':')).ok_or_else(bad)?;
            let label: u32 = vpart.parse().map_err(|_| bad())?;
            let v = graph.vertex_of_label(label).ok_or_else(bad)?;
            let tag = match tag {
                "R" => PassageTag::Rotation,
                "T" => PassageTag::Transversal,
                _ => return Err(bad()),
            };
            let e: EdgeId = et
                .strip_prefix('e')
                .and_then(|r| r.parse().ok())
                .filter(|&e| e < graph.edge_count())
                .ok_or_else(bad)?;
            items.push((v, tag, e));
        }
        if items.is_empty() {
            return Ok(CycleWalk::empty());
        }
        let mut exits = Vec::with_capacity(items.len());
        if let Some(visits) = parse_search(graph, &items, &mut exits) {
            return Ok(CycleWalk { visits });
        }
        Err(CycleError::Syntax("items do not form a closed walk".into()))
    }

    /// Per-vertex passage counts; repeated visits count repeatedly.
    pub fn passage_profile(&self) -> BTreeMap<VertexId, PassageCount> {
        passage_profile(self)
    }
}

fn ends_at(graph: &FramedGraph, e: EdgeId, v: VertexId) -> Vec<HalfEdge> {
    let (a, b) = graph.edge_ends(e);
    let mut out = Vec::new();
    if vertex_of(a) == v {
        out.push(a);
    }
    if vertex_of(b) == v && b != a {
        out.push(b);
    }
    out
}

fn parse_search(
    graph: &FramedGraph,
    items: &[(VertexId, PassageTag, EdgeId)],
    exits: &mut Vec<HalfEdge>,
) -> Option<Vec<Visit>> {
    let i = exits.len();
    let n = items.len();
    if i == n {
        let visits: Vec<Visit> = (0..n)
            .map(|k| Visit {
                enter: graph.mate(exits[(k + n - 1) % n]),
                exit: exits[k],
            })
            .collect();
        let ok = visits.iter().zip(items).all(|(v, &(vx, tag, _))| {
            v.enter != v.exit && v.vertex() == vx && vertex_of(v.exit) == vx && v.tag() == tag
        });
        return ok.then_some(visits);
    }
    let (v, tag, e) = items[i];
    for x in ends_at(graph, e, v) {
        if i > 0 {
            let enter = graph.mate(exits[i - 1]);
            let vis = Visit { enter, exit: x };
            if vertex_of(enter) != v || enter == x || vis.tag() != tag {
                continue;
            }
        }
        exits.push(x);
        if let Some(r) = parse_search(graph, items, exits) {
            return Some(r);
        }
        exits.pop();
    }
    None
}

pub fn passage_profile(walk: &CycleWalk) -> BTreeMap<VertexId, PassageCount> {
    let mut m: BTreeMap<VertexId, PassageCount> = BTreeMap::new();
    for v in &walk.visits {
        let c = m.entry(v.vertex()).or_default();
        match v.tag() {
            PassageTag::Rotation => c.rotations += 1,
            PassageTag::Transversal => c.transversals += 1,
        }
    }
    m
}

/// A Z2 vector over the edges of a framed graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleClass(pub Gf2Vec);

impl CycleClass {
    pub fn zero(graph: &FramedGraph) -> Self {
        CycleClass(Gf2Vec::zeros(graph.edge_count()))
    }

    pub fn from_edges(graph: &FramedGraph, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        CycleClass(Gf2Vec::from_ones(graph.edge_count(), edges))
    }

    /// Every vertex meets the edge set an even number of times.
    pub fn is_cycle(&self, graph: &FramedGraph) -> bool {
        (0..graph.vertex_count()).all(|v| {
            graph
                .half_edges(v)
                .iter()
                .filter(|&&h| self.0.get(graph.edge_of(h)))
                .count()
                % 2
                == 0
        })
    }

    /// True when the class turns at `v`: the opposite slots of one pair
    /// disagree in membership.
    pub fn rotates_at(&self, graph: &FramedGraph, v: VertexId) -> bool {
        let s = |k: usize| self.0.get(graph.edge_of(4 * v + k));
        s(0) != s(2)
    }

    pub fn add(&mut self, other: &CycleClass) {
        self.0.xor_assign(&other.0);
    }
}

/// Follows opposite half-edges from `exit` until arriving at `target`.
/// Returns the transversal visits passed and the arrival half-edge.
fn trace_until(graph: &FramedGraph, exit: HalfEdge, target: VertexId) -> (Vec<Visit>, HalfEdge) {
    let mut visits = Vec::new();
    let mut h = exit;
    loop {
        let arrive = graph.mate(h);
        if vertex_of(arrive) == target {
            return (visits, arrive);
        }
        visits.push(Visit {
            enter: arrive,
            exit: opposite(arrive),
        });
        h = opposite(arrive);
    }
}

/// The two halves at a self-crossing, both rotating at `v`.
pub fn halves(
    graph: &FramedGraph,
    parts: &ComponentPartition,
    v: VertexId,
) -> Result<(CycleWalk, CycleWalk), CycleError> {
    if parts.is_mixed(v) {
        return Err(CycleError::MixedCrossing(graph.label(v)));
    }
    let start = 4 * v + 2;
    let (inner, arrive) = trace_until(graph, start, v);
    debug_assert!(arrive != opposite(start));
    let mut first = vec![Visit {
        enter: arrive,
        exit: start,
    }];
    first.extend(inner);
    let start2 = opposite(arrive);
    let (inner2, arrive2) = trace_until(graph, start2, v);
    debug_assert_eq!(arrive2, 4 * v);
    let mut second = vec![Visit {
        enter: arrive2,
        exit: start2,
    }];
    second.extend(inner2);
    Ok((CycleWalk { visits: first }, CycleWalk { visits: second }))
}

/// The whole unicursal component as a walk going straight everywhere.
pub fn component_walk(parts: &ComponentPartition, comp: usize) -> CycleWalk {
    CycleWalk {
        visits: parts.traversals[comp]
            .iter()
            .map(|&h| Visit {
                enter: opposite(h),
                exit: h,
            })
            .collect(),
    }
}

struct Arcs<'a> {
    graph: &'a FramedGraph,
    parts: &'a ComponentPartition,
    forward: Vec<bool>,
}

impl<'a> Arcs<'a> {
    fn new(graph: &'a FramedGraph, parts: &'a ComponentPartition) -> Self {
        let mut forward = vec![false; graph.half_edge_count()];
        for t in &parts.traversals {
            for &h in t {
                forward[h] = true;
            }
        }
        Arcs {
            graph,
            parts,
            forward,
        }
    }

    /// Leaving half-edge of `comp` at a vertex it passes once.
    fn exit_of(&self, comp: usize, v: VertexId) -> HalfEdge {
        self.graph
            .half_edges(v)
            .into_iter()
            .find(|&h| self.parts.assignment[h] == comp && self.forward[h])
            .expect("component passes the vertex")
    }

    /// Arc of `comp` from `from` to `to` in traversal direction.
    fn arc(&self, comp: usize, from: VertexId, to: VertexId) -> (HalfEdge, Vec<Visit>, HalfEdge) {
        let x = self.exit_of(comp, from);
        let (inner, arrive) = trace_until(self.graph, x, to);
        (x, inner, arrive)
    }

    fn bigon(&self, ci: usize, cj: usize, v: VertexId, w: VertexId) -> CycleWalk {
        let (xi, inner_i, arr_i) = self.arc(ci, v, w);
        let (xj, inner_j, arr_j) = self.arc(cj, v, w);
        let mut visits = vec![Visit {
            enter: xj,
            exit: xi,
        }];
        visits.extend(inner_i);
        visits.push(Visit {
            enter: arr_i,
            exit: arr_j,
        });
        visits.extend(inner_j.into_iter().rev().map(Visit::reversed));
        CycleWalk { visits }
    }

    /// Walk through the given components in cyclic order, turning at the
    /// given crossing between consecutive ones.
    fn cycle_through(&self, comps: &[usize], turns: &[VertexId]) -> CycleWalk {
        let k = comps.len();
        let arcs: Vec<_> = (0..k)
            .map(|t| self.arc(comps[(t + 1) % k], turns[t], turns[(t + 1) % k]))
            .collect();
        let mut visits = Vec::new();
        for t in 0..k {
            let (x, inner, _) = &arcs[t];
            let prev_arrival = arcs[(t + k - 1) % k].2;
            visits.push(Visit {
                enter: prev_arrival,
                exit: *x,
            });
            visits.extend(inner.iter().copied());
        }
        CycleWalk { visits }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    Half { vertex: VertexId, which: u8 },
    Bigon { components: (usize, usize), crossings: (VertexId, VertexId) },
    IntersectionCycle { components: Vec<usize> },
    ComponentLoop { component: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub kind: FamilyKind,
    pub walk: CycleWalk,
}

/// Fundamental cycles of a depth-first spanning forest, roots taken in
/// increasing node order. Each cycle is listed from the ancestor down.
pub fn fundamental_cycles(ig: &IntersectionGraph) -> Vec<Vec<usize>> {
    let n = ig.nodes;
    let adj: Vec<Vec<usize>> = (0..n).map(|u| ig.neighbors(u)).collect();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree = std::collections::BTreeSet::new();
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut stack = vec![(root, 0usize)];
        while let Some((u, i)) = stack.pop() {
            if i < adj[u].len() {
                stack.push((u, i + 1));
                let w = adj[u][i];
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent[w] = u;
                    tree.insert((u.min(w), u.max(w)));
                    stack.push((w, 0));
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for &(a, b) in &ig.edges {
        if tree.contains(&(a, b)) {
            continue;
        }
        let (top, mut low) = if depth[a] < depth[b] { (a, b) } else { (b, a) };
        let mut path = vec![low];
        while low != top {
            low = parent[low];
            path.push(low);
        }
        path.reverse();
        cycles.push(path);
    }
    cycles
}

/// Halves at every self-crossing, one bigon per pair of mixed crossings
/// joining the same two components, one walk per fundamental cycle of the
/// intersection graph, and the whole component for every component that has
/// no self-crossing.
pub fn generating_family(graph: &FramedGraph) -> Vec<FamilyMember> {
    let parts = unicursal_components(graph);
    generating_family_with(graph, &parts)
}

pub fn generating_family_with(graph: &FramedGraph, parts: &ComponentPartition) -> Vec<FamilyMember> {
    let mut out = Vec::new();
    let n = graph.vertex_count();
    for v in 0..n {
        if let Ok((a, b)) = halves(graph, parts, v) {
            out.push(FamilyMember {
                kind: FamilyKind::Half { vertex: v, which: 1 },
                walk: a,
            });
            out.push(FamilyMember {
                kind: FamilyKind::Half { vertex: v, which: 2 },
                walk: b,
            });
        }
    }
    let arcs = Arcs::new(graph, parts);
    let mut mixed: BTreeMap<(usize, usize), Vec<VertexId>> = BTreeMap::new();
    for v in 0..n {
        let (a, b) = parts.pair_components(v);
        if a != b {
            mixed.entry((a.min(b), a.max(b))).or_default().push(v);
        }
    }
    for (&(ci, cj), vs) in &mixed {
        for (i, &v) in vs.iter().enumerate() {
            for &w in &vs[i + 1..] {
                out.push(FamilyMember {
                    kind: FamilyKind::Bigon {
                        components: (ci, cj),
                        crossings: (v, w),
                    },
                    walk: arcs.bigon(ci, cj, v, w),
                });
            }
        }
    }
    let ig = intersection_graph(graph, parts);
    for comps in fundamental_cycles(&ig) {
        let k = comps.len();
        let turns: Vec<VertexId> = (0..k)
            .map(|t| {
                let (a, b) = (comps[t], comps[(t + 1) % k]);
                mixed[&(a.min(b), a.max(b))][0]
            })
            .collect();
        let walk = arcs.cycle_through(&comps, &turns);
        out.push(FamilyMember {
            kind: FamilyKind::IntersectionCycle { components: comps },
            walk,
        });
    }
    for comp in 0..parts.traversals.len() {
        if parts.traversals[comp].is_empty() {
            continue;
        }
        let has_self = (0..n).any(|v| {
            let (a, b) = parts.pair_components(v);
            a == comp && b == comp
        });
        if !has_self {
            out.push(FamilyMember {
                kind: FamilyKind::ComponentLoop { component: comp },
                walk: component_walk(parts, comp),
            });
        }
    }
    out
}

/// Coefficients expressing a cycle class over the generating family.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub family: Vec<FamilyMember>,
    pub coefficients: Gf2Vec,
    /// Self-crossings whose rotation was removed by adding a half.
    pub eliminated: Vec<VertexId>,
}

impl Decomposition {
    pub fn reconstruct(&self, graph: &FramedGraph) -> CycleClass {
        let mut sum = CycleClass::zero(graph);
        for i in self.coefficients.ones() {
            sum.add(&self.family[i].walk.class(graph));
        }
        sum
    }
}

/// Writes `target` over the generating family. Rotations at self-crossings
/// are removed first by adding the half through the turn; the remainder is
/// solved by elimination over the family.
pub fn decompose_cycle(graph: &FramedGraph, target: &CycleClass) -> Result<Decomposition, CycleError> {
    if !target.is_cycle(graph) {
        return Err(CycleError::NotACycle);
    }
    let parts = unicursal_components(graph);
    let family = generating_family_with(graph, &parts);
    let classes: Vec<CycleClass> = family.iter().map(|m| m.walk.class(graph)).collect();
    let mut coefficients = Gf2Vec::zeros(family.len());
    let mut current = target.clone();
    let mut eliminated = Vec::new();
    for (i, m) in family.iter().enumerate() {
        if let FamilyKind::Half { vertex, which: 1 } = m.kind {
            if current.rotates_at(graph, vertex) {
                current.add(&classes[i]);
                coefficients.flip(i);
                eliminated.push(vertex);
            }
        }
    }
    debug_assert!((0..graph.vertex_count())
        .all(|v| parts.is_mixed(v) || !current.rotates_at(graph, v)));
    let mut el = Eliminator::new(family.len());
    for (i, c) in classes.iter().enumerate() {
        el.insert(i, &c.0);
    }
    let combo = el.solve(&current.0).ok_or(CycleError::NotInSpan)?;
    coefficients.xor_assign(&combo);
    Ok(Decomposition {
        family,
        coefficients,
        eliminated,
    })
}

/// Rank of the span of the generating family.
pub fn family_rank(graph: &FramedGraph) -> usize {
    let family = generating_family(graph);
    let mut el = Eliminator::new(family.len());
    for (i, m) in family.iter().enumerate() {
        el.insert(i, &m.walk.class(graph).0);
    }
    el.rank()
}

/// Carries a walk across a move. Outside the move site the walk is kept
/// as it is; new crossings on its edges are passed straight through, and
/// removed crossings it passed straight through are dropped. Across an R3
/// site each stretch between two outer legs is replaced by the shortest
/// route between the same legs in the moved triangle.
pub fn transport_cycle(before: &LinkCode, mv: &Move, walk: &CycleWalk) -> Result<CycleWalk, CycleError> {
    let (after, trace) = apply_move_traced(before, mv).map_err(|_| CycleError::NotTransportable)?;
    if walk.is_empty() {
        return Ok(CycleWalk::empty());
    }
    let g0 = FramedGraph::from_code(before);
    let g1 = FramedGraph::from_code(&after);
    let pos = |h: HalfEdge| g0.position_of(h).expect("graph built from a code");
    let at = |p: usize, d: Dir| g1.half_edge_at(p, d).expect("graph built from a code");
    let visits = if let Move::R3 { .. } = mv {
        let arcs = resolve_r3(before, mv).map_err(|_| CycleError::NotTransportable)?;
        transport_r3(&after, &g0, &g1, arcs, walk)?
    } else {
        let mut kept = Vec::new();
        for v in walk.visits() {
            let ((pe, de), (px, dx)) = (pos(v.enter), pos(v.exit));
            match (trace.old_to_new[pe], trace.old_to_new[px]) {
                (Some(ne), Some(nx)) => kept.push(Visit {
                    enter: at(ne, de),
                    exit: at(nx, dx),
                }),
                _ if v.tag() == PassageTag::Transversal => {}
                _ => return Err(CycleError::NotTransportable),
            }
        }
        if kept.is_empty() {
            return Ok(CycleWalk::empty());
        }
        let inserted: std::collections::BTreeSet<usize> = trace.inserted.iter().copied().collect();
        let n = kept.len();
        let mut out = Vec::new();
        for i in 0..n {
            out.push(kept[i]);
            let target = kept[(i + 1) % n].enter;
            let mut h = kept[i].exit;
            loop {
                let a = g1.mate(h);
                if a == target {
                    break;
                }
                let (p, _) = g1.position_of(a).expect("graph built from a code");
                if !inserted.contains(&p) || out.len() > 4 * g1.half_edge_count() {
                    return Err(CycleError::NotTransportable);
                }
                out.push(Visit {
                    enter: a,
                    exit: opposite(a),
                });
                h = opposite(a);
            }
        }
        out
    };
    CycleWalk::new(&g1, visits).map_err(|_| CycleError::NotTransportable)
}

fn transport_r3(
    after: &LinkCode,
    g0: &FramedGraph,
    g1: &FramedGraph,
    arcs: [usize; 3],
    walk: &CycleWalk,
) -> Result<Vec<Visit>, CycleError> {
    let pos = |h: HalfEdge| g0.position_of(h).expect("graph built from a code");
    let at = |p: usize, d: Dir| g1.half_edge_at(p, d).expect("graph built from a code");
    let next_of = |p: usize| after.global_index(after.next(after.pos_of_global(p)));
    let label_after = |p: usize| after.token(after.pos_of_global(p)).label;
    let site_labels: Vec<u32> = arcs
        .iter()
        .flat_map(|&a| [label_after(a), label_after(next_of(a))])
        .collect();
    let arc_between = |u: u32, w: u32| {
        arcs.iter()
            .copied()
            .find(|&a| {
                let (x, y) = (label_after(a), label_after(next_of(a)));
                (x == u && y == w) || (x == w && y == u)
            })
            .expect("triangle joins every pair")
    };
    // half-edge of `u` on the triangle side shared with `w`, in the moved code
    let inner = |u: u32, w: u32| {
        let a = arc_between(u, w);
        if label_after(a) == u {
            at(a, Dir::Out)
        } else {
            at(next_of(a), Dir::In)
        }
    };
    let internal: Vec<EdgeId> = arcs.to_vec();
    let vs = walk.visits();
    let n = vs.len();
    let is_internal = |i: usize| internal.contains(&g0.edge_of(vs[i].exit));
    let label0 = |v: &Visit| g0.label(v.vertex());
    let Some(start) = (0..n).find(|&i| !is_internal((i + n - 1) % n)) else {
        // the walk runs round the triangle only
        let seq: Vec<u32> = vs.iter().map(label0).collect();
        return Ok((0..n)
            .map(|i| {
                let (prev, cur, next) = (seq[(i + n - 1) % n], seq[i], seq[(i + 1) % n]);
                Visit {
                    enter: inner(cur, prev),
                    exit: inner(cur, next),
                }
            })
            .collect());
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let first = (start + i) % n;
        let mut len = 1;
        while is_internal((start + i + len - 1) % n) {
            len += 1;
        }
        let last = (start + i + len - 1) % n;
        let on_site = site_labels.contains(&label0(&vs[first]));
        let ((pe, de), (px, dx)) = (pos(vs[first].enter), pos(vs[last].exit));
        if !on_site {
            debug_assert_eq!(len, 1);
            out.push(Visit {
                enter: at(pe, de),
                exit: at(px, dx),
            });
        } else {
            if (pe, de) == (px, dx) {
                return Err(CycleError::NotTransportable);
            }
            let (u, w) = (label_after(pe), label_after(px));
            if u == w {
                out.push(Visit {
                    enter: at(pe, de),
                    exit: at(px, dx),
                });
            } else {
                out.push(Visit {
                    enter: at(pe, de),
                    exit: inner(u, w),
                });
                out.push(Visit {
                    enter: inner(w, u),
                    exit: at(px, dx),
                });
            }
        }
        i += len;
    }
    Ok(out)
}
