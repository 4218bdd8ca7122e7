//! Atoms over a frame: a choice of black corners at each vertex, the
//! checkerboard surface it spans, and orientability of the frame.
//!
//! At a vertex with half-edges in slots 0..4, black bit 0 makes the black
//! corners {0,1} and {2,3}; bit 1 makes them {1,2} and {3,0}. White corners
//! are the other two pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeKind, LinkCode, Sign};
use crate::cycles::{generating_family, CycleWalk};
use crate::graph::{opposite, slot, FramedGraph, HalfEdge, UnionFind};

pub const DEFAULT_ATOM_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtomError {
    #[error("{vertices} vertices give 2^{vertices} atoms, above the cap of 2^{cap}")]
    CapExceeded { vertices: usize, cap: usize },
    #[error("canonical atoms need a signed (virtual) code")]
    NeedsSignedCode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub frame: FramedGraph,
    pub black_choice: Vec<u8>,
}

impl Atom {
    pub fn new(frame: FramedGraph, black_choice: Vec<u8>) -> Self {
        assert_eq!(frame.vertex_count(), black_choice.len());
        Atom { frame, black_choice }
    }

    /// Partner of `h` across its black corner.
    pub fn black_partner(&self, h: HalfEdge) -> HalfEdge {
        corner_partner(h, self.black_choice[h / 4])
    }

    /// Partner of `h` across its white corner.
    pub fn white_partner(&self, h: HalfEdge) -> HalfEdge {
        corner_partner(h, 1 - self.black_choice[h / 4])
    }
}

fn corner_partner(h: HalfEdge, bit: u8) -> HalfEdge {
    let base = h & !3;
    let s = slot(h);
    let t = if bit == 0 { s ^ 1 } else { [3, 2, 1, 0][s] };
    base + t
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSurface {
    pub black_faces: usize,
    pub white_faces: usize,
    pub euler_characteristic: i64,
    pub orientable: bool,
    /// Sum over connected pieces; set when orientable.
    pub genus: Option<i64>,
    /// Sum over connected pieces; set when not orientable.
    pub crosscap_number: Option<i64>,
    pub face_degrees: Vec<usize>,
}

impl AtomSurface {
    pub fn fingerprint(&self) -> (i64, bool, Vec<usize>) {
        (self.euler_characteristic, self.orientable, self.face_degrees.clone())
    }
}

/// Orbits of the group generated by the edge pairing and `corner`.
fn faces(frame: &FramedGraph, corner: impl Fn(HalfEdge) -> HalfEdge) -> Vec<Vec<HalfEdge>> {
    let n = frame.half_edge_count();
    let mut uf = UnionFind::new(n);
    for h in 0..n {
        uf.union(h, frame.mate(h));
        uf.union(h, corner(h));
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<HalfEdge>> = Default::default();
    for h in 0..n {
        groups.entry(uf.find(h)).or_default().push(h);
    }
    groups.into_values().collect()
}

pub fn atom_surface(atom: &Atom) -> AtomSurface {
    let g = &atom.frame;
    let black = faces(g, |h| atom.black_partner(h));
    let white = faces(g, |h| atom.white_partner(h));
    let v = g.vertex_count() as i64;
    let f = (black.len() + white.len()) as i64;
    let chi = v - 2 * v + f;
    let orientable = orientability(g).orientable;
    let pieces = g.graph_components() as i64;
    let mut face_degrees: Vec<usize> = black.iter().chain(&white).map(|o| o.len() / 2).collect();
    face_degrees.sort_unstable();
    AtomSurface {
        black_faces: black.len(),
        white_faces: white.len(),
        euler_characteristic: chi,
        orientable,
        genus: orientable.then_some((2 * pieces - chi) / 2),
        crosscap_number: (!orientable).then_some(2 * pieces - chi),
        face_degrees,
    }
}

/// All `2^n` atoms in order of the black-choice bit vector, vertex 0 being
/// the lowest bit.
pub fn enumerate_atoms(frame: &FramedGraph, cap: usize) -> Result<Vec<Atom>, AtomError> {
    let n = frame.vertex_count();
    if n > cap {
        return Err(AtomError::CapExceeded { vertices: n, cap });
    }
    Ok((0u64..1 << n)
        .map(|bits| {
            let choice = (0..n).map(|v| ((bits >> v) & 1) as u8).collect();
            Atom::new(frame.clone(), choice)
        })
        .collect())
}

/// The atom of a signed diagram. Around a positive crossing the half-edges
/// read over-in, under-in, over-out, under-out; around a negative one
/// over-in, under-out, over-out, under-in. Black corners are the first two
/// and the last two of that reading, which comes to bit 0 at positive and
/// bit 1 at negative crossings.
pub fn canonical_atom(code: &LinkCode) -> Result<Atom, AtomError> {
    if code.kind() != CodeKind::Virtual {
        return Err(AtomError::NeedsSignedCode);
    }
    let frame = FramedGraph::from_code(code);
    let choice = frame
        .labels()
        .iter()
        .map(|&l| match code.sign(l) {
            Some(Sign::Negative) => 1,
            _ => 0,
        })
        .collect();
    Ok(Atom::new(frame, choice))
}

/// Result of source-sink propagation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientability {
    pub orientable: bool,
    /// Per edge, its half-edges as (source end, target end).
    pub orientation: Option<Vec<(HalfEdge, HalfEdge)>>,
    /// A closed walk going straight through an odd number of vertices.
    pub witness: Option<CycleWalk>,
}

/// Tries to orient every edge so that at each vertex two opposite
/// half-edges are incoming and the other two outgoing.
pub fn orientability(frame: &FramedGraph) -> Orientability {
    let n = frame.half_edge_count();
    // value: true when the half-edge is an incoming end
    let mut value: Vec<Option<bool>> = vec![None; n];
    let mut ok = true;
    'outer: for seed in 0..n {
        if value[seed].is_some() {
            continue;
        }
        value[seed] = Some(true);
        let mut stack = vec![seed];
        while let Some(h) = stack.pop() {
            let x = value[h].expect("set before push");
            for (k, want) in [(opposite(h), x), (h ^ 1, !x), (frame.mate(h), !x)] {
                match value[k] {
                    None => {
                        value[k] = Some(want);
                        stack.push(k);
                    }
                    Some(y) if y != want => {
                        ok = false;
                        break 'outer;
                    }
                    _ => {}
                }
            }
        }
    }
    if ok {
        let orientation = (0..frame.edge_count())
            .map(|e| {
                let (a, b) = frame.edge_ends(e);
                if value[a] == Some(false) {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        Orientability {
            orientable: true,
            orientation: Some(orientation),
            witness: None,
        }
    } else {
        let witness = generating_family(frame)
            .into_iter()
            .map(|m| m.walk)
            .find(|w| !cycle_orientable(w));
        Orientability {
            orientable: false,
            orientation: None,
            witness,
        }
    }
}

/// The walk goes straight through an even number of vertices.
pub fn cycle_orientable(walk: &CycleWalk) -> bool {
    walk.transversal_count().is_multiple_of(2)
}

/// Every walk of the generating family is orientable.
pub fn family_orientable(frame: &FramedGraph) -> bool {
    generating_family(frame)
        .iter()
        .all(|m| cycle_orientable(&m.walk))
}

/// Tries to orient every face of the atom so that the black and the white
/// face along each edge run through it in opposite directions.
pub fn face_tracing_orientable(atom: &Atom) -> bool {
    let g = &atom.frame;
    let n = g.half_edge_count();
    // a face has two traversal directions; direction 0 leaves along the
    // edges from the half-edges reached from the first one by
    // mate-then-corner steps
    let traced = |corner: &dyn Fn(HalfEdge) -> HalfEdge| {
        let mut face = vec![usize::MAX; n];
        let mut dir = vec![0u8; n];
        let mut count = 0;
        for start in 0..n {
            if face[start] != usize::MAX {
                continue;
            }
            let mut h = start;
            loop {
                face[h] = count;
                dir[h] = 0;
                let m = g.mate(h);
                face[m] = count;
                dir[m] = 1;
                h = corner(m);
                if h == start {
                    break;
                }
            }
            count += 1;
        }
        (face, dir, count)
    };
    let (bf, bd, nb) = traced(&|h| atom.black_partner(h));
    let (wf, wd, nw) = traced(&|h| atom.white_partner(h));
    // black faces are nodes 0..nb, white faces nb..nb+nw
    let mut colour: Vec<Option<u8>> = vec![None; nb + nw];
    let mut adj: Vec<Vec<(usize, u8)>> = vec![Vec::new(); nb + nw];
    for e in 0..g.edge_count() {
        let (h, _) = g.edge_ends(e);
        let (b, w) = (bf[h], nb + wf[h]);
        let need = 1 ^ bd[h] ^ wd[h];
        adj[b].push((w, need));
        adj[w].push((b, need));
    }
    for s in 0..nb + nw {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(0);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let cu = colour[u].expect("set before push");
            for &(v, need) in &adj[u] {
                let want = cu ^ need;
                match colour[v] {
                    None => {
                        colour[v] = Some(want);
                        stack.push(v);
                    }
                    Some(c) if c != want => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{parse_code, parse_code_auto};
    use crate::cycles::halves;
    use crate::graph::unicursal_components;

    fn frame(s: &str) -> FramedGraph {
        FramedGraph::from_code(&parse_code(s, CodeKind::Free).unwrap())
    }

    #[test]
    fn orientability_examples() {
        let o = orientability(&frame("1 2 3 1 2 3"));
        assert!(o.orientable);
        assert_eq!(o.orientation.unwrap().len(), 6);
        let g = frame("1 2 1 2");
        let o = orientability(&g);
        assert!(!o.orientable);
        let w = o.witness.unwrap();
        let (h, _) = halves(&g, &unicursal_components(&g), 0).unwrap();
        assert_eq!(w, h);
        assert_eq!(w.transversal_count(), 1);
        assert!(orientability(&frame("1 1")).orientable);
    }

    #[test]
    fn witness_orientation_is_source_sink() {
        let g = frame("1 2 3 1 2 3 ; 4 4");
        let o = orientability(&g).orientation.unwrap();
        let mut incoming = vec![false; g.half_edge_count()];
        for (_, head) in o {
            incoming[head] = true;
        }
        for h in 0..g.half_edge_count() {
            assert_eq!(incoming[h], incoming[opposite(h)]);
            assert_ne!(incoming[h], incoming[h ^ 1]);
        }
    }

    #[test]
    fn atom_counts() {
        assert_eq!(enumerate_atoms(&frame("1 1"), 12).unwrap().len(), 2);
        assert_eq!(enumerate_atoms(&frame("1 2 1 2"), 12).unwrap().len(), 4);
        assert_eq!(enumerate_atoms(&frame("1 2 3 1 2 3"), 12).unwrap().len(), 8);
        assert!(matches!(
            enumerate_atoms(&frame("1 2 3 1 2 3"), 2),
            Err(AtomError::CapExceeded { .. })
        ));
    }

    #[test]
    fn kink_surfaces() {
        let s: Vec<AtomSurface> = enumerate_atoms(&frame("1 1"), 12)
            .unwrap()
            .iter()
            .map(atom_surface)
            .collect();
        // the two choices swap colours; both give a sphere with three cells
        for x in &s {
            assert_eq!(x.euler_characteristic, 2);
            assert_eq!(x.genus, Some(0));
            assert_eq!(x.black_faces + x.white_faces, 3);
        }
        assert_eq!(s[0].black_faces, s[1].white_faces);
    }

    #[test]
    fn atoms_share_orientability() {
        for (code, want) in [("1 2 3 1 2 3", true), ("1 2 1 2", false)] {
            for a in enumerate_atoms(&frame(code), 12).unwrap() {
                let s = atom_surface(&a);
                assert_eq!(s.orientable, want);
                assert_eq!(face_tracing_orientable(&a), want);
                if want {
                    assert_eq!(s.euler_characteristic % 2, 0);
                } else {
                    assert!(s.crosscap_number.unwrap() > 0);
                }
            }
        }
    }

    #[test]
    fn canonical_atoms() {
        let kink = canonical_atom(&parse_code_auto("O1+ U1+").unwrap()).unwrap();
        assert_eq!(kink.black_choice, vec![0]);
        let mirror = canonical_atom(&parse_code_auto("O1- U1-").unwrap()).unwrap();
        assert_eq!(mirror.black_choice, vec![1]);
        let vt = canonical_atom(&parse_code_auto("O1+ O2+ U1+ U2+").unwrap()).unwrap();
        assert!(!atom_surface(&vt).orientable);
        assert_eq!(
            canonical_atom(&parse_code_auto("1 1").unwrap()),
            Err(AtomError::NeedsSignedCode)
        );
    }

    #[test]
    fn cycle_orientability() {
        let g = frame("1 1");
        let p = unicursal_components(&g);
        assert!(cycle_orientable(&crate::cycles::component_walk(&p, 0)));
        let g = frame("1 2 1 2");
        let (h, _) = halves(&g, &unicursal_components(&g), 0).unwrap();
        assert!(!cycle_orientable(&h));
        assert!(cycle_orientable(&CycleWalk::empty()));
    }
}
