//! Bounded breadth-first equivalence search and seeded random move walks.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::LinkCode;
use crate::moves::{apply_move, candidate_moves, enumerate_moves_with, EnumOptions, Move};
use crate::sequence::DiagramSequence;

struct Node {
    code: LinkCode,
    parent: usize,
    mv: Option<Move>,
    depth: usize,
}

/// Shortest move sequence from `a` to a diagram with the canonical form of
/// `b`, never passing more than `max_crossings` crossings and using at most
/// `max_depth` moves. States are identified by canonical form; the first
/// path found in enumeration order wins.
pub fn bfs_equivalence(
    a: &LinkCode,
    b: &LinkCode,
    max_crossings: usize,
    max_depth: usize,
) -> Option<DiagramSequence> {
    if a.kind() != b.kind() || a.num_circles() != b.num_circles() {
        return None;
    }
    let target = b.canonical_form();
    let opts = EnumOptions {
        additions: true,
        max_crossings: Some(max_crossings),
    };
    let mut nodes = vec![Node {
        code: a.clone(),
        parent: usize::MAX,
        mv: None,
        depth: 0,
    }];
    let mut seen: HashSet<LinkCode> = HashSet::new();
    let start = a.canonical_form();
    let mut found = (start == target).then_some(0);
    seen.insert(start);
    let mut queue = VecDeque::from([0usize]);
    while found.is_none() {
        let Some(i) = queue.pop_front() else { break };
        if nodes[i].depth >= max_depth {
            continue;
        }
        for (mv, next) in enumerate_moves_with(&nodes[i].code, &opts) {
            let canon = next.canonical_form();
            if !seen.insert(canon.clone()) {
                continue;
            }
            let depth = nodes[i].depth + 1;
            nodes.push(Node {
                code: next,
                parent: i,
                mv: Some(mv),
                depth,
            });
            let id = nodes.len() - 1;
            if canon == target {
                found = Some(id);
                break;
            }
            queue.push_back(id);
        }
    }
    let mut path = Vec::new();
    let mut cur = found?;
    while cur != usize::MAX {
        path.push(cur);
        cur = nodes[cur].parent;
    }
    path.reverse();
    let mut seq = DiagramSequence::single(nodes[path[0]].code.clone());
    for &i in &path[1..] {
        seq.push(nodes[i].mv.clone().expect("non-root"), nodes[i].code.clone());
    }
    Some(seq)
}

/// `length` moves drawn uniformly from the applicable ones with a seeded
/// generator. With a crossing cap, additions beyond the cap are left out
/// unless nothing else applies.
pub fn random_walk(
    code: &LinkCode,
    length: usize,
    seed: u64,
    max_crossings: Option<usize>,
) -> DiagramSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seq = DiagramSequence::single(code.clone());
    let opts = EnumOptions {
        additions: true,
        max_crossings,
    };
    for _ in 0..length {
        let cur = seq.last().clone();
        let mut moves = candidate_moves(&cur, &opts);
        if moves.is_empty() {
            moves = candidate_moves(&cur, &EnumOptions::default());
        }
        let mv = moves.swap_remove(rng.gen_range(0..moves.len()));
        let next = apply_move(&cur, &mv).expect("enumerated moves apply");
        seq.push(mv, next);
    }
    seq
}

/// Number of distinct canonical diagrams reachable within the bounds; used
/// to report how much of the space a negative search covered.
pub fn reachable_count(a: &LinkCode, max_crossings: usize, max_depth: usize) -> usize {
    let opts = EnumOptions {
        additions: true,
        max_crossings: Some(max_crossings),
    };
    let mut seen = HashSet::from([a.canonical_form()]);
    let mut frontier = vec![a.clone()];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for c in &frontier {
            for (_, n) in enumerate_moves_with(c, &opts) {
                if seen.insert(n.canonical_form()) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    seen.len()
}
