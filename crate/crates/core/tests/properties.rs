use std::collections::BTreeSet;

use proptest::prelude::*;

use freeknot::atoms::{atom_surface, enumerate_atoms, orientability};
use freeknot::corpus::{link_codes, virtual_decorations};
use freeknot::cycles::{decompose_cycle, generating_family, transport_cycle, CycleClass};
use freeknot::moves::{apply_move, candidate_moves, enumerate_moves, inverse, EnumOptions, Move, MoveKind};
use freeknot::parity::{agrees, ParityRule, GAUSSIAN};
use freeknot::projection::{filtration, repair_sequence};
use freeknot::search::{bfs_equivalence, random_walk};
use freeknot::sequence::DiagramSequence;
use freeknot::{parse_code_auto, serialize_code, FramedGraph, LinkCode};

/// Random free code: a shuffled matching cut into non-empty circles.
fn code_strategy(max_crossings: usize, max_circles: usize) -> impl Strategy<Value = LinkCode> {
    (1..=max_crossings)
        .prop_flat_map(move |n| {
            let word: Vec<u32> = (1..=n as u32).flat_map(|l| [l, l]).collect();
            (
                Just(word).prop_shuffle(),
                proptest::collection::vec(0..2 * n, 0..max_circles),
            )
        })
        .prop_map(|(word, cuts)| {
            let cuts: BTreeSet<usize> = cuts.into_iter().filter(|&c| c > 0).collect();
            let mut circles = vec![Vec::new()];
            for (i, l) in word.into_iter().enumerate() {
                if cuts.contains(&i) {
                    circles.push(Vec::new());
                }
                circles.last_mut().unwrap().push(l);
            }
            LinkCode::free(circles).unwrap()
        })
}

fn knot_strategy(max_chords: usize) -> impl Strategy<Value = LinkCode> {
    code_strategy(max_chords, 1)
}

/// Brute-force canonical words: every circle order, rotation and
/// direction, relabelled by first appearance, minimum taken.
fn brute_canonical(words: &[Vec<u32>]) -> Vec<Vec<u32>> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    fn variants(w: &[u32]) -> Vec<Vec<u32>> {
        let len = w.len();
        if len == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for r in 0..len {
            out.push((0..len).map(|i| w[(r + i) % len]).collect());
            out.push((0..len).map(|i| w[(r + len - i) % len]).collect());
        }
        out
    }
    let mut best: Option<Vec<Vec<u32>>> = None;
    for order in perms(words.len()) {
        let mut partial: Vec<Vec<Vec<u32>>> = vec![vec![]];
        for &c in &order {
            let mut next = Vec::new();
            for p in &partial {
                for v in variants(&words[c]) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            partial = next;
        }
        for cand in partial {
            let mut map = std::collections::HashMap::new();
            let relabelled: Vec<Vec<u32>> = cand
                .iter()
                .map(|w| {
                    w.iter()
                        .map(|l| {
                            let fresh = map.len() as u32 + 1;
                            *map.entry(*l).or_insert(fresh)
                        })
                        .collect()
                })
                .collect();
            if best.as_ref().is_none_or(|b| relabelled < *b) {
                best = Some(relabelled);
            }
        }
    }
    best.unwrap()
}

#[test]
fn canonical_form_matches_brute_force() {
    for c in link_codes(3, 3) {
        assert_eq!(c.canonical_form().words(), brute_canonical(&c.words()), "{c}");
    }
}

/// Independent scan for deletion sites on free codes: kinks are a label on
/// two cyclically adjacent positions; bigons are two disjoint edges whose
/// ends carry the same two distinct labels.
fn scanned_sites(code: &LinkCode) -> (BTreeSet<u32>, BTreeSet<(u32, u32)>) {
    let words = code.words();
    let mut edges = Vec::new();
    let mut offset = 0;
    for w in &words {
        let len = w.len();
        for i in 0..len {
            edges.push(((offset + i, w[i]), (offset + (i + 1) % len, w[(i + 1) % len])));
        }
        offset += len;
    }
    let mut kinks = BTreeSet::new();
    let mut bigons = BTreeSet::new();
    for (i, &((p, a), (q, b))) in edges.iter().enumerate() {
        if p != q && a == b {
            kinks.insert(a);
        }
        if a == b {
            continue;
        }
        for &((r, c), (s, d)) in &edges[i + 1..] {
            let positions: BTreeSet<usize> = [p, q, r, s].into();
            let same = (c, d) == (a, b) || (c, d) == (b, a);
            if same && positions.len() == 4 {
                bigons.insert((a.min(b), a.max(b)));
            }
        }
    }
    (kinks, bigons)
}

#[test]
fn deletion_sites_match_scanner() {
    let opts = EnumOptions {
        additions: false,
        max_crossings: None,
    };
    for c in link_codes(4, 3) {
        let mut kinks = BTreeSet::new();
        let mut bigons = BTreeSet::new();
        for m in candidate_moves(&c, &opts) {
            match m {
                Move::R1Del { label } => {
                    kinks.insert(label);
                }
                Move::R2Del { labels: (a, b) } => {
                    bigons.insert((a.min(b), a.max(b)));
                }
                _ => {}
            }
        }
        assert_eq!((kinks, bigons), scanned_sites(&c), "{c}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_round_trip(c in code_strategy(5, 3)) {
        prop_assert_eq!(parse_code_auto(&serialize_code(&c)).unwrap(), c.clone());
        let vs = virtual_decorations(&c);
        let v = &vs[vs.len() / 3];
        prop_assert_eq!(&parse_code_auto(&serialize_code(v)).unwrap(), v);
    }

    #[test]
    fn canonical_form_is_a_class_invariant(c in code_strategy(5, 3), rot in 0usize..10, rev: bool, shift in 1u32..5) {
        let words: Vec<Vec<u32>> = c
            .words()
            .into_iter()
            .rev()
            .map(|w| {
                let len = w.len();
                let mut w: Vec<u32> = (0..len).map(|i| w[(rot + i) % len] + shift).collect();
                if rev {
                    w.reverse();
                }
                w
            })
            .collect();
        let d = LinkCode::free(words).unwrap();
        prop_assert!(c.equivalent_form(&d));
        prop_assert_eq!(c.canonical_form().canonical_form(), c.canonical_form());
    }

    #[test]
    fn moves_keep_circle_count_and_invert(c in code_strategy(4, 2)) {
        for (m, after) in enumerate_moves(&c) {
            prop_assert_eq!(after.num_circles(), c.num_circles());
            let back = inverse(&c, &m).unwrap();
            let again = apply_move(&after, &back).unwrap();
            prop_assert!(again.equivalent_form(&c), "{} then {} gives {}", m.to_text(&c), back.to_text(&after), again);
            if m.kind() == MoveKind::R3 {
                prop_assert_eq!(after.crossing_count(), c.crossing_count());
            }
        }
    }

    #[test]
    fn gaussian_parity_agrees_with_homology(c in knot_strategy(7)) {
        let p = GAUSSIAN.assign(&c).unwrap();
        prop_assert_eq!(agrees(&c, &p), Ok(true));
    }

    #[test]
    fn filtration_reaches_an_even_core(c in knot_strategy(7)) {
        let f = filtration(&c, &GAUSSIAN).unwrap();
        prop_assert!(f.level <= c.crossing_count());
        prop_assert!(GAUSSIAN.assign(&f.core).unwrap().all_even());
        prop_assert_eq!(filtration(&f.core, &GAUSSIAN).unwrap().level, 0);
        // knots: all even exactly when the frame is orientable
        prop_assert!(orientability(&FramedGraph::from_code(&f.core)).orientable);
    }

    #[test]
    fn atoms_share_orientability(c in code_strategy(5, 3)) {
        let g = FramedGraph::from_code(&c);
        let expected = orientability(&g).orientable;
        for a in enumerate_atoms(&g, 12).unwrap() {
            let s = atom_surface(&a);
            prop_assert_eq!(s.orientable, expected);
            if expected {
                prop_assert_eq!(s.euler_characteristic % 2, 0);
            }
        }
    }

    #[test]
    fn family_decomposes_its_own_sums(c in code_strategy(6, 3), mask: u64) {
        let g = FramedGraph::from_code(&c);
        let mut target = CycleClass::zero(&g);
        for (i, m) in generating_family(&g).iter().enumerate() {
            if mask >> (i % 64) & 1 == 1 {
                target.add(&m.walk.class(&g));
            }
        }
        let d = decompose_cycle(&g, &target).unwrap();
        prop_assert_eq!(d.reconstruct(&g), target);
    }

    #[test]
    fn transported_walks_stay_cycles(c in knot_strategy(4), pick: usize) {
        let g = FramedGraph::from_code(&c);
        let family = generating_family(&g);
        let moves = candidate_moves(&c, &EnumOptions::default());
        prop_assume!(!family.is_empty() && !moves.is_empty());
        let walk = &family[pick % family.len()].walk;
        let m = &moves[pick % moves.len()];
        let after = FramedGraph::from_code(&apply_move(&c, m).unwrap());
        if let Ok(t) = transport_cycle(&c, m, walk) {
            prop_assert!(t.class(&after).is_cycle(&after));
        }
    }

    #[test]
    fn random_walks_replay(c in code_strategy(3, 2), seed: u64, len in 0usize..8) {
        let a = random_walk(&c, len, seed, Some(6));
        prop_assert_eq!(a.moves.len(), len);
        prop_assert_eq!(a.replay(), Ok(()));
        prop_assert_eq!(&random_walk(&c, len, seed, Some(6)), &a);
        let text = a.to_string();
        let parsed = DiagramSequence::parse(&text).unwrap();
        prop_assert_eq!(parsed.to_string(), text);
        prop_assert_eq!(parsed.codes, a.codes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bfs_paths_replay(a in knot_strategy(3), b in knot_strategy(3)) {
        if let Some(s) = bfs_equivalence(&a, &b, 4, 3) {
            prop_assert_eq!(s.replay(), Ok(()));
            prop_assert!(s.last().equivalent_form(&b));
            prop_assert_eq!(s.first(), &a);
        }
    }

    #[test]
    fn repair_is_sound_on_knot_walks(seed: u64, len in 1usize..8) {
        let walk = random_walk(&LinkCode::unknot(freeknot::CodeKind::Free), len, seed, Some(6));
        let end = (0..walk.codes.len())
            .rev()
            .find(|&i| orientability(&FramedGraph::from_code(&walk.codes[i])).orientable)
            .unwrap();
        let seq = DiagramSequence { codes: walk.codes[..=end].to_vec(), moves: walk.moves[..end].to_vec() };
        let rep = repair_sequence(&seq, &GAUSSIAN).unwrap();
        prop_assert!(rep.ok(), "{:?}", rep.violations);
        prop_assert_eq!(rep.output.replay(), Ok(()));
        prop_assert_eq!(rep.output.first(), seq.first());
        prop_assert_eq!(rep.output.last(), seq.last());
    }
}
