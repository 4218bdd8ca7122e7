//! Acceptance criteria. Each criterion prints one PASS or FAIL line; the
//! test fails when the set of failing criteria differs from `KNOWN_RED`.
//!
//! The oracles below work on label words directly and share no code with
//! the library beyond parsing and corpus enumeration.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freeknot::atoms::{atom_surface, enumerate_atoms};
use freeknot::corpus::{frame_codes, free_codes, knot_codes};
use freeknot::cycles::{decompose_cycle, family_rank, CycleClass};
use freeknot::parity::{ParityRule, COMPONENT, GAUSSIAN};
use freeknot::projection::{filtration, map_f, repair_sequence};
use freeknot::search::bfs_equivalence;
use freeknot::suites::{self, repair_corpus_sequence, SuiteOptions};
use freeknot::{parse_code, CodeKind, FramedGraph, LinkCode};

/// Criteria expected to fail, with the reason.
const KNOWN_RED: &[(u32, &str)] = &[(
    8,
    "[1,2,1,2] reduces to the unknot by one R2 deletion: its two strands 1 2 and 1 2 \
     bound a bigon, and unsigned free R2 admits both endpoint patterns",
)];

// Frozen oracle outputs.
const KNOT_CLASSES_LE5: usize = 105;
const ORIENTABLE_KNOTS_LE5: usize = 28;
const FRAMES_LE5: usize = 1141;
const ORIENTABLE_FRAMES_LE5: usize = 119;
const FRAMES_LE4: usize = 204;
const SPAN_CODES: usize = 97;

mod oracle {
    use std::collections::BTreeMap;

    /// (circle, index) of both occurrences of every label.
    pub fn occurrences(words: &[Vec<u32>]) -> BTreeMap<u32, Vec<(usize, usize)>> {
        let mut occ: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (c, w) in words.iter().enumerate() {
            for (i, &l) in w.iter().enumerate() {
                occ.entry(l).or_default().push((c, i));
            }
        }
        occ
    }

    /// Knot chord parity: number of chords with one end strictly between
    /// the two ends of this chord.
    pub fn linked_parity(word: &[u32]) -> BTreeMap<u32, u8> {
        let occ = occurrences(&[word.to_vec()]);
        occ.iter()
            .map(|(&l, p)| {
                let (a, b) = (p[0].1, p[1].1);
                let linked = occ
                    .iter()
                    .filter(|(&m, q)| m != l && ((a < q[0].1 && q[0].1 < b) != (a < q[1].1 && q[1].1 < b)))
                    .count();
                (l, (linked % 2) as u8)
            })
            .collect()
    }

    /// Odd exactly when the two passages lie on different circles.
    pub fn mixed_parity(words: &[Vec<u32>]) -> BTreeMap<u32, u8> {
        occurrences(words)
            .into_iter()
            .map(|(l, p)| (l, u8::from(p[0].0 != p[1].0)))
            .collect()
    }

    pub fn delete(words: &[Vec<u32>], odd: &BTreeMap<u32, u8>) -> Vec<Vec<u32>> {
        words
            .iter()
            .map(|w| w.iter().copied().filter(|l| odd[l] == 0).collect())
            .collect()
    }

    /// Brute force over all edge orientations: at every crossing the two
    /// ends of one passage both point in or both point out, and the two
    /// passages disagree. Edge `p` runs from position `p` to the next one.
    pub fn orientable(words: &[Vec<u32>]) -> bool {
        let mut offsets = Vec::new();
        let mut total = 0;
        for w in words {
            offsets.push(total);
            total += w.len();
        }
        // per label: for each passage (incoming edge, outgoing edge)
        let mut passages: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (c, w) in words.iter().enumerate() {
            let len = w.len();
            for (i, &l) in w.iter().enumerate() {
                let here = offsets[c] + i;
                let before = offsets[c] + (i + len - 1) % len;
                passages.entry(l).or_default().push((before, here));
            }
        }
        let e = total;
        'outer: for mask in 0u64..(1u64 << e) {
            let flipped = |edge: usize| mask >> edge & 1 == 1;
            for ps in passages.values() {
                // incoming edge points into the crossing when not flipped,
                // outgoing edge points into it when flipped
                let inward = |(a, b): (usize, usize)| -> Option<bool> {
                    let x = !flipped(a);
                    let y = flipped(b);
                    (x == y).then_some(x)
                };
                match (inward(ps[0]), inward(ps[1])) {
                    (Some(x), Some(y)) if x != y => {}
                    _ => continue 'outer,
                }
            }
            return true;
        }
        false
    }

    /// Positions joined by edges, for cycle-space work.
    pub fn edges(words: &[Vec<u32>]) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for w in words {
            for i in 0..w.len() {
                out.push((w[i], w[(i + 1) % w.len()]));
            }
        }
        out
    }

    /// Fundamental cycles of a spanning forest on the crossings, as edge
    /// index lists, plus the number of forest components.
    pub fn tree_cycles(words: &[Vec<u32>]) -> (Vec<Vec<usize>>, usize) {
        let es = edges(words);
        let labels: Vec<u32> = occurrences(words).keys().copied().collect();
        let idx = |l: u32| labels.binary_search(&l).unwrap();
        let n = labels.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, &(a, b)) in es.iter().enumerate() {
            adj[idx(a)].push((idx(b), k));
            adj[idx(b)].push((idx(a), k));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut in_tree = vec![false; es.len()];
        let mut comps = 0;
        for r in 0..n {
            if depth[r] != usize::MAX {
                continue;
            }
            comps += 1;
            depth[r] = 0;
            let mut stack = vec![r];
            while let Some(u) = stack.pop() {
                for &(v, k) in &adj[u] {
                    if depth[v] == usize::MAX {
                        depth[v] = depth[u] + 1;
                        parent[v] = Some((u, k));
                        in_tree[k] = true;
                        stack.push(v);
                    }
                }
            }
        }
        let mut cycles = Vec::new();
        for (k, &(a, b)) in es.iter().enumerate() {
            if in_tree[k] {
                continue;
            }
            let (mut u, mut v) = (idx(a), idx(b));
            let mut cyc = vec![k];
            while u != v {
                if depth[u] < depth[v] {
                    std::mem::swap(&mut u, &mut v);
                }
                let (p, pk) = parent[u].unwrap();
                cyc.push(pk);
                u = p;
            }
            cycles.push(cyc);
        }
        (cycles, comps)
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn free(words: Vec<Vec<u32>>) -> LinkCode {
    LinkCode::free(words).unwrap()
}

fn check_assignment(rule: &dyn ParityRule, code: &LinkCode, expected: &std::collections::BTreeMap<u32, u8>) -> bool {
    rule.assign(code).map(|p| p.0 == *expected).unwrap_or(false)
}

fn criterion_1() -> Outcome {
    let corpus = knot_codes(5);
    if corpus.len() != KNOT_CLASSES_LE5 {
        return outcome(false, format!("corpus has {} classes", corpus.len()));
    }
    let mismatched = corpus
        .iter()
        .filter(|c| !check_assignment(&GAUSSIAN, c, &oracle::linked_parity(&c.words()[0])))
        .count();
    let rep = suites::axioms(&SuiteOptions {
        rule: &GAUSSIAN,
        max_crossings: 5,
        circles: vec![1],
        ..SuiteOptions::default()
    });
    outcome(
        mismatched == 0 && rep.passed() && rep.skipped == 0,
        format!(
            "{} codes, {} move cases, {} clause failures, {} parity mismatches with the linked-chord oracle",
            corpus.len(),
            rep.cases,
            rep.failures.len(),
            mismatched
        ),
    )
}

fn criterion_2() -> Outcome {
    let corpus = free_codes(4, 2);
    let mismatched = corpus
        .iter()
        .filter(|c| !check_assignment(&COMPONENT, c, &oracle::mixed_parity(&c.words())))
        .count();
    let rep = suites::axioms(&SuiteOptions {
        rule: &COMPONENT,
        max_crossings: 4,
        circles: vec![2],
        ..SuiteOptions::default()
    });
    outcome(
        mismatched == 0 && rep.passed() && rep.skipped == 0,
        format!(
            "{} codes, {} move cases, {} clause failures, {} parity mismatches with the mixed-crossing oracle",
            corpus.len(),
            rep.cases,
            rep.failures.len(),
            mismatched
        ),
    )
}

fn criterion_3() -> Outcome {
    let frames = frame_codes(5);
    let opts = SuiteOptions {
        max_crossings: 5,
        circles: vec![],
        ..SuiteOptions::default()
    };
    let rep = suites::orientability_equivalence(&opts);
    let mut brute_orientable = 0;
    let mut disagree = 0;
    for c in &frames {
        let o = oracle::orientable(&c.words());
        brute_orientable += usize::from(o);
        if freeknot::atoms::orientability(&FramedGraph::from_code(c)).orientable != o {
            disagree += 1;
        }
    }
    outcome(
        rep.passed() && disagree == 0 && frames.len() == FRAMES_LE5 && brute_orientable == ORIENTABLE_FRAMES_LE5,
        format!(
            "{} frames ({} orientable by brute force), {} three-way disagreements, {} disagreements with brute force",
            frames.len(),
            brute_orientable,
            rep.failures.len(),
            disagree
        ),
    )
}

fn criterion_4() -> Outcome {
    let frames = frame_codes(4);
    let mut atoms = 0;
    let mut bad = 0;
    for c in &frames {
        let expected = oracle::orientable(&c.words());
        let g = FramedGraph::from_code(c);
        let (v, e) = (g.vertex_count() as i64, g.edge_count() as i64);
        for a in enumerate_atoms(&g, 12).unwrap() {
            atoms += 1;
            let s = atom_surface(&a);
            let faces = (s.black_faces + s.white_faces) as i64;
            let chi_ok = s.euler_characteristic == v - e + faces;
            if s.orientable != expected || (expected && s.euler_characteristic % 2 != 0) || !chi_ok {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0 && frames.len() == FRAMES_LE4,
        format!("{} frames, {atoms} atoms, {bad} inconsistent", frames.len()),
    )
}

fn criterion_5() -> Outcome {
    let mut codes = 0;
    let mut bad = Vec::new();
    for k in 1..=3 {
        for c in free_codes(4, k) {
            let w = c.words();
            if w.iter().any(Vec::is_empty) {
                continue;
            }
            let (cycles, comps) = oracle::tree_cycles(&w);
            if comps != 1 {
                continue;
            }
            codes += 1;
            let g = FramedGraph::from_code(&c);
            let e = oracle::edges(&w).len();
            let v = c.crossing_count();
            let dim = e - v + comps;
            if family_rank(&g) != dim || cycles.len() != dim {
                bad.push(format!("{c}: rank {} vs {dim}", family_rank(&g)));
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(codes as u64);
            for _ in 0..100 {
                let mut edges = Vec::new();
                for cyc in &cycles {
                    if rng.gen_bool(0.5) {
                        edges.extend(cyc.iter().copied());
                    }
                }
                let target = CycleClass::from_edges(&g, edges);
                match decompose_cycle(&g, &target) {
                    Ok(d) if d.reconstruct(&g) == target => {}
                    _ => {
                        bad.push(format!("{c}: target not reconstructed"));
                        break;
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty() && codes == SPAN_CODES,
        format!("{codes} connected codes, 100 targets each, {} failures{}", bad.len(), first_of(&bad)),
    )
}

fn oracle_f(code: &LinkCode) -> LinkCode {
    let w = code.words();
    free(oracle::delete(&w, &oracle::linked_parity(&w[0])))
}

fn criterion_6() -> Outcome {
    let corpus = knot_codes(5);
    let mut images = 0;
    let mut mismatched = 0;
    for c in &corpus {
        for (_, after) in freeknot::moves::enumerate_moves(c).into_iter().chain([(freeknot::moves::Move::Same, c.clone())]) {
            images += 1;
            let lib = map_f(&after, &GAUSSIAN.assign(&after).unwrap()).unwrap();
            if !lib.equivalent_form(&oracle_f(&after)) {
                mismatched += 1;
            }
        }
    }
    let rep = suites::f_welldefined(&SuiteOptions {
        max_crossings: 5,
        circles: vec![1],
        ..SuiteOptions::default()
    });
    outcome(
        rep.passed() && mismatched == 0,
        format!(
            "{} move cases, {} failures; {images} f-images, {mismatched} differ from the direct deletion oracle",
            rep.cases,
            rep.failures.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut problems = Vec::new();
    let mut bad_middle_seed = None;
    let mut sequences = 0;
    let mut moves = 0;
    for seed in 1..=50u64 {
        let seq = repair_corpus_sequence(seed, 10, 8);
        sequences += 1;
        moves += seq.moves.len();
        let ends_ok = [seq.first(), seq.last()].iter().all(|c| oracle::orientable(&c.words()));
        let longest = seq.codes.iter().map(LinkCode::crossing_count).max().unwrap();
        if !ends_ok || seq.moves.len() > 10 || longest > 8 {
            problems.push(format!("seed {seed}: corpus sequence out of bounds"));
            continue;
        }
        if bad_middle_seed.is_none() && seq.codes.iter().any(|c| !oracle::orientable(&c.words())) {
            bad_middle_seed = Some(seed);
        }
        match repair_sequence(&seq, &GAUSSIAN) {
            Ok(rep) => {
                let replay = rep.output.replay().is_ok();
                let all = rep.output.codes.iter().all(|c| oracle::orientable(&c.words()));
                let ends = rep.output.first() == seq.first() && rep.output.last() == seq.last();
                if !(replay && all && ends && rep.violations.is_empty() && rep.all_orientable) {
                    problems.push(format!(
                        "seed {seed}: replay {replay}, orientable {all}, endpoints {ends}, witnesses {}",
                        rep.violations.len()
                    ));
                }
            }
            Err(e) => problems.push(format!("seed {seed}: {e}")),
        }
    }
    outcome(
        problems.is_empty() && bad_middle_seed.is_some() && sequences >= 50,
        format!(
            "{sequences} sequences, {moves} moves, first non-orientable intermediate at seed {}, {} problems{}",
            bad_middle_seed.map_or("none".to_string(), |s| s.to_string()),
            problems.len(),
            first_of(&problems)
        ),
    )
}

fn criterion_8() -> Outcome {
    let k = |s: &str| parse_code(s, CodeKind::Free).unwrap();
    let (a, t, u) = (k("1 2 1 2"), k("1 2 3 1 2 3"), k("*"));
    let mut notes = Vec::new();
    let mut pass = true;

    let odd = oracle::linked_parity(&[1, 2, 1, 2]);
    let all_odd = odd.values().all(|&x| x == 1) && check_assignment(&GAUSSIAN, &a, &odd);
    let fa = filtration(&a, &GAUSSIAN).unwrap();
    let a_ok = all_odd && fa.level == 1 && fa.core == u;
    notes.push(format!("[1,2,1,2] all odd {all_odd}, level {}, core {}", fa.level, fa.core));
    pass &= a_ok;

    let even = oracle::linked_parity(&[1, 2, 3, 1, 2, 3]);
    let all_even = even.values().all(|&x| x == 0) && check_assignment(&GAUSSIAN, &t, &even);
    let ft = filtration(&t, &GAUSSIAN).unwrap();
    let orientable = oracle::orientable(&t.words())
        && freeknot::atoms::orientability(&FramedGraph::from_code(&t)).orientable;
    pass &= all_even && ft.level == 0 && orientable;
    notes.push(format!("[1,2,3,1,2,3] all even {all_even}, level {}, orientable {orientable}", ft.level));

    let two = bfs_equivalence(&t, &u, 4, 6);
    let two_ok = two.as_ref().is_some_and(|s| s.moves.len() == 2 && s.replay().is_ok());
    pass &= two_ok;
    notes.push(match two {
        Some(s) => format!("trefoil word to unknot in {} moves", s.moves.len()),
        None => "trefoil word to unknot: none found".to_string(),
    });

    let none = bfs_equivalence(&a, &u, 4, 8);
    // oracle: positions 0,1 and 2,3 carry the same pair of labels, so the
    // two strands bound a bigon
    let w = [1u32, 2, 1, 2];
    let bigon = w[0] != w[1] && [w[2], w[3]] == [w[0], w[1]];
    match &none {
        None => notes.push("[1,2,1,2] to unknot: NONE-WITHIN-BOUNDS".into()),
        Some(s) => {
            pass = false;
            let mv = s.moves[0].to_text(&s.codes[0]);
            notes.push(format!(
                "[1,2,1,2] to unknot: found {} move(s) ({mv}); bigon oracle {bigon}",
                s.moves.len()
            ));
        }
    }
    outcome(pass, notes.join("; "))
}

/// ", first: <item>" when there is one.
fn first_of<T: std::fmt::Debug>(items: &[T]) -> String {
    items.first().map_or(String::new(), |x| format!(", first: {x:?}"))
}

/// Number, title, time budget, check.
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "gaussian parity axioms, knots up to 5 chords", Duration::from_secs(60), criterion_1),
        (2, "component parity axioms, 2 circles up to 4 crossings", Duration::from_secs(60), criterion_2),
        (3, "orientability deciders agree, frames up to 5 vertices", Duration::from_secs(60), criterion_3),
        (4, "all atoms of a frame agree, frames up to 4 vertices", Duration::from_secs(30), criterion_4),
        (5, "generating family spans the cycle space", Duration::from_secs(60), criterion_5),
        (6, "f is well defined on single moves", Duration::from_secs(120), criterion_6),
        (7, "repair of 50 seeded knot sequences", Duration::from_secs(300), criterion_7),
        (8, "known diagnostics", Duration::from_secs(30), criterion_8),
    ];
    let mut red = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        println!(
            "{} [{id}] {name} ({:.1}s of {}s): {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
        if !pass {
            red.push(id);
        }
    }
    for (id, why) in KNOWN_RED {
        println!("known red [{id}]: {why}");
    }
    let expected: Vec<u32> = KNOWN_RED.iter().map(|(id, _)| *id).collect();
    assert_eq!(red, expected, "failing criteria differ from the known list");
    // knot frames are orientable exactly when every chord is even
    let knots = knot_codes(5);
    let brute = knots.iter().filter(|c| oracle::orientable(&c.words())).count();
    let even = knots
        .iter()
        .filter(|c| oracle::linked_parity(&c.words()[0]).values().all(|&x| x == 0))
        .count();
    assert_eq!((brute, even), (ORIENTABLE_KNOTS_LE5, ORIENTABLE_KNOTS_LE5));
}
