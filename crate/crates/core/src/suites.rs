//! Batch verification drivers over enumerated or seeded corpora.

use std::collections::VecDeque;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atoms::{atom_surface, enumerate_atoms, face_tracing_orientable, family_orientable, orientability, Atom};
use crate::code::{serialize_code, LinkCode};
use crate::corpus::{frame_codes, free_codes};
use crate::cycles::{decompose_cycle, family_rank, CycleClass};
use crate::graph::{vertex_of, FramedGraph};
use crate::moves::{apply_move, candidate_moves, inverse, EnumOptions, Move};
use crate::parity::{agrees, verify_parity_axioms, ParityError, ParityRule, GAUSSIAN};
use crate::projection::{filtration, find_move, map_f, repair_sequence, ProjectionError};
use crate::search::random_walk;
use crate::sequence::DiagramSequence;

pub const SUITE_NAMES: [&str; 8] = [
    "axioms",
    "agreement",
    "orientability-equivalence",
    "atoms",
    "f-welldefined",
    "filtration-invariance",
    "repair",
    "span",
];

#[derive(Clone)]
pub struct SuiteOptions {
    pub rule: &'static dyn ParityRule,
    pub max_crossings: usize,
    /// Circle counts of the enumerated corpus; empty means every frame,
    /// that is codes on any number of circles with none crossing-free.
    pub circles: Vec<usize>,
    /// Restricts the corpus to this one code.
    pub code: Option<LinkCode>,
    pub seeds: RangeInclusive<u64>,
    pub length: usize,
    /// Random cycles decomposed per code in the span suite.
    pub targets: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            rule: &GAUSSIAN,
            max_crossings: 5,
            circles: vec![1],
            code: None,
            seeds: 1..=50,
            length: 10,
            targets: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub code: String,
    #[serde(rename = "move")]
    pub mv: Option<String>,
    pub detail: String,
    pub rerun: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub rule: Option<String>,
    pub cases: usize,
    pub skipped: usize,
    pub failures: Vec<Counterexample>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str, rule: Option<&dyn ParityRule>) -> Self {
        SuiteReport {
            suite: suite.into(),
            rule: rule.map(|r| r.name().into()),
            cases: 0,
            skipped: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn corpus(opts: &SuiteOptions) -> Vec<LinkCode> {
    match &opts.code {
        Some(c) => vec![c.clone()],
        None if opts.circles.is_empty() => frame_codes(opts.max_crossings),
        None => opts
            .circles
            .iter()
            .flat_map(|&k| free_codes(opts.max_crossings, k))
            .collect(),
    }
}

fn rerun(suite: &str, rule: Option<&dyn ParityRule>, code: &LinkCode) -> String {
    let rule = rule.map(|r| format!(" --rule {}", r.name())).unwrap_or_default();
    format!("freeknot verify {suite}{rule} --code \"{}\"", serialize_code(code))
}

fn all_moves(code: &LinkCode) -> Vec<Move> {
    candidate_moves(code, &EnumOptions::default())
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Option<SuiteReport> {
    let mut report = match name {
        "axioms" => axioms(opts),
        "agreement" => agreement(opts),
        "orientability-equivalence" => orientability_equivalence(opts),
        "atoms" => atom_consistency(opts),
        "f-welldefined" => f_welldefined(opts),
        "filtration-invariance" => filtration_invariance(opts),
        "repair" => repair(opts),
        "span" => span(opts),
        _ => return None,
    };
    report.failures.sort_by(|a, b| (&a.code, &a.mv).cmp(&(&b.code, &b.mv)));
    Some(report)
}

pub fn axioms(opts: &SuiteOptions) -> SuiteReport {
    let rule = opts.rule;
    let mut r = SuiteReport::new("axioms", Some(rule));
    for code in corpus(opts) {
        if !rule.applicable(&code) {
            r.skipped += 1;
            continue;
        }
        for mv in all_moves(&code) {
            r.cases += 1;
            match verify_parity_axioms(rule, &code, &mv) {
                Ok(rep) => {
                    for c in rep.failures() {
                        r.failures.push(Counterexample {
                            code: serialize_code(&code),
                            mv: Some(mv.to_text(&code)),
                            detail: format!("{} at {:?}: {:?} -> {:?}", c.clause, c.site, c.before, c.after),
                            rerun: rerun("axioms", Some(rule), &code),
                        });
                    }
                }
                Err(e) => r.failures.push(Counterexample {
                    code: serialize_code(&code),
                    mv: Some(mv.to_text(&code)),
                    detail: e.to_string(),
                    rerun: rerun("axioms", Some(rule), &code),
                }),
            }
        }
    }
    r
}

pub fn agreement(opts: &SuiteOptions) -> SuiteReport {
    let rule = opts.rule;
    let mut r = SuiteReport::new("agreement", Some(rule));
    for code in corpus(opts) {
        let Ok(p) = rule.assign(&code) else {
            r.skipped += 1;
            continue;
        };
        r.cases += 1;
        let verdict = agrees(&code, &p);
        if verdict != Ok(true) {
            let detail = match verdict {
                Err(e) => e.to_string(),
                _ => format!("parity {p} disagrees with the homological parity"),
            };
            r.failures.push(Counterexample {
                code: serialize_code(&code),
                mv: None,
                detail,
                rerun: rerun("agreement", Some(rule), &code),
            });
        }
    }
    r
}

pub fn orientability_equivalence(opts: &SuiteOptions) -> SuiteReport {
    let mut r = SuiteReport::new("orientability-equivalence", None);
    for code in corpus(opts) {
        r.cases += 1;
        let frame = FramedGraph::from_code(&code);
        let n = frame.vertex_count();
        let propagation = orientability(&frame).orientable;
        let family = family_orientable(&frame);
        let faces = face_tracing_orientable(&Atom::new(frame, vec![0; n]));
        if !(propagation == family && family == faces) {
            r.failures.push(Counterexample {
                code: serialize_code(&code),
                mv: None,
                detail: format!("propagation {propagation}, family {family}, face tracing {faces}"),
                rerun: rerun("orientability-equivalence", None, &code),
            });
        }
    }
    r
}

/// Every black choice gives the same orientability flag as the frame, and
/// orientable frames give even Euler characteristic.
pub fn atom_consistency(opts: &SuiteOptions) -> SuiteReport {
    let mut r = SuiteReport::new("atoms", None);
    for code in corpus(opts) {
        let frame = FramedGraph::from_code(&code);
        let expected = orientability(&frame).orientable;
        let Ok(atoms) = enumerate_atoms(&frame, 12) else {
            r.skipped += 1;
            continue;
        };
        for atom in atoms {
            r.cases += 1;
            let s = atom_surface(&atom);
            let odd_chi = s.orientable && s.euler_characteristic % 2 != 0;
            if s.orientable != expected || odd_chi {
                r.failures.push(Counterexample {
                    code: serialize_code(&code),
                    mv: None,
                    detail: format!(
                        "black choice {:?}: orientable {}, frame says {expected}, chi {}",
                        atom.black_choice, s.orientable, s.euler_characteristic
                    ),
                    rerun: rerun("atoms", None, &code),
                });
            }
        }
    }
    r
}

fn fmap(rule: &dyn ParityRule, code: &LinkCode) -> Result<LinkCode, ParityError> {
    let p = rule.assign(code)?;
    Ok(map_f(code, &p).expect("assignment covers the code"))
}

pub fn f_welldefined(opts: &SuiteOptions) -> SuiteReport {
    let rule = opts.rule;
    let mut r = SuiteReport::new("f-welldefined", Some(rule));
    for code in corpus(opts) {
        let Ok(a) = fmap(rule, &code) else {
            r.skipped += 1;
            continue;
        };
        for mv in all_moves(&code) {
            r.cases += 1;
            let after = apply_move(&code, &mv).expect("enumerated moves apply");
            let detail = match fmap(rule, &after) {
                Err(e) => Some(e.to_string()),
                Ok(b) if a.equivalent_form(&b) || find_move(&a, &b, mv.kind()).is_some() => None,
                Ok(b) => Some(format!("images {} and {} are not one {} apart", a, b, mv.kind())),
            };
            if let Some(detail) = detail {
                r.failures.push(Counterexample {
                    code: serialize_code(&code),
                    mv: Some(mv.to_text(&code)),
                    detail,
                    rerun: rerun("f-welldefined", Some(rule), &code),
                });
            }
        }
    }
    r
}

/// Checks that cores are fixed and levels are bounded by the crossing
/// count. Moves that change the level are tallied as notes: a level is a
/// property of a diagram, and an R2 adding an odd pair raises it.
pub fn filtration_invariance(opts: &SuiteOptions) -> SuiteReport {
    let rule = opts.rule;
    let mut r = SuiteReport::new("filtration-invariance", Some(rule));
    let mut level_changes = 0;
    let mut pairs = 0;
    let mut witness = None;
    for code in corpus(opts) {
        let f = match filtration(&code, rule) {
            Ok(f) => f,
            Err(ProjectionError::Filtration { level: 0, .. }) => {
                r.skipped += 1;
                continue;
            }
            Err(e) => {
                r.cases += 1;
                r.failures.push(Counterexample {
                    code: serialize_code(&code),
                    mv: None,
                    detail: e.to_string(),
                    rerun: rerun("filtration-invariance", Some(rule), &code),
                });
                continue;
            }
        };
        r.cases += 1;
        let core_level = filtration(&f.core, rule).map(|g| g.level);
        if f.level > code.crossing_count() || core_level != Ok(0) {
            r.failures.push(Counterexample {
                code: serialize_code(&code),
                mv: None,
                detail: format!("level {}, core {} has level {:?}", f.level, f.core, core_level),
                rerun: rerun("filtration-invariance", Some(rule), &code),
            });
        }
        for mv in all_moves(&code) {
            let after = apply_move(&code, &mv).expect("enumerated moves apply");
            if let Ok(g) = filtration(&after, rule) {
                pairs += 1;
                if g.level != f.level {
                    level_changes += 1;
                    witness.get_or_insert_with(|| {
                        format!("{} (level {}) {} gives level {}", code, f.level, mv.to_text(&code), g.level)
                    });
                }
            }
        }
    }
    r.notes.push(format!("{level_changes} of {pairs} single moves change the filtration level"));
    if let Some(w) = witness {
        r.notes.push(format!("first level change: {w}"));
    }
    r
}

fn frame_orientable(code: &LinkCode) -> bool {
    orientability(&FramedGraph::from_code(code)).orientable
}

/// Seeded knot sequence with orientable ends for the repair suite.
///
/// The walk starts at an orientable knot with at most four chords and is cut
/// back to its last orientable diagram. When that leaves fewer than half the
/// moves, the first half of the walk is kept and retraced with inverse moves.
pub fn repair_corpus_sequence(seed: u64, length: usize, max_crossings: usize) -> DiagramSequence {
    let starts: Vec<LinkCode> = free_codes(4.min(max_crossings), 1)
        .into_iter()
        .filter(frame_orientable)
        .collect();
    let start = &starts[(seed % starts.len() as u64) as usize];
    let walk = random_walk(start, length, seed, Some(max_crossings));
    let end = (0..walk.codes.len())
        .rev()
        .find(|&i| frame_orientable(&walk.codes[i]))
        .expect("the start is orientable");
    if 2 * end >= length {
        return DiagramSequence {
            codes: walk.codes[..=end].to_vec(),
            moves: walk.moves[..end].to_vec(),
        };
    }
    let half = length / 2;
    let mut seq = DiagramSequence {
        codes: walk.codes[..=half].to_vec(),
        moves: walk.moves[..half].to_vec(),
    };
    for i in (0..half).rev() {
        let back = inverse(&walk.codes[i], &walk.moves[i]).expect("enumerated moves invert");
        seq.push(back, walk.codes[i].clone());
    }
    seq
}

pub fn repair(opts: &SuiteOptions) -> SuiteReport {
    let rule = opts.rule;
    let mut r = SuiteReport::new("repair", Some(rule));
    let mut with_bad_middle = Vec::new();
    let mut total_moves = 0;
    let fail = |r: &mut SuiteReport, seed: u64, seq: &DiagramSequence, detail: String| {
        r.failures.push(Counterexample {
            code: serialize_code(seq.first()),
            mv: None,
            detail: format!("seed {seed}: {detail}"),
            rerun: format!(
                "freeknot verify repair --rule {} --seeds {seed}..{seed} --max-crossings {} --length {}",
                rule.name(),
                opts.max_crossings,
                opts.length
            ),
        });
    };
    for seed in opts.seeds.clone() {
        let seq = repair_corpus_sequence(seed, opts.length, opts.max_crossings);
        r.cases += 1;
        total_moves += seq.moves.len();
        if let Err(f) = seq.replay() {
            fail(&mut r, seed, &seq, format!("generated input fails replay at {}: {}", f.index, f.reason));
            continue;
        }
        if seq.codes.iter().any(|c| !frame_orientable(c)) {
            with_bad_middle.push(seed);
        }
        let rep = match repair_sequence(&seq, rule) {
            Ok(rep) => rep,
            Err(e) => {
                fail(&mut r, seed, &seq, e.to_string());
                continue;
            }
        };
        let mut problems = Vec::new();
        if let Err(f) = rep.output.replay() {
            problems.push(format!("output fails replay at {}: {}", f.index, f.reason));
        }
        if rep.output.first() != seq.first() || rep.output.last() != seq.last() {
            problems.push("endpoints changed".into());
        }
        if !rep.all_orientable {
            problems.push("output has a non-orientable diagram".into());
        }
        for v in &rep.violations {
            problems.push(format!("witness at step {}: {} -> {} ({})", v.index, v.before, v.after, v.expected));
        }
        if !problems.is_empty() {
            fail(&mut r, seed, &seq, problems.join("; "));
        }
    }
    r.notes.push(format!("{total_moves} moves in total"));
    r.notes.push(format!(
        "{} sequences had a non-orientable diagram before repair",
        with_bad_middle.len()
    ));
    if let Some(s) = with_bad_middle.first() {
        r.notes.push(format!("first such seed: {s}"));
    }
    r
}

/// Fundamental cycles of a BFS spanning forest, one per non-tree edge.
fn tree_cycles(g: &FramedGraph) -> Vec<CycleClass> {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for e in 0..g.edge_count() {
        let (a, b) = g.edge_ends(e);
        let (u, v) = (vertex_of(a), vertex_of(b));
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree = vec![false; g.edge_count()];
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, e) in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some((u, e));
                    tree[e] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut out = Vec::new();
    for e in (0..g.edge_count()).filter(|&e| !tree[e]) {
        let (a, b) = g.edge_ends(e);
        let (mut u, mut v) = (vertex_of(a), vertex_of(b));
        let mut edges = vec![e];
        while u != v {
            if depth[u] < depth[v] {
                std::mem::swap(&mut u, &mut v);
            }
            let (p, pe) = parent[u].expect("non-root");
            edges.push(pe);
            u = p;
        }
        out.push(CycleClass::from_edges(g, edges));
    }
    out
}

pub fn span(opts: &SuiteOptions) -> SuiteReport {
    let mut r = SuiteReport::new("span", None);
    for (i, code) in corpus(opts).into_iter().enumerate() {
        let g = FramedGraph::from_code(&code);
        if g.vertex_count() == 0 {
            r.skipped += 1;
            continue;
        }
        r.cases += 1;
        let expected = g.edge_count() + g.graph_components() - g.vertex_count();
        let mut problems = Vec::new();
        let rank = family_rank(&g);
        if rank != expected {
            problems.push(format!("family rank {rank}, cycle space dimension {expected}"));
        }
        let basis = tree_cycles(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        for t in 0..opts.targets {
            let mut target = CycleClass::zero(&g);
            for c in &basis {
                if rng.gen_bool(0.5) {
                    target.add(c);
                }
            }
            match decompose_cycle(&g, &target) {
                Ok(d) if d.reconstruct(&g) == target => {}
                Ok(_) => problems.push(format!("target {t} reconstructs wrongly")),
                Err(e) => problems.push(format!("target {t}: {e}")),
            }
        }
        if !problems.is_empty() {
            r.failures.push(Counterexample {
                code: serialize_code(&code),
                mv: None,
                detail: problems.join("; "),
                rerun: rerun("span", None, &code),
            });
        }
    }
    r
}
