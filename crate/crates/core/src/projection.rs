//! The map f that drops odd crossings, its iteration to a fixed core, and
//! repair of move sequences by replacing every diagram with its core.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::atoms::orientability;
use crate::code::{serialize_code, CodeKind, LinkCode};
use crate::graph::{intersection_graph, unicursal_components, FramedGraph};
use crate::moves::{apply_move, candidate_moves, gap_number, Decoration, EnumOptions, Move, MoveKind};
use crate::parity::{ParityAssignment, ParityError, ParityRule};
use crate::sequence::{DiagramSequence, ReplayFailure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("parity assignment does not cover exactly the crossings of the code")]
    DomainMismatch,
    #[error("filtration stopped at level {level}: {source}")]
    Filtration {
        level: usize,
        trace: Vec<LinkCode>,
        source: ParityError,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot carry step {index} through the connecting fingers: {reason}")]
    ConnectifyUnsupported { index: usize, reason: String },
}

/// Deletes the odd crossings and splices the circles.
pub fn map_f(code: &LinkCode, assignment: &ParityAssignment) -> Result<LinkCode, ProjectionError> {
    let labels: BTreeSet<u32> = code.labels().into_iter().collect();
    let domain: BTreeSet<u32> = assignment.0.keys().copied().collect();
    if labels != domain {
        return Err(ProjectionError::DomainMismatch);
    }
    Ok(code.without_labels(&assignment.odd_labels()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationResult {
    pub level: usize,
    pub core: LinkCode,
    pub trace: Vec<LinkCode>,
}

/// Applies f with freshly computed parity until nothing is odd.
pub fn filtration(code: &LinkCode, rule: &dyn ParityRule) -> Result<FiltrationResult, ProjectionError> {
    let mut trace = vec![code.clone()];
    loop {
        let cur = trace.last().expect("non-empty");
        let p = match rule.assign(cur) {
            Ok(p) => p,
            Err(source) => {
                return Err(ProjectionError::Filtration {
                    level: trace.len() - 1,
                    trace,
                    source,
                })
            }
        };
        if p.all_even() {
            break;
        }
        let next = map_f(cur, &p)?;
        trace.push(next);
    }
    Ok(FiltrationResult {
        level: trace.len() - 1,
        core: trace.last().expect("non-empty").clone(),
        trace,
    })
}

fn connected(code: &LinkCode) -> bool {
    let g = FramedGraph::from_code(code);
    intersection_graph(&g, &unicursal_components(&g)).is_connected()
}

fn touches(mv: &Move, before: &LinkCode, fingers: &[u32]) -> bool {
    mv.site_labels(before).iter().any(|l| fingers.contains(l))
}

/// Rewrites a link sequence so that every diagram has a connected
/// intersection graph. Circle 0 gets a finger (an R2 pair) to every other
/// circle, placed before the first token of each; each original move is
/// then matched by a move of the same kind away from the fingers, and the
/// fingers are removed at the end.
pub fn connectify_sequence(seq: &DiagramSequence) -> Result<DiagramSequence, ProjectionError> {
    let k = seq.first().num_circles();
    if k <= 1 || seq.codes.iter().all(connected) {
        return Ok(seq.clone());
    }
    let decoration = match seq.first().kind() {
        CodeKind::Free => None,
        CodeKind::Virtual => Some(Decoration::ALL[0]),
    };
    let mut out = DiagramSequence::single(seq.first().clone());
    let mut fingers: Vec<u32> = Vec::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for c in 1..k {
        let cur = out.last().clone();
        let mv = Move::R2Add {
            gaps: (gap_number(&cur, 0, 0), gap_number(&cur, c, 0)),
            reversed: false,
            decoration,
        };
        let next = apply_move(&cur, &mv).map_err(|e| ProjectionError::ConnectifyUnsupported {
            index: 0,
            reason: e.to_string(),
        })?;
        let m = cur.max_label();
        fingers.extend([m + 1, m + 2]);
        pairs.push((m + 1, m + 2));
        out.push(mv, next);
    }
    for (i, mv) in seq.moves.iter().enumerate() {
        let cur = out.last().clone();
        let target = &seq.codes[i + 1];
        if *mv == Move::Same {
            out.push(Move::Same, cur);
            continue;
        }
        let opts = EnumOptions {
            additions: matches!(mv.kind(), MoveKind::R1Add | MoveKind::R2Add),
            max_crossings: None,
        };
        let found = candidate_moves(&cur, &opts)
            .into_iter()
            .filter(|m| m.kind() == mv.kind() && !touches(m, &cur, &fingers))
            .find_map(|m| {
                let next = apply_move(&cur, &m).ok()?;
                (next.without_labels(&fingers).equivalent_form(target) && connected(&next))
                    .then_some((m, next))
            });
        match found {
            Some((m, next)) => out.push(m, next),
            None => {
                return Err(ProjectionError::ConnectifyUnsupported {
                    index: i,
                    reason: format!("no {} away from the fingers matches {}", mv.kind(), mv.to_text(&seq.codes[i])),
                })
            }
        }
    }
    for &(x, y) in pairs.iter().rev() {
        let cur = out.last().clone();
        let mv = Move::R2Del { labels: (x, y) };
        let next = apply_move(&cur, &mv).map_err(|e| ProjectionError::ConnectifyUnsupported {
            index: seq.moves.len(),
            reason: e.to_string(),
        })?;
        out.push(mv, next);
    }
    if out.last() != seq.last() {
        out.push(Move::Same, seq.last().clone());
    }
    Ok(out)
}

/// A move of the given kind taking `a` to a diagram with the canonical form
/// of `b`.
pub fn find_move(a: &LinkCode, b: &LinkCode, kind: MoveKind) -> Option<Move> {
    let is_addition = matches!(kind, MoveKind::R1Add | MoveKind::R2Add);
    if is_addition {
        // cheap necessary check through the reverse deletion
        let back = candidate_moves(b, &EnumOptions { additions: false, max_crossings: None });
        let reachable = back
            .iter()
            .filter(|m| m.kind() == kind.reverse())
            .any(|m| apply_move(b, m).is_ok_and(|c| c.equivalent_form(a)));
        if !reachable {
            return None;
        }
    }
    let opts = EnumOptions {
        additions: is_addition,
        max_crossings: None,
    };
    candidate_moves(a, &opts)
        .into_iter()
        .filter(|m| m.kind() == kind)
        .find(|m| apply_move(a, m).is_ok_and(|c| c.equivalent_form(b)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepVerdict {
    pub index: usize,
    pub input_move: String,
    pub output_move: String,
    pub ok: bool,
}

/// Two consecutive cores that are neither equal nor one move of the input
/// step's kind apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub before: String,
    pub after: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairReport {
    pub input: DiagramSequence,
    pub output: DiagramSequence,
    pub connectified: bool,
    /// Highest filtration level met along the sequence.
    pub iterations: usize,
    pub all_orientable: bool,
    pub steps: Vec<StepVerdict>,
    pub violations: Vec<Violation>,
    /// The rule is experimental, so violations are warnings.
    pub experimental: bool,
}

impl RepairReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.all_orientable
    }
}

fn frame_orientable(code: &LinkCode) -> bool {
    orientability(&FramedGraph::from_code(code)).orientable
}

/// Replaces every diagram by its f-core and checks that consecutive cores
/// are equal or one move of the same kind apart.
pub fn repair_sequence(seq: &DiagramSequence, rule: &dyn ParityRule) -> Result<RepairReport, ProjectionError> {
    seq.replay()
        .map_err(|f| ProjectionError::Precondition(format!("input does not replay at step {}: {}", f.index, f.reason)))?;
    for (name, c) in [("first", seq.first()), ("last", seq.last())] {
        if !frame_orientable(c) {
            return Err(ProjectionError::Precondition(format!(
                "{name} diagram {} has a non-orientable atom",
                serialize_code(c)
            )));
        }
    }
    let work = connectify_sequence(seq)?;
    let connectified = work != *seq;
    let mut cores = Vec::with_capacity(work.codes.len());
    let mut iterations = 0;
    for c in &work.codes {
        let f = filtration(c, rule).map_err(|e| ProjectionError::Precondition(e.to_string()))?;
        iterations = iterations.max(f.level);
        cores.push(f.core);
    }
    let mut violations = Vec::new();
    for (i, c) in [(0, &cores[0]), (cores.len() - 1, cores.last().expect("non-empty"))] {
        if !c.equivalent_form(&work.codes[i]) {
            violations.push(Violation {
                index: i,
                before: serialize_code(&work.codes[i]),
                after: serialize_code(c),
                expected: "endpoint fixed by f".into(),
            });
        }
    }
    let mut output = DiagramSequence::single(cores[0].clone());
    let mut steps = Vec::new();
    for (i, mv) in work.moves.iter().enumerate() {
        let (a, b) = (&cores[i], &cores[i + 1]);
        let found = if a.equivalent_form(b) {
            Some(Move::Same)
        } else if *mv == Move::Same {
            None
        } else {
            find_move(a, b, mv.kind())
        };
        steps.push(StepVerdict {
            index: i,
            input_move: mv.to_text(&work.codes[i]),
            output_move: found.as_ref().map(|m| m.to_text(a)).unwrap_or_default(),
            ok: found.is_some(),
        });
        match found {
            Some(m) => output.push(m, b.clone()),
            None => {
                violations.push(Violation {
                    index: i,
                    before: serialize_code(a),
                    after: serialize_code(b),
                    expected: format!("equal cores or one {}", mv.kind()),
                });
                output.push(Move::Same, b.clone());
            }
        }
    }
    let all_orientable = cores.iter().all(frame_orientable);
    Ok(RepairReport {
        input: seq.clone(),
        output,
        connectified,
        iterations,
        all_orientable,
        steps,
        violations,
        experimental: rule.experimental(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramReport {
    pub code: String,
    pub orientable: bool,
    pub components: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceReport {
    pub replayable: bool,
    pub failure: Option<ReplayFailure>,
    pub all_orientable: bool,
    pub diagrams: Vec<DiagramReport>,
}

pub fn verify_sequence(seq: &DiagramSequence) -> SequenceReport {
    let failure = seq.replay().err();
    let diagrams: Vec<DiagramReport> = seq
        .codes
        .iter()
        .map(|c| DiagramReport {
            code: serialize_code(c),
            orientable: frame_orientable(c),
            components: unicursal_components(&FramedGraph::from_code(c)).count,
        })
        .collect();
    SequenceReport {
        replayable: failure.is_none(),
        failure,
        all_orientable: diagrams.iter().all(|d| d.orientable),
        diagrams,
    }
}
