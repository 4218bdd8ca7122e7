//! Parity rules on crossings, the homological parity of walks, and the
//! agreement check between the two.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{serialize_code, LinkCode};
use crate::cycles::{generating_family, CycleWalk, PassageTag};
use crate::graph::FramedGraph;
use crate::moves::{apply_move, Move};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParityError {
    #[error("rule `{rule}` does not apply: {reason}")]
    NotApplicable { rule: &'static str, reason: String },
    #[error("code is not in G: some circle meets the others an odd number of times")]
    NotInG,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Crossing label to Z2, 1 meaning odd.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityAssignment(pub BTreeMap<u32, u8>);

impl ParityAssignment {
    pub fn get(&self, label: u32) -> u8 {
        self.0.get(&label).copied().unwrap_or(0)
    }

    pub fn is_odd(&self, label: u32) -> bool {
        self.get(label) == 1
    }

    pub fn odd_labels(&self) -> Vec<u32> {
        self.0.iter().filter(|(_, &p)| p == 1).map(|(&l, _)| l).collect()
    }

    pub fn all_even(&self) -> bool {
        self.0.values().all(|&p| p == 0)
    }
}

impl fmt::Display for ParityAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, p)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}: {}", if *p == 1 { "odd" } else { "even" })?;
        }
        Ok(())
    }
}

pub trait ParityRule: Send + Sync {
    fn name(&self) -> &'static str;

    /// Why the rule does not apply, or `None` when it does.
    fn check(&self, code: &LinkCode) -> Option<String>;

    fn applicable(&self, code: &LinkCode) -> bool {
        self.check(code).is_none()
    }

    /// Rules whose axioms are not known to hold in general.
    fn experimental(&self) -> bool {
        false
    }

    fn compute(&self, code: &LinkCode) -> ParityAssignment;

    fn assign(&self, code: &LinkCode) -> Result<ParityAssignment, ParityError> {
        match self.check(code) {
            Some(reason) => Err(ParityError::NotApplicable {
                rule: self.name(),
                reason,
            }),
            None => Ok(self.compute(code)),
        }
    }
}

/// Chord linking parity of a single circle.
pub struct Gaussian;

/// Mixed crossings odd, self-crossings even.
pub struct Component;

/// Self-crossings by arc linking count, mixed crossings odd.
pub struct HybridExperimental;

/// Every crossing even.
pub struct Zero;

pub static GAUSSIAN: Gaussian = Gaussian;
pub static COMPONENT: Component = Component;
pub static HYBRID: HybridExperimental = HybridExperimental;
pub static ZERO: Zero = Zero;

pub const RULE_NAMES: [&str; 4] = ["gaussian", "component", "hybrid-experimental", "zero"];

pub fn rule_by_name(name: &str) -> Option<&'static dyn ParityRule> {
    match name {
        "gaussian" => Some(&GAUSSIAN),
        "component" => Some(&COMPONENT),
        "hybrid-experimental" | "hybrid" => Some(&HYBRID),
        "zero" => Some(&ZERO),
        _ => None,
    }
}

/// Number of crossing endpoints strictly between the two occurrences of a
/// self-crossing, on its circle.
fn arc_endpoint_count(code: &LinkCode, label: u32) -> usize {
    let [p, q] = code.occurrences()[&label];
    debug_assert_eq!(p.circle, q.circle);
    q.index - p.index - 1
}

impl ParityRule for Gaussian {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn check(&self, code: &LinkCode) -> Option<String> {
        (code.num_circles() != 1).then(|| format!("{} circles, a knot is required", code.num_circles()))
    }

    fn compute(&self, code: &LinkCode) -> ParityAssignment {
        ParityAssignment(
            code.labels()
                .into_iter()
                .map(|l| (l, (arc_endpoint_count(code, l) % 2) as u8))
                .collect(),
        )
    }
}

impl ParityRule for Component {
    fn name(&self) -> &'static str {
        "component"
    }

    fn check(&self, code: &LinkCode) -> Option<String> {
        (code.num_circles() < 2).then(|| "a link with at least two circles is required".to_string())
    }

    fn compute(&self, code: &LinkCode) -> ParityAssignment {
        ParityAssignment(
            code.labels()
                .into_iter()
                .map(|l| (l, u8::from(!code.is_self_crossing(l))))
                .collect(),
        )
    }
}

impl ParityRule for HybridExperimental {
    fn name(&self) -> &'static str {
        "hybrid-experimental"
    }

    fn check(&self, _code: &LinkCode) -> Option<String> {
        None
    }

    fn experimental(&self) -> bool {
        true
    }

    fn compute(&self, code: &LinkCode) -> ParityAssignment {
        ParityAssignment(
            code.labels()
                .into_iter()
                .map(|l| {
                    let p = if code.is_self_crossing(l) {
                        arc_endpoint_count(code, l) % 2
                    } else {
                        1
                    };
                    (l, p as u8)
                })
                .collect(),
        )
    }
}

impl ParityRule for Zero {
    fn name(&self) -> &'static str {
        "zero"
    }

    fn check(&self, _code: &LinkCode) -> Option<String> {
        None
    }

    fn compute(&self, code: &LinkCode) -> ParityAssignment {
        ParityAssignment(code.labels().into_iter().map(|l| (l, 0)).collect())
    }
}

pub fn gaussian_parity_knot(code: &LinkCode) -> Result<ParityAssignment, ParityError> {
    GAUSSIAN.assign(code)
}

pub fn component_parity(code: &LinkCode) -> Result<ParityAssignment, ParityError> {
    COMPONENT.assign(code)
}

/// Every circle carries an even number of mixed-crossing endpoints.
pub fn in_class_g(code: &LinkCode) -> bool {
    code.circles().iter().all(|c| {
        c.iter().filter(|t| !code.is_self_crossing(t.label)).count() % 2 == 0
    })
}

/// Number of transversal passages of the walk, mod 2.
pub fn gaussian_homological_parity(code: &LinkCode, walk: &CycleWalk) -> Result<u8, ParityError> {
    if !in_class_g(code) {
        return Err(ParityError::NotInG);
    }
    Ok(homological_value(walk))
}

fn homological_value(walk: &CycleWalk) -> u8 {
    (walk.transversal_count() % 2) as u8
}

/// Sum of the assignment over the rotation visits of the walk.
pub fn rotation_sum(graph: &FramedGraph, assignment: &ParityAssignment, walk: &CycleWalk) -> u8 {
    let s: u32 = walk
        .visits()
        .iter()
        .filter(|v| v.tag() == PassageTag::Rotation)
        .map(|v| u32::from(assignment.get(graph.label(v.vertex()))))
        .sum();
    (s % 2) as u8
}

/// Index of the first generating-family member where the homological value
/// differs from the rotation sum, if any.
pub fn agreement_witness(
    code: &LinkCode,
    assignment: &ParityAssignment,
) -> Result<Option<usize>, ParityError> {
    if !in_class_g(code) {
        return Err(ParityError::NotInG);
    }
    let graph = FramedGraph::from_code(code);
    Ok(generating_family(&graph)
        .iter()
        .position(|m| homological_value(&m.walk) != rotation_sum(&graph, assignment, &m.walk)))
}

pub fn agrees(code: &LinkCode, assignment: &ParityAssignment) -> Result<bool, ParityError> {
    agreement_witness(code, assignment).map(|w| w.is_none())
}


/// One checked clause of the parity axioms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub clause: String,
    pub site: Vec<u32>,
    pub before: Vec<u8>,
    pub after: Vec<u8>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub rule: String,
    pub code: String,
    #[serde(rename = "move")]
    pub mv: String,
    pub clauses: Vec<ClauseResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClauseResult> {
        self.clauses.iter().filter(|c| !c.pass)
    }
}

/// Checks the three move axioms and that crossings away from the move keep
/// their parity. R3 keeps labels, so each triangle vertex is compared with
/// the vertex of the same label after the move.
pub fn verify_parity_axioms(
    rule: &dyn ParityRule,
    code: &LinkCode,
    mv: &Move,
) -> Result<AxiomReport, ParityError> {
    let after = apply_move(code, mv).map_err(|e| ParityError::Precondition(e.to_string()))?;
    let p0 = rule.assign(code)?;
    let p1 = rule.assign(&after)?;
    let site = mv.site_labels(code);
    let vals = |p: &ParityAssignment| site.iter().map(|&l| p.get(l)).collect::<Vec<u8>>();
    let mut clauses = Vec::new();
    let mut push = |clause: &str, site: Vec<u32>, before: Vec<u8>, after: Vec<u8>, pass: bool| {
        clauses.push(ClauseResult {
            clause: clause.to_string(),
            site,
            before,
            after,
            pass,
        })
    };
    match mv {
        Move::R1Add { .. } => {
            let a = vals(&p1);
            push("R1", site.clone(), vec![], a.clone(), a[0] == 0);
        }
        Move::R1Del { .. } => {
            let b = vals(&p0);
            push("R1", site.clone(), b.clone(), vec![], b[0] == 0);
        }
        Move::R2Add { .. } => {
            let a = vals(&p1);
            push("R2", site.clone(), vec![], a.clone(), a[0] == a[1]);
        }
        Move::R2Del { .. } => {
            let b = vals(&p0);
            push("R2", site.clone(), b.clone(), vec![], b[0] == b[1]);
        }
        Move::R3 { .. } => {
            let (b, a) = (vals(&p0), vals(&p1));
            let sum = |v: &[u8]| v.iter().map(|&x| u32::from(x)).sum::<u32>() % 2 == 0;
            push("R3-sum", site.clone(), b.clone(), a.clone(), sum(&b) && sum(&a));
            for (i, &l) in site.iter().enumerate() {
                push("R3-correspondence", vec![l], vec![b[i]], vec![a[i]], b[i] == a[i]);
            }
        }
        Move::Same => {}
    }
    let before_labels: std::collections::BTreeSet<u32> = code.labels().into_iter().collect();
    for l in after.labels() {
        if site.contains(&l) || !before_labels.contains(&l) {
            continue;
        }
        let (b, a) = (p0.get(l), p1.get(l));
        push("spectator", vec![l], vec![b], vec![a], a == b);
    }
    Ok(AxiomReport {
        rule: rule.name().to_string(),
        code: serialize_code(code),
        mv: mv.to_text(code),
        clauses,
    })
}
