//! Reidemeister moves on Gauss codes.
//!
//! Additions are placed at gaps. Gaps are numbered globally: a circle of
//! length `L` owns `max(L, 1)` consecutive gap numbers and its gap `k`
//! inserts before token `k`. New crossings take the labels `max + 1` (and
//! `max + 2` for the second reidemeister move).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeKind, LinkCode, Passage, Pos, Sign, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("move `{mv}` is not applicable: {reason}")]
    Inapplicable { mv: String, reason: String },
    #[error("cannot parse move `{0}`")]
    Syntax(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    #[serde(rename = "R1_ADD")]
    R1Add,
    #[serde(rename = "R1_DEL")]
    R1Del,
    #[serde(rename = "R2_ADD")]
    R2Add,
    #[serde(rename = "R2_DEL")]
    R2Del,
    R3,
    #[serde(rename = "SAME")]
    Same,
}

impl MoveKind {
    pub fn name(self) -> &'static str {
        match self {
            MoveKind::R1Add => "R1_ADD",
            MoveKind::R1Del => "R1_DEL",
            MoveKind::R2Add => "R2_ADD",
            MoveKind::R2Del => "R2_DEL",
            MoveKind::R3 => "R3",
            MoveKind::Same => "SAME",
        }
    }

    /// The kind that undoes this one.
    pub fn reverse(self) -> MoveKind {
        match self {
            MoveKind::R1Add => MoveKind::R1Del,
            MoveKind::R1Del => MoveKind::R1Add,
            MoveKind::R2Add => MoveKind::R2Del,
            MoveKind::R2Del => MoveKind::R2Add,
            k => k,
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Passage of the first inserted token and sign of the first new crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Decoration {
    pub passage: Passage,
    pub sign: Sign,
}

impl Decoration {
    pub const ALL: [Decoration; 4] = [
        Decoration { passage: Passage::Over, sign: Sign::Positive },
        Decoration { passage: Passage::Over, sign: Sign::Negative },
        Decoration { passage: Passage::Under, sign: Sign::Positive },
        Decoration { passage: Passage::Under, sign: Sign::Negative },
    ];
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.passage {
            Passage::Over => 'O',
            Passage::Under => 'U',
        };
        let s = match self.sign {
            Sign::Positive => '+',
            Sign::Negative => '-',
        };
        write!(f, "{p}{s}")
    }
}

impl FromStr for Decoration {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let mut ch = s.chars();
        let passage = match ch.next() {
            Some('O') => Passage::Over,
            Some('U') => Passage::Under,
            _ => return Err(()),
        };
        let sign = match ch.next() {
            Some('+') => Sign::Positive,
            Some('-') | Some('−') => Sign::Negative,
            _ => return Err(()),
        };
        if ch.next().is_some() {
            return Err(());
        }
        Ok(Decoration { passage, sign })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    /// Kink inserted at a gap.
    R1Add { gap: usize, decoration: Option<Decoration> },
    R1Del { label: u32 },
    /// Tokens `x y` at the first gap and `x y` (or `y x` when reversed) at
    /// the second. Equal gaps put the second pair right after the first.
    R2Add { gaps: (usize, usize), reversed: bool, decoration: Option<Decoration> },
    R2Del { labels: (u32, u32) },
    /// Labels in increasing order `a < b < c`; arcs are the global start
    /// positions of the adjacent pairs `{a,b}`, `{a,c}`, `{b,c}`.
    R3 { labels: [u32; 3], arcs: Option<[usize; 3]> },
    Same,
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::R1Add { .. } => MoveKind::R1Add,
            Move::R1Del { .. } => MoveKind::R1Del,
            Move::R2Add { .. } => MoveKind::R2Add,
            Move::R2Del { .. } => MoveKind::R2Del,
            Move::R3 { .. } => MoveKind::R3,
            Move::Same => MoveKind::Same,
        }
    }

    /// Text form, leaving out the triangle arcs when the labels alone pin
    /// the site in `code`.
    pub fn to_text(&self, code: &LinkCode) -> String {
        if let Move::R3 { labels, arcs: Some(_) } = self {
            if r3_sites_for(code, *labels).len() == 1 {
                return Move::R3 { labels: *labels, arcs: None }.to_string();
            }
        }
        self.to_string()
    }

    /// Crossing labels at the move site, read in the code that holds them
    /// (the input for deletions and R3, the output for additions).
    pub fn site_labels(&self, before: &LinkCode) -> Vec<u32> {
        let m = before.max_label();
        match self {
            Move::R1Add { .. } => vec![m + 1],
            Move::R1Del { label } => vec![*label],
            Move::R2Add { .. } => vec![m + 1, m + 2],
            Move::R2Del { labels } => vec![labels.0, labels.1],
            Move::R3 { labels, .. } => labels.to_vec(),
            Move::Same => Vec::new(),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::R1Add { gap, decoration } => {
                write!(f, "R1+:@p{gap}")?;
                if let Some(d) = decoration {
                    write!(f, ":{d}")?;
                }
                Ok(())
            }
            Move::R1Del { label } => write!(f, "R1-:{label}"),
            Move::R2Add { gaps, reversed, decoration } => {
                write!(f, "R2+:@p{},@p{}", gaps.0, gaps.1)?;
                if *reversed {
                    f.write_str(":r")?;
                }
                if let Some(d) = decoration {
                    write!(f, ":{d}")?;
                }
                Ok(())
            }
            Move::R2Del { labels } => write!(f, "R2-:{},{}", labels.0, labels.1),
            Move::R3 { labels, arcs } => {
                write!(f, "R3:{},{},{}", labels[0], labels[1], labels[2])?;
                if let Some(a) = arcs {
                    write!(f, "@p{},p{},p{}", a[0], a[1], a[2])?;
                }
                Ok(())
            }
            Move::Same => f.write_str("SAME"),
        }
    }
}

fn parse_gap(s: &str) -> Option<usize> {
    s.strip_prefix("@p")?.parse().ok()
}

fn parse_labels(s: &str) -> Option<Vec<u32>> {
    s.split(',').map(|t| t.trim().parse().ok()).collect()
}

impl FromStr for Move {
    type Err = MoveError;

    fn from_str(text: &str) -> Result<Self, MoveError> {
        let s = text.trim();
        let bad = || MoveError::Syntax(s.to_string());
        if s == "SAME" {
            return Ok(Move::Same);
        }
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "R1-" => {
                let label = rest.parse().map_err(|_| bad())?;
                Ok(Move::R1Del { label })
            }
            "R2-" => match parse_labels(rest).as_deref() {
                Some(&[a, b]) => Ok(Move::R2Del { labels: (a.min(b), a.max(b)) }),
                _ => Err(bad()),
            },
            "R1+" => {
                let mut parts = rest.split(':');
                let gap = parts.next().and_then(parse_gap).ok_or_else(bad)?;
                let decoration = match parts.next() {
                    None => None,
                    Some(d) => Some(d.parse().map_err(|_| bad())?),
                };
                if parts.next().is_some() {
                    return Err(bad());
                }
                Ok(Move::R1Add { gap, decoration })
            }
            "R2+" => {
                let mut parts = rest.split(':');
                let (g1, g2) = parts.next().and_then(|g| g.split_once(',')).ok_or_else(bad)?;
                let gaps = (parse_gap(g1).ok_or_else(bad)?, parse_gap(g2).ok_or_else(bad)?);
                let mut reversed = false;
                let mut decoration = None;
                for p in parts {
                    if p == "r" && !reversed && decoration.is_none() {
                        reversed = true;
                    } else if decoration.is_none() {
                        decoration = Some(p.parse().map_err(|_| bad())?);
                    } else {
                        return Err(bad());
                    }
                }
                Ok(Move::R2Add { gaps, reversed, decoration })
            }
            "R3" => {
                let (ls, arcs) = match rest.split_once('@') {
                    Some((l, a)) => (l, Some(a)),
                    None => (rest, None),
                };
                let mut labels: [u32; 3] = match parse_labels(ls).as_deref() {
                    Some(&[a, b, c]) => [a, b, c],
                    _ => return Err(bad()),
                };
                let arcs = match arcs {
                    None => None,
                    Some(a) => {
                        if labels.windows(2).any(|w| w[0] >= w[1]) {
                            return Err(bad());
                        }
                        let ps: Option<Vec<usize>> = a
                            .split(',')
                            .map(|t| t.trim().strip_prefix('p').and_then(|n| n.parse().ok()))
                            .collect();
                        match ps.as_deref() {
                            Some(&[x, y, z]) => Some([x, y, z]),
                            _ => return Err(bad()),
                        }
                    }
                };
                labels.sort_unstable();
                Ok(Move::R3 { labels, arcs })
            }
            _ => Err(bad()),
        }
    }
}

/// Where every old global position went, and which new positions are new.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub old_to_new: Vec<Option<usize>>,
    pub inserted: Vec<usize>,
}

pub fn gap_count(code: &LinkCode) -> usize {
    code.circles().iter().map(|c| c.len().max(1)).sum()
}

/// Circle and insertion index of a global gap number.
pub fn gap_site(code: &LinkCode, mut gap: usize) -> Option<(usize, usize)> {
    for (ci, c) in code.circles().iter().enumerate() {
        let n = c.len().max(1);
        if gap < n {
            return Some((ci, gap));
        }
        gap -= n;
    }
    None
}

pub fn gap_number(code: &LinkCode, circle: usize, index: usize) -> usize {
    code.circles()[..circle].iter().map(|c| c.len().max(1)).sum::<usize>() + index
}

/// `q` directly follows `p` on a circle.
fn follows(code: &LinkCode, p: Pos, q: Pos) -> bool {
    let len = code.circles()[p.circle].len();
    p.circle == q.circle && len >= 2 && p != q && q.index == (p.index + 1) % len
}

/// The two strands of an R2 site: each is a pair of positions with the
/// second directly after the first.
type Strand = (Pos, Pos);

fn r2_pairings(code: &LinkCode, x: u32, y: u32) -> Vec<[Strand; 2]> {
    let occ = code.occurrences();
    let (Some(&[x1, x2]), Some(&[y1, y2])) = (occ.get(&x), occ.get(&y)) else {
        return Vec::new();
    };
    let strand = |u: Pos, w: Pos| {
        if follows(code, u, w) {
            Some((u, w))
        } else if follows(code, w, u) {
            Some((w, u))
        } else {
            None
        }
    };
    let mut out = Vec::new();
    for (a, b) in [((x1, y1), (x2, y2)), ((x1, y2), (x2, y1))] {
        if let (Some(s), Some(t)) = (strand(a.0, a.1), strand(b.0, b.1)) {
            out.push([s, t]);
        }
    }
    out
}

fn r2_pairing_valid(code: &LinkCode, x: u32, y: u32, p: &[Strand; 2]) -> bool {
    match code.kind() {
        CodeKind::Free => true,
        CodeKind::Virtual => {
            let s = p[0];
            code.token(s.0).passage == code.token(s.1).passage && code.sign(x) != code.sign(y)
        }
    }
}

fn valid_r2_pairing(code: &LinkCode, x: u32, y: u32) -> Option<[Strand; 2]> {
    if x == y {
        return None;
    }
    r2_pairings(code, x, y)
        .into_iter()
        .find(|p| r2_pairing_valid(code, x, y, p))
}

fn r1_pair(code: &LinkCode, label: u32) -> Option<Strand> {
    let [p, q] = *code.occurrences().get(&label)?;
    if follows(code, p, q) {
        Some((p, q))
    } else if follows(code, q, p) {
        Some((q, p))
    } else {
        None
    }
}

/// All adjacent pairs of distinct labels, keyed by the label pair.
fn arcs_by_pair(code: &LinkCode) -> BTreeMap<(u32, u32), Vec<usize>> {
    let mut m: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (ci, c) in code.circles().iter().enumerate() {
        if c.len() < 2 {
            continue;
        }
        for i in 0..c.len() {
            let (u, w) = (c[i].label, c[(i + 1) % c.len()].label);
            if u != w {
                let g = code.global_index(Pos { circle: ci, index: i });
                m.entry((u.min(w), u.max(w))).or_default().push(g);
            }
        }
    }
    m
}

fn arc_positions(code: &LinkCode, start: usize) -> (Pos, Pos) {
    let p = code.pos_of_global(start);
    (p, code.next(p))
}

fn r3_arcs_distinct(code: &LinkCode, arcs: [usize; 3]) -> bool {
    let mut ps: Vec<Pos> = arcs
        .iter()
        .flat_map(|&a| {
            let (p, q) = arc_positions(code, a);
            [p, q]
        })
        .collect();
    ps.sort_unstable();
    ps.dedup();
    ps.len() == 6
}

/// Checks that a classical triangle with these strands exists: one strand
/// over at both its crossings, one under at both, and crossing signs that
/// match the strand directions for one of the two cyclic arrangements.
fn r3_virtual_valid(code: &LinkCode, labels: [u32; 3], arcs: [usize; 3]) -> bool {
    let strands: Vec<(Token, Token)> = arcs
        .iter()
        .map(|&a| {
            let (p, q) = arc_positions(code, a);
            (code.token(p), code.token(q))
        })
        .collect();
    let level = |s: &(Token, Token)| (s.0.passage, s.1.passage);
    let has = |p: Passage| strands.iter().any(|s| level(s) == (Some(p), Some(p)));
    if !has(Passage::Over) || !has(Passage::Under) {
        return false;
    }
    let shared = |i: usize, j: usize| -> u32 {
        let (a, b) = (&strands[i], &strands[j]);
        [a.0.label, a.1.label]
            .into_iter()
            .find(|l| *l == b.0.label || *l == b.1.label)
            .expect("triangle strands share a crossing")
    };
    let sign = |l: u32| code.sign(l).map(Sign::as_i32).unwrap_or(1);
    let over_at = |i: usize, l: u32| {
        let s = &strands[i];
        let t = if s.0.label == l { s.0 } else { s.1 };
        t.passage == Some(Passage::Over)
    };
    debug_assert!(labels.iter().all(|l| strands.iter().any(|s| s.0.label == *l || s.1.label == *l)));
    for order in [[0usize, 1, 2], [0, 2, 1]] {
        // strand order[k] runs from its crossing with order[k-1] to its
        // crossing with order[k+1] when its direction agrees with the
        // counterclockwise boundary
        let eps: Vec<i32> = (0..3)
            .map(|k| {
                let s = order[k];
                let prev = order[(k + 2) % 3];
                if strands[s].0.label == shared(s, prev) {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let ok = (0..3).all(|k| {
            let (a, b) = (order[k], order[(k + 1) % 3]);
            let v = shared(a, b);
            let e = eps[k] * eps[(k + 1) % 3];
            let predicted = if over_at(a, v) { e } else { -e };
            predicted == sign(v)
        });
        if ok {
            return true;
        }
    }
    false
}

fn r3_sites_for(code: &LinkCode, labels: [u32; 3]) -> Vec<[usize; 3]> {
    let [a, b, c] = labels;
    if !(a < b && b < c) {
        return Vec::new();
    }
    let arcs = arcs_by_pair(code);
    let get = |u: u32, w: u32| arcs.get(&(u, w)).cloned().unwrap_or_default();
    let mut out = Vec::new();
    for &ab in &get(a, b) {
        for &ac in &get(a, c) {
            for &bc in &get(b, c) {
                let site = [ab, ac, bc];
                if r3_arcs_distinct(code, site)
                    && (code.kind() == CodeKind::Free || r3_virtual_valid(code, labels, site))
                {
                    out.push(site);
                }
            }
        }
    }
    out
}

/// Every R3 site of the code, ordered by labels then arcs.
pub fn r3_sites(code: &LinkCode) -> Vec<([u32; 3], [usize; 3])> {
    let arcs = arcs_by_pair(code);
    let labels = code.labels();
    let mut out = Vec::new();
    for (i, &a) in labels.iter().enumerate() {
        for (j, &b) in labels.iter().enumerate().skip(i + 1) {
            if !arcs.contains_key(&(a, b)) {
                continue;
            }
            for &c in &labels[j + 1..] {
                if arcs.contains_key(&(a, c)) && arcs.contains_key(&(b, c)) {
                    for s in r3_sites_for(code, [a, b, c]) {
                        out.push(([a, b, c], s));
                    }
                }
            }
        }
    }
    out
}

struct Edit {
    delete: Vec<bool>,
    replace: Vec<Option<Token>>,
    inserts: BTreeMap<(usize, usize), Vec<Token>>,
    signs: BTreeMap<u32, Sign>,
}

impl Edit {
    fn new(code: &LinkCode) -> Self {
        let n = code.total_positions();
        Edit {
            delete: vec![false; n],
            replace: vec![None; n],
            inserts: BTreeMap::new(),
            signs: code.signs().clone(),
        }
    }

    fn build(self, code: &LinkCode) -> (LinkCode, Trace) {
        let mut trace = Trace {
            old_to_new: vec![None; code.total_positions()],
            inserted: Vec::new(),
        };
        let mut circles = Vec::with_capacity(code.num_circles());
        let mut next = 0usize;
        let mut old = 0usize;
        for (ci, c) in code.circles().iter().enumerate() {
            let mut out = Vec::new();
            for k in 0..c.len().max(1) {
                if let Some(ins) = self.inserts.get(&(ci, k)) {
                    for t in ins {
                        out.push(*t);
                        trace.inserted.push(next);
                        next += 1;
                    }
                }
                if k < c.len() {
                    if !self.delete[old] {
                        out.push(self.replace[old].unwrap_or(c[k]));
                        trace.old_to_new[old] = Some(next);
                        next += 1;
                    }
                    old += 1;
                }
            }
            circles.push(out);
        }
        let code = LinkCode::from_parts_unchecked(code.kind(), circles, self.signs);
        (code, trace)
    }
}

fn inapplicable(mv: &Move, reason: impl Into<String>) -> MoveError {
    MoveError::Inapplicable {
        mv: mv.to_string(),
        reason: reason.into(),
    }
}

fn check_decoration(code: &LinkCode, mv: &Move, d: &Option<Decoration>) -> Result<(), MoveError> {
    match (code.kind(), d) {
        (CodeKind::Free, None) | (CodeKind::Virtual, Some(_)) => Ok(()),
        (CodeKind::Free, Some(_)) => Err(inapplicable(mv, "free codes take no passage or sign")),
        (CodeKind::Virtual, None) => Err(inapplicable(mv, "virtual codes need a passage and sign")),
    }
}

fn new_token(label: u32, d: &Option<Decoration>, flip: bool) -> Token {
    Token {
        label,
        passage: d.map(|d| if flip { d.passage.flip() } else { d.passage }),
    }
}

/// Resolves the triangle arcs of an R3 move, checking them when given.
pub fn resolve_r3(code: &LinkCode, mv: &Move) -> Result<[usize; 3], MoveError> {
    let Move::R3 { labels, arcs } = mv else {
        return Err(inapplicable(mv, "not an R3 move"));
    };
    let sites = r3_sites_for(code, *labels);
    match arcs {
        Some(a) if sites.contains(a) => Ok(*a),
        Some(_) => Err(inapplicable(mv, "arcs do not bound a movable triangle")),
        None => match sites.as_slice() {
            [one] => Ok(*one),
            [] => Err(inapplicable(mv, "labels do not bound a movable triangle")),
            _ => Err(inapplicable(mv, "several triangles on these labels; give arcs")),
        },
    }
}

pub fn apply_move(code: &LinkCode, mv: &Move) -> Result<LinkCode, MoveError> {
    apply_move_traced(code, mv).map(|(c, _)| c)
}

pub fn apply_move_traced(code: &LinkCode, mv: &Move) -> Result<(LinkCode, Trace), MoveError> {
    let mut edit = Edit::new(code);
    match mv {
        Move::Same => {}
        Move::R1Add { gap, decoration } => {
            check_decoration(code, mv, decoration)?;
            let site = gap_site(code, *gap).ok_or_else(|| inapplicable(mv, "gap out of range"))?;
            let x = code.max_label() + 1;
            edit.inserts.insert(
                site,
                vec![new_token(x, decoration, false), new_token(x, decoration, true)],
            );
            if let Some(d) = decoration {
                edit.signs.insert(x, d.sign);
            }
        }
        Move::R1Del { label } => {
            let (p, q) = r1_pair(code, *label)
                .ok_or_else(|| inapplicable(mv, "endpoints are not adjacent"))?;
            edit.delete[code.global_index(p)] = true;
            edit.delete[code.global_index(q)] = true;
            edit.signs.remove(label);
        }
        Move::R2Add { gaps, reversed, decoration } => {
            check_decoration(code, mv, decoration)?;
            if gaps.0 > gaps.1 {
                return Err(inapplicable(mv, "gaps must be in increasing order"));
            }
            let s1 = gap_site(code, gaps.0).ok_or_else(|| inapplicable(mv, "gap out of range"))?;
            let s2 = gap_site(code, gaps.1).ok_or_else(|| inapplicable(mv, "gap out of range"))?;
            let (x, y) = (code.max_label() + 1, code.max_label() + 2);
            let first = vec![new_token(x, decoration, false), new_token(y, decoration, false)];
            let mut second = vec![new_token(x, decoration, true), new_token(y, decoration, true)];
            if *reversed {
                second.reverse();
            }
            edit.inserts.entry(s1).or_default().extend(first);
            edit.inserts.entry(s2).or_default().extend(second);
            if let Some(d) = decoration {
                edit.signs.insert(x, d.sign);
                edit.signs.insert(y, d.sign.flip());
            }
        }
        Move::R2Del { labels: (x, y) } => {
            let p = valid_r2_pairing(code, *x, *y)
                .ok_or_else(|| inapplicable(mv, "no bigon on these labels"))?;
            for s in p {
                edit.delete[code.global_index(s.0)] = true;
                edit.delete[code.global_index(s.1)] = true;
            }
            edit.signs.remove(x);
            edit.signs.remove(y);
        }
        Move::R3 { .. } => {
            let arcs = resolve_r3(code, mv)?;
            for a in arcs {
                let (p, q) = arc_positions(code, a);
                let (gp, gq) = (code.global_index(p), code.global_index(q));
                edit.replace[gp] = Some(code.token(q));
                edit.replace[gq] = Some(code.token(p));
            }
        }
    }
    Ok(edit.build(code))
}

/// First position after `from` (exclusive) that survives, walking forward
/// on its circle.
fn surviving_follower(code: &LinkCode, trace: &Trace, from: Pos) -> Option<usize> {
    let len = code.circles()[from.circle].len();
    let mut p = from;
    for _ in 0..len {
        p = code.next(p);
        if let Some(n) = trace.old_to_new[code.global_index(p)] {
            return Some(n);
        }
    }
    None
}

/// Gap in the new code sitting where the strand ending at `last` was.
fn gap_after(code: &LinkCode, after: &LinkCode, trace: &Trace, last: Pos) -> usize {
    match surviving_follower(code, trace, last) {
        Some(n) => {
            let p = after.pos_of_global(n);
            gap_number(after, p.circle, p.index)
        }
        None => gap_number(after, last.circle, 0),
    }
}

/// The move that undoes `mv` on the code it produces from `code`.
pub fn inverse(code: &LinkCode, mv: &Move) -> Result<Move, MoveError> {
    let (after, trace) = apply_move_traced(code, mv)?;
    Ok(match mv {
        Move::Same => Move::Same,
        Move::R3 { labels, .. } => Move::R3 {
            labels: *labels,
            arcs: Some(resolve_r3(code, mv)?),
        },
        Move::R1Add { .. } => Move::R1Del {
            label: code.max_label() + 1,
        },
        Move::R2Add { .. } => Move::R2Del {
            labels: (code.max_label() + 1, code.max_label() + 2),
        },
        Move::R1Del { label } => {
            let (p, q) = r1_pair(code, *label).expect("checked by apply");
            Move::R1Add {
                gap: gap_after(code, &after, &trace, q),
                decoration: code.token(p).passage.map(|passage| Decoration {
                    passage,
                    sign: code.sign(*label).expect("virtual label has a sign"),
                }),
            }
        }
        Move::R2Del { labels: (x, y) } => {
            let [s, t] = valid_r2_pairing(code, *x, *y).expect("checked by apply");
            let gs = gap_after(code, &after, &trace, s.1);
            let gt = gap_after(code, &after, &trace, t.1);
            let s_first = if gs != gt { gs < gt } else { code.next(s.1) == t.0 };
            let (first, second) = if s_first { (s, t) } else { (t, s) };
            let lead = code.token(first.0);
            let reversed = code.token(second.0).label != lead.label;
            Move::R2Add {
                gaps: (gs.min(gt), gs.max(gt)),
                reversed,
                decoration: lead.passage.map(|passage| Decoration {
                    passage,
                    sign: code.sign(lead.label).expect("virtual label has a sign"),
                }),
            }
        }
    })
}

/// Limits on the additions produced by enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub additions: bool,
    /// Additions whose result exceeds this crossing count are skipped.
    pub max_crossings: Option<usize>,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            additions: true,
            max_crossings: None,
        }
    }
}

fn decorations(code: &LinkCode) -> Vec<Option<Decoration>> {
    match code.kind() {
        CodeKind::Free => vec![None],
        CodeKind::Virtual => Decoration::ALL.iter().copied().map(Some).collect(),
    }
}

/// Applicable moves in the order R1_DEL, R2_DEL, R3, R1_ADD, R2_ADD.
pub fn enumerate_moves(code: &LinkCode) -> Vec<(Move, LinkCode)> {
    enumerate_moves_with(code, &EnumOptions::default())
}

pub fn candidate_moves(code: &LinkCode, opts: &EnumOptions) -> Vec<Move> {
    let mut out = Vec::new();
    let labels = code.labels();
    for &l in &labels {
        if r1_pair(code, l).is_some() {
            out.push(Move::R1Del { label: l });
        }
    }
    for (i, &x) in labels.iter().enumerate() {
        for &y in &labels[i + 1..] {
            if valid_r2_pairing(code, x, y).is_some() {
                out.push(Move::R2Del { labels: (x, y) });
            }
        }
    }
    for (labels, arcs) in r3_sites(code) {
        out.push(Move::R3 { labels, arcs: Some(arcs) });
    }
    if !opts.additions {
        return out;
    }
    let n = code.crossing_count();
    let cap = opts.max_crossings.unwrap_or(usize::MAX);
    let gaps = gap_count(code);
    let decos = decorations(code);
    if n < cap {
        for gap in 0..gaps {
            for d in &decos {
                out.push(Move::R1Add { gap, decoration: *d });
            }
        }
    }
    if n + 1 < cap {
        for g1 in 0..gaps {
            for g2 in g1..gaps {
                for reversed in [false, true] {
                    for d in &decos {
                        out.push(Move::R2Add {
                            gaps: (g1, g2),
                            reversed,
                            decoration: *d,
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn enumerate_moves_with(code: &LinkCode, opts: &EnumOptions) -> Vec<(Move, LinkCode)> {
    candidate_moves(code, opts)
        .into_iter()
        .map(|m| {
            let c = apply_move(code, &m).expect("enumerated moves apply");
            (m, c)
        })
        .collect()
}
