//! Gauss codes for free and virtual links.
//!
//! A [`LinkCode`] is a list of circles, each a cyclic word of crossing labels.
//! Every label occurs exactly twice. Free codes carry nothing else; virtual
//! codes record an over/under passage per occurrence and a sign per label.
//!
//! Text grammar: circles are separated by `;`, tokens by whitespace, `#`
//! starts a comment. A free token is a decimal label, a virtual token is
//! `O<label><sign>` or `U<label><sign>` with sign `+` or `-`. A circle with
//! no crossings is written `*`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CodeKind {
    Free,
    Virtual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Passage {
    Over,
    Under,
}

impl Passage {
    pub fn flip(self) -> Self {
        match self {
            Passage::Over => Passage::Under,
            Passage::Under => Passage::Over,
        }
    }

    fn letter(self) -> char {
        match self {
            Passage::Over => 'O',
            Passage::Under => 'U',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

/// One visit of a circle to a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Token {
    pub label: u32,
    pub passage: Option<Passage>,
}

impl Token {
    pub fn free(label: u32) -> Self {
        Token { label, passage: None }
    }
}

/// Position of a token: circle index and index inside the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub circle: usize,
    pub index: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("label {label} occurs {count} time(s); every label must occur exactly twice")]
    LabelCount { label: u32, count: usize },
    #[error("label 0 is not allowed; labels are positive integers")]
    ZeroLabel,
    #[error("label {label} has two {passage:?} passages")]
    DuplicatePassage { label: u32, passage: Passage },
    #[error("label {0}: the two occurrences carry different signs")]
    SignMismatch(u32),
    #[error("label {0}: virtual code is missing a sign")]
    MissingSign(u32),
    #[error("token kinds do not match the code kind {0:?}")]
    KindMismatch(CodeKind),
    #[error("line {line}, column {column}: malformed token `{token}`")]
    Malformed {
        token: String,
        line: usize,
        column: usize,
    },
    #[error("line {line}, column {column}: empty circle (write `*` for a crossing-free circle)")]
    EmptyCircle { line: usize, column: usize },
    #[error("`*` must stand alone in its circle (line {line}, column {column})")]
    StrayStar { line: usize, column: usize },
    #[error("no circles in input")]
    NoCircles,
}

/// A multi-component Gauss code.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinkCode {
    kind: CodeKind,
    circles: Vec<Vec<Token>>,
    signs: BTreeMap<u32, Sign>,
}

impl LinkCode {
    /// Builds a free code from plain label words.
    pub fn free(circles: Vec<Vec<u32>>) -> Result<Self, CodeError> {
        let circles = circles
            .into_iter()
            .map(|c| c.into_iter().map(Token::free).collect())
            .collect();
        Self::from_parts(CodeKind::Free, circles, BTreeMap::new())
    }

    /// Builds a code from tokens, checking every invariant.
    pub fn from_parts(
        kind: CodeKind,
        circles: Vec<Vec<Token>>,
        signs: BTreeMap<u32, Sign>,
    ) -> Result<Self, CodeError> {
        if circles.is_empty() {
            return Err(CodeError::NoCircles);
        }
        let mut seen: BTreeMap<u32, Vec<Option<Passage>>> = BTreeMap::new();
        for t in circles.iter().flatten() {
            if t.label == 0 {
                return Err(CodeError::ZeroLabel);
            }
            if (kind == CodeKind::Free) != t.passage.is_none() {
                return Err(CodeError::KindMismatch(kind));
            }
            seen.entry(t.label).or_default().push(t.passage);
        }
        for (&label, ps) in &seen {
            if ps.len() != 2 {
                return Err(CodeError::LabelCount {
                    label,
                    count: ps.len(),
                });
            }
            if kind == CodeKind::Virtual {
                if ps[0] == ps[1] {
                    return Err(CodeError::DuplicatePassage {
                        label,
                        passage: ps[0].unwrap(),
                    });
                }
                if !signs.contains_key(&label) {
                    return Err(CodeError::MissingSign(label));
                }
            }
        }
        let signs = match kind {
            CodeKind::Free => BTreeMap::new(),
            CodeKind::Virtual => signs
                .into_iter()
                .filter(|(l, _)| seen.contains_key(l))
                .collect(),
        };
        Ok(LinkCode {
            kind,
            circles,
            signs,
        })
    }

    /// The unknot: one crossing-free circle.
    pub fn unknot(kind: CodeKind) -> Self {
        LinkCode {
            kind,
            circles: vec![Vec::new()],
            signs: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn circles(&self) -> &[Vec<Token>] {
        &self.circles
    }

    pub fn signs(&self) -> &BTreeMap<u32, Sign> {
        &self.signs
    }

    pub fn sign(&self, label: u32) -> Option<Sign> {
        self.signs.get(&label).copied()
    }

    pub fn num_circles(&self) -> usize {
        self.circles.len()
    }

    pub fn crossing_count(&self) -> usize {
        self.circles.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_knot(&self) -> bool {
        self.circles.len() == 1
    }

    /// Labels in increasing order.
    pub fn labels(&self) -> Vec<u32> {
        let mut ls: Vec<u32> = self.circles.iter().flatten().map(|t| t.label).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    pub fn max_label(&self) -> u32 {
        self.circles
            .iter()
            .flatten()
            .map(|t| t.label)
            .max()
            .unwrap_or(0)
    }

    /// Plain label words, passages dropped.
    pub fn words(&self) -> Vec<Vec<u32>> {
        self.circles
            .iter()
            .map(|c| c.iter().map(|t| t.label).collect())
            .collect()
    }

    /// The same code with passages and signs forgotten.
    pub fn to_free(&self) -> LinkCode {
        LinkCode {
            kind: CodeKind::Free,
            circles: self
                .circles
                .iter()
                .map(|c| c.iter().map(|t| Token::free(t.label)).collect())
                .collect(),
            signs: BTreeMap::new(),
        }
    }

    pub fn token(&self, pos: Pos) -> Token {
        self.circles[pos.circle][pos.index]
    }

    pub fn next(&self, pos: Pos) -> Pos {
        let len = self.circles[pos.circle].len();
        Pos {
            circle: pos.circle,
            index: (pos.index + 1) % len,
        }
    }

    pub fn prev(&self, pos: Pos) -> Pos {
        let len = self.circles[pos.circle].len();
        Pos {
            circle: pos.circle,
            index: (pos.index + len - 1) % len,
        }
    }

    /// Offset of each circle in the global position numbering.
    pub fn circle_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.circles
            .iter()
            .map(|c| {
                let o = acc;
                acc += c.len();
                o
            })
            .collect()
    }

    pub fn total_positions(&self) -> usize {
        self.circles.iter().map(Vec::len).sum()
    }

    pub fn global_index(&self, pos: Pos) -> usize {
        self.circles[..pos.circle].iter().map(Vec::len).sum::<usize>() + pos.index
    }

    pub fn pos_of_global(&self, mut g: usize) -> Pos {
        for (circle, c) in self.circles.iter().enumerate() {
            if g < c.len() {
                return Pos { circle, index: g };
            }
            g -= c.len();
        }
        panic!("global position out of range");
    }

    /// Both positions of every label, in global order.
    pub fn occurrences(&self) -> BTreeMap<u32, [Pos; 2]> {
        let mut tmp: BTreeMap<u32, Vec<Pos>> = BTreeMap::new();
        for (ci, c) in self.circles.iter().enumerate() {
            for (i, t) in c.iter().enumerate() {
                tmp.entry(t.label).or_default().push(Pos {
                    circle: ci,
                    index: i,
                });
            }
        }
        tmp.into_iter().map(|(l, v)| (l, [v[0], v[1]])).collect()
    }

    /// True when both occurrences of `label` lie on one circle.
    pub fn is_self_crossing(&self, label: u32) -> bool {
        self.occurrences()
            .get(&label)
            .map(|[p, q]| p.circle == q.circle)
            .unwrap_or(false)
    }

    /// Removes the given labels and splices the circles. Empty circles stay.
    pub fn without_labels(&self, drop: &[u32]) -> LinkCode {
        LinkCode {
            kind: self.kind,
            circles: self
                .circles
                .iter()
                .map(|c| {
                    c.iter()
                        .filter(|t| !drop.contains(&t.label))
                        .copied()
                        .collect()
                })
                .collect(),
            signs: self
                .signs
                .iter()
                .filter(|(l, _)| !drop.contains(l))
                .map(|(&l, &s)| (l, s))
                .collect(),
        }
    }

    /// Raw constructor for callers that already hold valid parts.
    pub(crate) fn from_parts_unchecked(
        kind: CodeKind,
        circles: Vec<Vec<Token>>,
        signs: BTreeMap<u32, Sign>,
    ) -> Self {
        debug_assert!(Self::from_parts(kind, circles.clone(), signs.clone()).is_ok());
        LinkCode {
            kind,
            circles,
            signs,
        }
    }

    /// Lexicographically minimal representative over circle rotations,
    /// circle reversals, circle reorderings and relabelings. Labels of the
    /// result are `1..=n` in order of first appearance.
    pub fn canonical_form(&self) -> LinkCode {
        let mut search = CanonSearch {
            code: self,
            used: vec![false; self.circles.len()],
            current: Vec::with_capacity(self.circles.len()),
            best: None,
        };
        search.run(&Relabel {
            map: vec![0; self.max_label() as usize + 1],
            next: 1,
        });
        let best = search.best.expect("at least one circle");
        let mut circles = Vec::with_capacity(best.len());
        let mut signs = BTreeMap::new();
        for c in best {
            circles.push(
                c.iter()
                    .map(|k| {
                        if let Some(s) = k.sign {
                            signs.insert(k.label, s);
                        }
                        Token {
                            label: k.label,
                            passage: k.passage,
                        }
                    })
                    .collect(),
            );
        }
        LinkCode {
            kind: self.kind,
            circles,
            signs,
        }
    }

    /// True when the two codes are equal up to the canonical symmetries.
    pub fn equivalent_form(&self, other: &LinkCode) -> bool {
        self.kind == other.kind
            && self.crossing_count() == other.crossing_count()
            && self.num_circles() == other.num_circles()
            && self.canonical_form() == other.canonical_form()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CanonKey {
    label: u32,
    passage: Option<Passage>,
    sign: Option<Sign>,
}

/// New labels in order of first appearance; 0 marks unassigned.
#[derive(Clone, PartialEq, Eq)]
struct Relabel {
    map: Vec<u32>,
    next: u32,
}

impl Relabel {
    fn get(&mut self, label: u32) -> u32 {
        let slot = &mut self.map[label as usize];
        if *slot == 0 {
            *slot = self.next;
            self.next += 1;
        }
        *slot
    }
}

struct CanonSearch<'a> {
    code: &'a LinkCode,
    used: Vec<bool>,
    current: Vec<Vec<CanonKey>>,
    best: Option<Vec<Vec<CanonKey>>>,
}

impl CanonSearch<'_> {
    fn run(&mut self, relabel: &Relabel) {
        let depth = self.current.len();
        let prefix = match &self.best {
            Some(best) => self.current.as_slice().cmp(&best[..depth]),
            None => std::cmp::Ordering::Less,
        };
        if prefix == std::cmp::Ordering::Greater {
            return;
        }
        if depth == self.code.circles.len() {
            if prefix == std::cmp::Ordering::Less {
                self.best = Some(self.current.clone());
            }
            return;
        }
        // The result is compared circle by circle, so only the candidates
        // whose next word is minimal can lead to the minimum.
        let mut candidates: Vec<(usize, Vec<CanonKey>, Relabel)> = Vec::new();
        for ci in 0..self.code.circles.len() {
            if self.used[ci] {
                continue;
            }
            let circle = &self.code.circles[ci];
            let len = circle.len();
            let variants = if len == 0 { 1 } else { 2 * len };
            for v in 0..variants {
                let (rot, rev) = (v % len.max(1), v >= len && len > 0);
                let mut map = relabel.clone();
                let mut word = Vec::with_capacity(len);
                for i in 0..len {
                    let idx = if rev {
                        (rot + len - i) % len
                    } else {
                        (rot + i) % len
                    };
                    let t = circle[idx];
                    let label = map.get(t.label);
                    word.push(CanonKey {
                        label,
                        passage: t.passage,
                        sign: self.code.signs.get(&t.label).copied(),
                    });
                }
                match candidates.first() {
                    Some((_, w, _)) if word > *w => continue,
                    Some((_, w, _)) if word < *w => candidates.clear(),
                    _ => {}
                }
                if !candidates.iter().any(|(c, _, m)| *c == ci && *m == map) {
                    candidates.push((ci, word, map));
                }
            }
        }
        if let (Some(best), Some((_, w, _))) = (&self.best, candidates.first()) {
            if prefix == std::cmp::Ordering::Equal && *w > best[depth] {
                return;
            }
        }
        for (ci, word, map) in candidates {
            self.used[ci] = true;
            self.current.push(word);
            self.run(&map);
            self.current.pop();
            self.used[ci] = false;
        }
    }
}

/// Parses a code of the given kind.
pub fn parse_code(text: &str, kind: CodeKind) -> Result<LinkCode, CodeError> {
    let lexed = lex(text)?;
    let mut circles = Vec::new();
    let mut signs: BTreeMap<u32, Sign> = BTreeMap::new();
    for circle in lexed {
        let mut toks = Vec::new();
        for lt in &circle.tokens {
            if lt.text == "*" {
                if circle.tokens.len() != 1 {
                    return Err(CodeError::StrayStar {
                        line: lt.line,
                        column: lt.column,
                    });
                }
                continue;
            }
            let malformed = || CodeError::Malformed {
                token: lt.text.clone(),
                line: lt.line,
                column: lt.column,
            };
            match kind {
                CodeKind::Free => {
                    if !lt.text.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(malformed());
                    }
                    let label: u32 = lt.text.parse().map_err(|_| malformed())?;
                    toks.push(Token::free(label));
                }
                CodeKind::Virtual => {
                    let mut chars: Vec<char> = lt.text.chars().collect();
                    if chars.len() < 3 {
                        return Err(malformed());
                    }
                    let passage = match chars.remove(0) {
                        'O' | 'o' => Passage::Over,
                        'U' | 'u' => Passage::Under,
                        _ => return Err(malformed()),
                    };
                    let sign = match chars.pop().unwrap() {
                        '+' => Sign::Positive,
                        '-' | '\u{2212}' => Sign::Negative,
                        _ => return Err(malformed()),
                    };
                    let digits: String = chars.into_iter().collect();
                    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(malformed());
                    }
                    let label: u32 = digits.parse().map_err(|_| malformed())?;
                    if let Some(prev) = signs.insert(label, sign) {
                        if prev != sign {
                            return Err(CodeError::SignMismatch(label));
                        }
                    }
                    toks.push(Token {
                        label,
                        passage: Some(passage),
                    });
                }
            }
        }
        circles.push(toks);
    }
    LinkCode::from_parts(kind, circles, signs)
}

/// Parses a code, detecting the kind from the first crossing token.
pub fn parse_code_auto(text: &str) -> Result<LinkCode, CodeError> {
    let lexed = lex(text)?;
    let first = lexed
        .iter()
        .flat_map(|c| c.tokens.iter())
        .find(|t| t.text != "*");
    let kind = match first {
        Some(t) if t.text.starts_with(['O', 'U', 'o', 'u']) => CodeKind::Virtual,
        _ => CodeKind::Free,
    };
    parse_code(text, kind)
}

/// Canonical text of a code.
pub fn serialize_code(code: &LinkCode) -> String {
    code.to_string()
}

impl fmt::Display for LinkCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (ci, circle) in self.circles.iter().enumerate() {
            if ci > 0 {
                f.write_str(" ; ")?;
            }
            if circle.is_empty() {
                f.write_str("*")?;
                continue;
            }
            for (i, t) in circle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                match t.passage {
                    None => write!(f, "{}", t.label)?,
                    Some(p) => {
                        let s = self.signs.get(&t.label).copied().unwrap_or(Sign::Positive);
                        write!(f, "{}{}{}", p.letter(), t.label, s.symbol())?
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for LinkCode {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_code_auto(s)
    }
}

struct LexToken {
    text: String,
    line: usize,
    column: usize,
}

struct LexCircle {
    tokens: Vec<LexToken>,
}

fn lex(text: &str) -> Result<Vec<LexCircle>, CodeError> {
    let mut circles = vec![LexCircle { tokens: Vec::new() }];
    let mut sep_at = (1, 1);
    let mut any = false;
    for (li, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut cur: Option<LexToken> = None;
        for (col, ch) in line.chars().enumerate() {
            if ch.is_whitespace() || ch == ';' {
                if let Some(t) = cur.take() {
                    circles.last_mut().unwrap().tokens.push(t);
                }
                if ch == ';' {
                    if circles.last().unwrap().tokens.is_empty() {
                        return Err(CodeError::EmptyCircle {
                            line: li + 1,
                            column: col + 1,
                        });
                    }
                    circles.push(LexCircle { tokens: Vec::new() });
                    sep_at = (li + 1, col + 1);
                }
                continue;
            }
            any = true;
            cur.get_or_insert_with(|| LexToken {
                text: String::new(),
                line: li + 1,
                column: col + 1,
            })
            .text
            .push(ch);
        }
        if let Some(t) = cur.take() {
            circles.last_mut().unwrap().tokens.push(t);
        }
    }
    if !any {
        return Err(CodeError::NoCircles);
    }
    if circles.last().unwrap().tokens.is_empty() {
        return Err(CodeError::EmptyCircle {
            line: sep_at.0,
            column: sep_at.1,
        });
    }
    Ok(circles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(s: &str) -> LinkCode {
        parse_code(s, CodeKind::Free).unwrap()
    }

    #[test]
    fn parses_knot_and_link() {
        let k = free("1 2 1 2");
        assert_eq!(k.num_circles(), 1);
        assert_eq!(k.labels(), vec![1, 2]);
        let l = free("1 2 ; 1 2");
        assert_eq!(l.num_circles(), 2);
        assert_eq!(l.crossing_count(), 2);
    }

    #[test]
    fn virtual_trefoil_round_trip() {
        let text = "O1+ O2+ U1+ U2+";
        let c = parse_code(text, CodeKind::Virtual).unwrap();
        assert_eq!(c.sign(1), Some(Sign::Positive));
        assert_eq!(c.to_string(), text);
        assert_eq!(parse_code(&c.to_string(), CodeKind::Virtual).unwrap(), c);
    }

    #[test]
    fn empty_circle_sentinel() {
        let c = LinkCode::unknot(CodeKind::Free);
        assert_eq!(c.to_string(), "*");
        assert_eq!(free("*"), c);
        assert_eq!(free("1 1 ; *").to_string(), "1 1 ; *");
    }

    #[test]
    fn comments_and_unicode_minus() {
        let c = parse_code("O1\u{2212} U1\u{2212} # kink", CodeKind::Virtual).unwrap();
        assert_eq!(c.to_string(), "O1- U1-");
    }

    #[test]
    fn rejects_bad_label_counts() {
        assert!(matches!(
            parse_code("1 2 1", CodeKind::Free),
            Err(CodeError::LabelCount { label: 2, count: 1 })
        ));
        assert!(matches!(
            parse_code("1 1 1 1", CodeKind::Free),
            Err(CodeError::LabelCount { label: 1, count: 4 })
        ));
    }

    #[test]
    fn rejects_virtual_defects() {
        assert!(matches!(
            parse_code("O1+ O1+", CodeKind::Virtual),
            Err(CodeError::DuplicatePassage { label: 1, .. })
        ));
        assert!(matches!(
            parse_code("O1+ U1-", CodeKind::Virtual),
            Err(CodeError::SignMismatch(1))
        ));
        assert!(matches!(
            parse_code("O1 U1", CodeKind::Virtual),
            Err(CodeError::Malformed { .. })
        ));
    }

    #[test]
    fn malformed_tokens_are_located() {
        match parse_code("1 x 1", CodeKind::Free) {
            Err(CodeError::Malformed { token, line, column }) => {
                assert_eq!((token.as_str(), line, column), ("x", 1, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_code("1 1 ; ; 2 2", CodeKind::Free),
            Err(CodeError::EmptyCircle { .. })
        ));
        assert!(matches!(
            parse_code("* 1 1", CodeKind::Free),
            Err(CodeError::StrayStar { .. })
        ));
        assert!(matches!(parse_code("  ", CodeKind::Free), Err(CodeError::NoCircles)));
    }

    #[test]
    fn auto_detects_kind() {
        assert_eq!(parse_code_auto("1 1").unwrap().kind(), CodeKind::Free);
        assert_eq!(
            parse_code_auto("O1+ U1+").unwrap().kind(),
            CodeKind::Virtual
        );
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(free("2 1 2 1").canonical_form(), free("1 2 1 2"));
        assert_eq!(free("1 1").canonical_form(), free("1 1"));
        assert_eq!(free("3 1 2 3 1 2").canonical_form(), free("1 2 3 1 2 3"));
        assert_eq!(free("7 7 ; *").canonical_form(), free("* ; 1 1"));
    }

    #[test]
    fn canonical_uses_reversal() {
        // 1 2 3 1 3 2 reversed is 2 3 1 3 2 1 ~ relabeled 1 2 3 2 1 3
        let a = free("1 2 3 1 3 2");
        let b = free("1 2 3 2 1 3");
        assert_eq!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn without_labels_splices() {
        let c = free("1 2 3 1 2 3").without_labels(&[2, 3]);
        assert_eq!(c, free("1 1"));
        let d = free("1 2 ; 1 2").without_labels(&[1, 2]);
        assert_eq!(d.to_string(), "* ; *");
    }
}
