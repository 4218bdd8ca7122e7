//! Sequences of diagrams joined by moves, and their text files.
//!
//! File format: non-empty lines alternate between codes and moves, starting
//! and ending with a code. Lines starting with `#` are ignored.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::code::{parse_code_auto, serialize_code, CodeError, LinkCode};
use crate::moves::{apply_move, Move, MoveError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("line {line}: {source}")]
    Code { line: usize, source: CodeError },
    #[error("line {line}: {source}")]
    Move { line: usize, source: MoveError },
    #[error("a sequence file must start and end with a code")]
    Shape,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramSequence {
    pub codes: Vec<LinkCode>,
    pub moves: Vec<Move>,
}

/// Where and why replay failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplayFailure {
    pub index: usize,
    pub reason: String,
}

impl DiagramSequence {
    pub fn single(code: LinkCode) -> Self {
        DiagramSequence {
            codes: vec![code],
            moves: Vec::new(),
        }
    }

    pub fn push(&mut self, mv: Move, code: LinkCode) {
        self.moves.push(mv);
        self.codes.push(code);
    }

    pub fn first(&self) -> &LinkCode {
        &self.codes[0]
    }

    pub fn last(&self) -> &LinkCode {
        self.codes.last().expect("sequences hold at least one code")
    }

    /// Checks every step: a move must turn code `i` into code `i + 1`, a
    /// SAME marker must join codes with equal canonical forms.
    pub fn replay(&self) -> Result<(), ReplayFailure> {
        if self.codes.len() != self.moves.len() + 1 {
            return Err(ReplayFailure {
                index: 0,
                reason: "move count must be one less than code count".into(),
            });
        }
        for (i, m) in self.moves.iter().enumerate() {
            let (a, b) = (&self.codes[i], &self.codes[i + 1]);
            let image = match m {
                Move::Same => a.clone(),
                _ => apply_move(a, m).map_err(|e| ReplayFailure {
                    index: i,
                    reason: e.to_string(),
                })?,
            };
            if !image.equivalent_form(b) {
                return Err(ReplayFailure {
                    index: i,
                    reason: format!("{} gives {image}, not {b}", m.to_text(a)),
                });
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, SequenceError> {
        let mut codes = Vec::new();
        let mut moves = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = n + 1;
            if codes.len() == moves.len() {
                let code = parse_code_auto(line).map_err(|source| SequenceError::Code {
                    line: lineno,
                    source: relocate(source, lineno),
                })?;
                codes.push(code);
            } else {
                let mv = line.parse().map_err(|source| SequenceError::Move { line: lineno, source })?;
                moves.push(mv);
            }
        }
        if codes.is_empty() || codes.len() != moves.len() + 1 {
            return Err(SequenceError::Shape);
        }
        Ok(DiagramSequence { codes, moves })
    }
}

fn relocate(e: CodeError, line: usize) -> CodeError {
    match e {
        CodeError::Malformed { token, column, .. } => CodeError::Malformed { token, line, column },
        CodeError::EmptyCircle { column, .. } => CodeError::EmptyCircle { line, column },
        CodeError::StrayStar { column, .. } => CodeError::StrayStar { line, column },
        e => e,
    }
}

impl fmt::Display for DiagramSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", serialize_code(&self.codes[0]))?;
        for (i, m) in self.moves.iter().enumerate() {
            writeln!(f, "{}", m.to_text(&self.codes[i]))?;
            writeln!(f, "{}", serialize_code(&self.codes[i + 1]))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILE: &str = "# trefoil word down to the unknot\n1 2 3 1 2 3\nR2-:2,3\n1 1\n\nR1-:1\n*\n";

    #[test]
    fn parse_and_replay() {
        let s = DiagramSequence::parse(FILE).unwrap();
        assert_eq!(s.codes.len(), 3);
        assert_eq!(s.replay(), Ok(()));
        let again = DiagramSequence::parse(&s.to_string()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn corrupted_step_is_located() {
        let s = DiagramSequence::parse("1 2 3 1 2 3\nR2-:2,3\n1 1\nR2-:1,2\n*").unwrap();
        assert_eq!(s.replay().unwrap_err().index, 1);
        assert!(matches!(
            DiagramSequence::parse("1 1\nR9:1\n*"),
            Err(SequenceError::Move { line: 2, .. })
        ));
        let s = DiagramSequence::parse("1 2 3 1 2 3\nR2-:2,3\n1 1\nSAME\n*").unwrap();
        assert_eq!(s.replay().unwrap_err().index, 1);
    }

    #[test]
    fn shape_errors() {
        assert_eq!(DiagramSequence::parse("1 1\nR1-:1"), Err(SequenceError::Shape));
        assert!(matches!(
            DiagramSequence::parse("1 1\nR1-:1\n1 x"),
            Err(SequenceError::Code { line: 3, .. })
        ));
    }
}
