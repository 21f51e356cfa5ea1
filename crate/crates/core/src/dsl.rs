//! Textual format for interactions, actions, traces and positions.
//!
//! ```text
//! interaction := "0" | action | binop "(" interaction "," interaction ")" | loopop "(" interaction ")"
//! binop       := "strict" | "seq" | "alt" | "par"
//! loopop      := "loopStrict" | "loopSeq" | "loopPar"
//! action      := ident ("!" | "?") ident
//! trace       := "" | action ("." action)*
//! ```
//!
//! Whitespace between tokens is ignored, as is `#` up to the end of its
//! line. Printing is canonical (no whitespace).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Result;
use crate::term::{Action, BinaryOp, Direction, Interaction, LoopKind, Signature};

/// Marker used for the empty trace in line-oriented files and text output.
pub const EMPTY_TRACE_MARKER: &str = "<eps>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

/// A finite sequence of actions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Trace(Vec<Action>);

impl Trace {
    pub fn new(actions: Vec<Action>) -> Self {
        Trace(actions)
    }

    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn head(&self) -> Option<&Action> {
        self.0.first()
    }

    /// The first `k` actions.
    pub fn prefix(&self, k: usize) -> Trace {
        Trace(self.0[..k.min(self.0.len())].to_vec())
    }

    /// `act.t`
    pub fn prepend(&self, act: Action) -> Trace {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(act);
        v.extend_from_slice(&self.0);
        Trace(v)
    }

    pub fn push(&mut self, act: Action) {
        self.0.push(act);
    }

    pub fn is_prefix_of(&self, other: &Trace) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn into_actions(self) -> Vec<Action> {
        self.0
    }
}

impl FromIterator<Action> for Trace {
    fn from_iter<I: IntoIterator<Item = Action>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

/// Dot-separated; the empty trace prints as the empty string.
impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl From<Trace> for String {
    fn from(t: Trace) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for Trace {
    type Error = crate::error::Error;

    fn try_from(s: String) -> Result<Self> {
        parse_trace_permissive(&s)
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interaction::Empty => f.write_str("0"),
            Interaction::Act(a) => write!(f, "{a}"),
            Interaction::Binary(op, l, r) => write!(f, "{}({l},{r})", op.keyword()),
            Interaction::Loop(k, b) => write!(f, "{}({b})", k.keyword()),
        }
    }
}

pub fn print_interaction(i: &Interaction) -> String {
    i.to_string()
}

/// Parses an interaction and checks every action against `sig`.
pub fn parse_interaction(text: &str, sig: &Signature) -> Result<Interaction> {
    let i = parse_interaction_permissive(text)?;
    sig.check_interaction(&i)?;
    Ok(i)
}

/// Parses an interaction without a signature; use [`Signature::infer`] to
/// recover the one it implies.
pub fn parse_interaction_permissive(text: &str) -> Result<Interaction> {
    let mut p = Parser::new(text);
    let i = p.interaction()?;
    p.expect_end()?;
    Ok(i)
}

pub fn parse_trace(text: &str, sig: &Signature) -> Result<Trace> {
    let t = parse_trace_permissive(text)?;
    for a in t.actions() {
        sig.check_action(a)?;
    }
    Ok(t)
}

pub fn parse_trace_permissive(text: &str) -> Result<Trace> {
    let mut p = Parser::new(text);
    let mut actions = Vec::new();
    if p.peek().is_some() {
        actions.push(p.action()?);
        while p.eat(b'.') {
            actions.push(p.action()?);
        }
    }
    p.expect_end()?;
    Ok(Trace(actions))
}

pub fn parse_action(text: &str) -> Result<Action> {
    let mut p = Parser::new(text);
    let a = p.action()?;
    p.expect_end()?;
    Ok(a)
}

/// Reads a trace file: one trace per line, `#` starts a comment line, blank
/// lines are skipped and `<eps>` stands for the empty trace.
pub fn parse_trace_lines(content: &str, sig: Option<&Signature>) -> Result<Vec<Trace>> {
    let mut out = Vec::new();
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == EMPTY_TRACE_MARKER {
            out.push(Trace::empty());
            continue;
        }
        let t = match sig {
            Some(sig) => parse_trace(line, sig)?,
            None => parse_trace_permissive(line)?,
        };
        out.push(t);
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b'#' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn found(&mut self) -> String {
        self.skip_ws();
        match self.src[self.pos..].chars().next() {
            None => "end of input".to_string(),
            Some(c) => format!("`{c}`"),
        }
    }

    fn error(&mut self, expected: impl Into<String>) -> ParseError {
        let found = self.found();
        ParseError {
            offset: self.pos,
            expected: expected.into(),
            found,
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(format!("`{}`", b as char)))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error("end of input")),
        }
    }

    fn ident(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        let start = self.pos;
        if start >= bytes.len() || !bytes[start].is_ascii_alphabetic() {
            return None;
        }
        let mut end = start + 1;
        while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
            end += 1;
        }
        self.pos = end;
        Some((start, &self.src[start..end]))
    }

    fn direction(&mut self) -> Option<Direction> {
        if self.eat(b'!') {
            Some(Direction::Emit)
        } else if self.eat(b'?') {
            Some(Direction::Receive)
        } else {
            None
        }
    }

    fn action(&mut self) -> Result<Action, ParseError> {
        let Some((_, lifeline)) = self.ident() else {
            return Err(self.error("an action `lifeline!message` or `lifeline?message`"));
        };
        self.action_rest(lifeline)
    }

    fn action_rest(&mut self, lifeline: &str) -> Result<Action, ParseError> {
        let Some(d) = self.direction() else {
            return Err(self.error("`!` or `?`"));
        };
        let Some((_, message)) = self.ident() else {
            return Err(self.error("a message identifier"));
        };
        Ok(Action::new(lifeline, d, message))
    }

    fn interaction(&mut self) -> Result<Interaction, ParseError> {
        if self.eat(b'0') {
            return Ok(Interaction::Empty);
        }
        let Some((start, word)) = self.ident() else {
            return Err(self.error("an interaction"));
        };
        if self.peek() != Some(b'(') {
            return self.action_rest(word).map(Interaction::Act);
        }
        let binary = BinaryOp::ALL.into_iter().find(|op| op.keyword() == word);
        let looped = LoopKind::ALL.into_iter().find(|k| k.keyword() == word);
        self.expect(b'(')?;
        let term = if let Some(op) = binary {
            let l = self.interaction()?;
            self.expect(b',')?;
            let r = self.interaction()?;
            Interaction::binary(op, l, r)
        } else if let Some(k) = looped {
            Interaction::looped(k, self.interaction()?)
        } else {
            return Err(ParseError {
                offset: start,
                expected: "an operator (strict, seq, alt, par, loopStrict, loopSeq, loopPar)".into(),
                found: format!("`{word}`"),
            });
        };
        self.expect(b')')?;
        Ok(term)
    }
}
