//! Interaction terms: actions, signatures, the term algebra and Dewey positions.
//!
//! Terms are plain values. Every operation returns a fresh term and the only
//! notion of equality is structural (`seq(0,x)` and `x` are different terms).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Emit,
    Receive,
}

impl Direction {
    pub fn symbol(self) -> char {
        match self {
            Direction::Emit => '!',
            Direction::Receive => '?',
        }
    }
}

/// A communication action `l!m` or `l?m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    lifeline: Arc<str>,
    direction: Direction,
    message: Arc<str>,
}

impl Action {
    pub fn new(lifeline: impl Into<Arc<str>>, direction: Direction, message: impl Into<Arc<str>>) -> Self {
        Action {
            lifeline: lifeline.into(),
            direction,
            message: message.into(),
        }
    }

    pub fn emit(lifeline: impl Into<Arc<str>>, message: impl Into<Arc<str>>) -> Self {
        Self::new(lifeline, Direction::Emit, message)
    }

    pub fn receive(lifeline: impl Into<Arc<str>>, message: impl Into<Arc<str>>) -> Self {
        Self::new(lifeline, Direction::Receive, message)
    }

    /// The lifeline the action occurs on.
    pub fn lifeline(&self) -> &str {
        &self.lifeline
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    fn token_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.lifeline
            .bytes()
            .chain(std::iter::once(self.direction.symbol() as u8))
            .chain(self.message.bytes())
    }
}

/// Actions order by their printed token (`a!m1` < `a?m1` < `b!m1`), so that
/// sorted trace sets read in plain lexicographic order.
impl Ord for Action {
    fn cmp(&self, other: &Self) -> Ordering {
        self.token_bytes().cmp(other.token_bytes())
    }
}

impl PartialOrd for Action {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.lifeline, self.direction.symbol(), self.message)
    }
}

/// Returns whether `s` matches `[a-zA-Z][a-zA-Z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() => bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_'),
        _ => false,
    }
}

/// A signature `(L, M)`: the lifelines and messages terms may mention.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    lifelines: Vec<Arc<str>>,
    messages: Vec<Arc<str>>,
}

impl Signature {
    pub fn new<L, M>(lifelines: L, messages: M) -> Result<Self>
    where
        L: IntoIterator,
        L::Item: AsRef<str>,
        M: IntoIterator,
        M::Item: AsRef<str>,
    {
        let lifelines = Self::collect_ids("lifeline", lifelines)?;
        let messages = Self::collect_ids("message", messages)?;
        if lifelines.is_empty() || messages.is_empty() {
            return Err(Error::Signature(
                "a signature needs at least one lifeline and one message".into(),
            ));
        }
        Ok(Signature { lifelines, messages })
    }

    fn collect_ids<I>(kind: &str, ids: I) -> Result<Vec<Arc<str>>>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        let mut out: Vec<Arc<str>> = Vec::new();
        for id in ids {
            let id = id.as_ref();
            if !is_identifier(id) {
                return Err(Error::Signature(format!("invalid {kind} identifier `{id}`")));
            }
            if out.iter().any(|x| &**x == id) {
                return Err(Error::Signature(format!("duplicate {kind} `{id}`")));
            }
            out.push(id.into());
        }
        Ok(out)
    }

    /// The signature of `n_l` lifelines `a, b, c, ...` and `n_m` messages
    /// (`m` when there is a single one, `m1, m2, ...` otherwise).
    pub fn generated(n_lifelines: usize, n_messages: usize) -> Result<Self> {
        let lifelines = (0..n_lifelines).map(|k| {
            if k < 26 {
                ((b'a' + k as u8) as char).to_string()
            } else {
                format!("l{k}")
            }
        });
        let messages: Vec<String> = if n_messages == 1 {
            vec!["m".to_string()]
        } else {
            (1..=n_messages).map(|k| format!("m{k}")).collect()
        };
        Self::new(lifelines.collect::<Vec<_>>(), messages)
    }

    /// The smallest signature covering every action of the given terms, in
    /// order of first occurrence. Fails only when no action occurs at all.
    pub fn infer<'a>(terms: impl IntoIterator<Item = &'a Interaction>) -> Result<Self> {
        let mut lifelines: Vec<Arc<str>> = Vec::new();
        let mut messages: Vec<Arc<str>> = Vec::new();
        for term in terms {
            term.for_each_action(&mut |a| {
                if !lifelines.iter().any(|l| **l == *a.lifeline) {
                    lifelines.push(a.lifeline.clone());
                }
                if !messages.iter().any(|m| **m == *a.message) {
                    messages.push(a.message.clone());
                }
            });
        }
        if lifelines.is_empty() {
            return Err(Error::Signature(
                "cannot infer a signature from a term without actions".into(),
            ));
        }
        Ok(Signature { lifelines, messages })
    }

    /// Adds the lifelines and messages of `other` that are missing here.
    pub fn extend(&mut self, other: &Signature) {
        for l in &other.lifelines {
            if !self.lifelines.contains(l) {
                self.lifelines.push(l.clone());
            }
        }
        for m in &other.messages {
            if !self.messages.contains(m) {
                self.messages.push(m.clone());
            }
        }
    }

    pub fn lifelines(&self) -> impl Iterator<Item = &str> {
        self.lifelines.iter().map(|l| &**l)
    }

    pub fn messages(&self) -> impl Iterator<Item = &str> {
        self.messages.iter().map(|m| &**m)
    }

    pub fn has_lifeline(&self, l: &str) -> bool {
        self.lifelines.iter().any(|x| &**x == l)
    }

    pub fn has_message(&self, m: &str) -> bool {
        self.messages.iter().any(|x| &**x == m)
    }

    /// `Act(L, M)`, lifeline-major, emissions before receptions.
    pub fn actions(&self) -> Vec<Action> {
        let mut out = Vec::with_capacity(2 * self.lifelines.len() * self.messages.len());
        for l in &self.lifelines {
            for d in [Direction::Emit, Direction::Receive] {
                for m in &self.messages {
                    out.push(Action::new(l.clone(), d, m.clone()));
                }
            }
        }
        out
    }

    pub fn check_action(&self, a: &Action) -> Result<()> {
        if !self.has_lifeline(a.lifeline()) {
            return Err(Error::Signature(format!(
                "unknown lifeline `{}` in action `{a}`",
                a.lifeline()
            )));
        }
        if !self.has_message(a.message()) {
            return Err(Error::Signature(format!(
                "unknown message `{}` in action `{a}`",
                a.message()
            )));
        }
        Ok(())
    }

    pub fn check_interaction(&self, i: &Interaction) -> Result<()> {
        let mut res = Ok(());
        i.for_each_action(&mut |a| {
            if res.is_ok() {
                res = self.check_action(a);
            }
        });
        res
    }
}

/// The binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Strict,
    Seq,
    Alt,
    Par,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 4] = [BinaryOp::Strict, BinaryOp::Seq, BinaryOp::Alt, BinaryOp::Par];

    pub fn keyword(self) -> &'static str {
        match self {
            BinaryOp::Strict => "strict",
            BinaryOp::Seq => "seq",
            BinaryOp::Alt => "alt",
            BinaryOp::Par => "par",
        }
    }
}

/// The three loop operators; each one repeats its body with the matching
/// binary operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LoopKind {
    Strict,
    Seq,
    Par,
}

impl LoopKind {
    pub const ALL: [LoopKind; 3] = [LoopKind::Strict, LoopKind::Seq, LoopKind::Par];

    /// The operator placing an instance of the body before the loop.
    pub fn op(self) -> BinaryOp {
        match self {
            LoopKind::Strict => BinaryOp::Strict,
            LoopKind::Seq => BinaryOp::Seq,
            LoopKind::Par => BinaryOp::Par,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            LoopKind::Strict => "loopStrict",
            LoopKind::Seq => "loopSeq",
            LoopKind::Par => "loopPar",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interaction {
    Empty,
    Act(Action),
    Binary(BinaryOp, Box<Interaction>, Box<Interaction>),
    Loop(LoopKind, Box<Interaction>),
}

impl Interaction {
    pub fn act(a: Action) -> Self {
        Interaction::Act(a)
    }

    pub fn binary(op: BinaryOp, left: Interaction, right: Interaction) -> Self {
        Interaction::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn looped(kind: LoopKind, body: Interaction) -> Self {
        Interaction::Loop(kind, Box::new(body))
    }

    pub fn strict(left: Interaction, right: Interaction) -> Self {
        Self::binary(BinaryOp::Strict, left, right)
    }

    pub fn seq(left: Interaction, right: Interaction) -> Self {
        Self::binary(BinaryOp::Seq, left, right)
    }

    pub fn alt(left: Interaction, right: Interaction) -> Self {
        Self::binary(BinaryOp::Alt, left, right)
    }

    pub fn par(left: Interaction, right: Interaction) -> Self {
        Self::binary(BinaryOp::Par, left, right)
    }

    pub fn loop_strict(body: Interaction) -> Self {
        Self::looped(LoopKind::Strict, body)
    }

    pub fn loop_seq(body: Interaction) -> Self {
        Self::looped(LoopKind::Seq, body)
    }

    pub fn loop_par(body: Interaction) -> Self {
        Self::looped(LoopKind::Par, body)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Interaction::Empty | Interaction::Act(_))
    }

    pub fn as_action(&self) -> Option<&Action> {
        match self {
            Interaction::Act(a) => Some(a),
            _ => None,
        }
    }

    /// The child at direction 1 or 2, if any.
    pub fn child(&self, digit: u8) -> Option<&Interaction> {
        match (self, digit) {
            (Interaction::Binary(_, l, _), 1) => Some(l),
            (Interaction::Binary(_, _, r), 2) => Some(r),
            (Interaction::Loop(_, b), 1) => Some(b),
            _ => None,
        }
    }

    /// All positions of the term, in canonical order.
    pub fn positions(&self) -> BTreeSet<Position> {
        let mut out = BTreeSet::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out);
        out
    }

    fn collect_positions(&self, path: &mut Vec<u8>, out: &mut BTreeSet<Position>) {
        out.insert(Position(path.clone()));
        for d in [1, 2] {
            if let Some(c) = self.child(d) {
                path.push(d);
                c.collect_positions(path, out);
                path.pop();
            }
        }
    }

    /// `i|p`.
    pub fn subterm_at(&self, p: &Position) -> Result<&Interaction> {
        let mut cur = self;
        for &d in p.digits() {
            cur = cur.child(d).ok_or_else(|| Error::PositionOutOfRange(p.clone()))?;
        }
        Ok(cur)
    }

    /// `i[s]p`: the term with its subterm at `p` replaced by `s`.
    pub fn replace_at(&self, p: &Position, s: Interaction) -> Result<Interaction> {
        fn go(i: &Interaction, digits: &[u8], s: Interaction, p: &Position) -> Result<Interaction> {
            let Some((&d, rest)) = digits.split_first() else {
                return Ok(s);
            };
            match (i, d) {
                (Interaction::Binary(op, l, r), 1) => Ok(Interaction::binary(*op, go(l, rest, s, p)?, (**r).clone())),
                (Interaction::Binary(op, l, r), 2) => Ok(Interaction::binary(*op, (**l).clone(), go(r, rest, s, p)?)),
                (Interaction::Loop(k, b), 1) => Ok(Interaction::looped(*k, go(b, rest, s, p)?)),
                _ => Err(Error::PositionOutOfRange(p.clone())),
            }
        }
        go(self, p.digits(), s, p)
    }

    /// The set of all subterms (structurally deduplicated).
    pub fn subterms(&self) -> BTreeSet<Interaction> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut BTreeSet<Interaction>) {
        out.insert(self.clone());
        for d in [1, 2] {
            if let Some(c) = self.child(d) {
                c.collect_subterms(out);
            }
        }
    }

    pub fn for_each_action<'a>(&'a self, f: &mut impl FnMut(&'a Action)) {
        match self {
            Interaction::Empty => {}
            Interaction::Act(a) => f(a),
            Interaction::Binary(_, l, r) => {
                l.for_each_action(f);
                r.for_each_action(f);
            }
            Interaction::Loop(_, b) => b.for_each_action(f),
        }
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Interaction::Empty | Interaction::Act(_) => 1,
            Interaction::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            Interaction::Loop(_, b) => 1 + b.depth(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Interaction::Empty | Interaction::Act(_) => 1,
            Interaction::Binary(_, l, r) => 1 + l.size() + r.size(),
            Interaction::Loop(_, b) => 1 + b.size(),
        }
    }

    pub fn action_count(&self) -> usize {
        let mut n = 0;
        self.for_each_action(&mut |_| n += 1);
        n
    }

    /// Maximum number of loop nodes on a root-to-leaf path.
    pub fn loop_nesting(&self) -> usize {
        match self {
            Interaction::Empty | Interaction::Act(_) => 0,
            Interaction::Binary(_, l, r) => l.loop_nesting().max(r.loop_nesting()),
            Interaction::Loop(_, b) => 1 + b.loop_nesting(),
        }
    }

    pub fn is_loop_free(&self) -> bool {
        self.loop_nesting() == 0
    }

    pub fn count_loops(&self, kind: Option<LoopKind>) -> usize {
        match self {
            Interaction::Empty | Interaction::Act(_) => 0,
            Interaction::Binary(_, l, r) => l.count_loops(kind) + r.count_loops(kind),
            Interaction::Loop(k, b) => usize::from(kind.is_none_or(|want| want == *k)) + b.count_loops(kind),
        }
    }
}

/// A Dewey position: a word over `{1, 2}`; the empty word is the root.
///
/// Positions order lexicographically with a prefix before its extensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<u8>);

impl Position {
    pub fn epsilon() -> Self {
        Position(Vec::new())
    }

    pub fn from_digits(digits: impl IntoIterator<Item = u8>) -> Result<Self> {
        let digits: Vec<u8> = digits.into_iter().collect();
        if let Some(bad) = digits.iter().find(|d| !matches!(d, 1 | 2)) {
            return Err(Error::InvalidArgument(format!("position digit {bad} is not 1 or 2")));
        }
        Ok(Position(digits))
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_epsilon(&self) -> bool {
        self.0.is_empty()
    }

    /// `d.p`
    pub fn prefixed(&self, d: u8) -> Position {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(d);
        v.extend_from_slice(&self.0);
        Position(v)
    }

    /// `p.d`
    pub fn child(&self, d: u8) -> Position {
        let mut v = self.0.clone();
        v.push(d);
        Position(v)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn split_first(&self) -> Option<(u8, Position)> {
        self.0.split_first().map(|(d, rest)| (*d, Position(rest.to_vec())))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Accepts a digit string, the empty string or `eps` for the root.
impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "eps" {
            return Ok(Position::epsilon());
        }
        s.bytes()
            .map(|b| match b {
                b'1' => Ok(1),
                b'2' => Ok(2),
                _ => Err(Error::InvalidArgument(format!(
                    "`{s}` is not a position (digits 1/2, or `eps`)"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Position)
    }
}
