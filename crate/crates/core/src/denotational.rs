//! Reference semantics: orderings, their linearizations, `σ` on loop-free
//! terms, loop unfoldings, flattening and the bounded unfolding semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::dsl::Trace;
use crate::error::{Error, Result};
use crate::term::{Action, BinaryOp, Interaction, Position};

/// How `ord(∅)` is defined.
///
/// The literal definition (`ord(∅) = ∅`) gives `σ(∅) = ∅` and therefore
/// empties the semantics of every `strict`/`seq`/`par` with an empty child.
/// `Repaired` uses `{(∅, ∅)}` so that `σ(∅) = {ε}`, consistent with
/// `exp_eps(∅)` and with the operational semantics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EmptyOrdering {
    #[default]
    Repaired,
    Literal,
}

/// A pair `(e, o)`: action positions and precedence pairs between them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering {
    pub events: BTreeSet<Position>,
    pub order: BTreeSet<(Position, Position)>,
}

impl Ordering {
    fn prefixed(&self, d: u8) -> Ordering {
        Ordering {
            events: self.events.iter().map(|p| p.prefixed(d)).collect(),
            order: self.order.iter().map(|(a, b)| (a.prefixed(d), b.prefixed(d))).collect(),
        }
    }

    /// Positions of `events` with no predecessor in `order`.
    pub fn minimal(&self) -> impl Iterator<Item = &Position> {
        self.events
            .iter()
            .filter(|p| !self.order.iter().any(|(a, b)| b == *p && self.events.contains(a)))
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Position| {
            if p.is_epsilon() {
                "eps".to_string()
            } else {
                p.to_string()
            }
        };
        let e: Vec<String> = self.events.iter().map(show).collect();
        let o: Vec<String> = self
            .order
            .iter()
            .map(|(a, b)| format!("({},{})", show(a), show(b)))
            .collect();
        write!(f, "({{{}}},{{{}}})", e.join(","), o.join(","))
    }
}

/// A finite set of traces, kept sorted by printed actions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TraceSet(BTreeSet<Trace>);

impl TraceSet {
    pub fn new() -> Self {
        TraceSet(BTreeSet::new())
    }

    pub fn singleton(t: Trace) -> Self {
        TraceSet(BTreeSet::from([t]))
    }

    pub fn insert(&mut self, t: Trace) -> bool {
        self.0.insert(t)
    }

    pub fn contains(&self, t: &Trace) -> bool {
        self.0.contains(t)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Trace> {
        self.0.iter()
    }

    pub fn extend(&mut self, other: TraceSet) {
        self.0.extend(other.0);
    }

    pub fn difference(&self, other: &TraceSet) -> TraceSet {
        TraceSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &TraceSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<Trace> for TraceSet {
    fn from_iter<I: IntoIterator<Item = Trace>>(iter: I) -> Self {
        TraceSet(iter.into_iter().collect())
    }
}

impl IntoIterator for TraceSet {
    type Item = Trace;
    type IntoIter = std::collections::btree_set::IntoIter<Trace>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a TraceSet {
    type Item = &'a Trace;
    type IntoIter = std::collections::btree_set::Iter<'a, Trace>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// `ord(i)`, loops included (a loop contributes `(∅, ∅)` for "not taken").
pub fn orderings(i: &Interaction) -> BTreeSet<Ordering> {
    orderings_with(i, EmptyOrdering::Repaired)
}

pub fn orderings_with(i: &Interaction, mode: EmptyOrdering) -> BTreeSet<Ordering> {
    match i {
        Interaction::Empty => match mode {
            EmptyOrdering::Repaired => BTreeSet::from([Ordering::default()]),
            EmptyOrdering::Literal => BTreeSet::new(),
        },
        Interaction::Act(_) => BTreeSet::from([Ordering {
            events: BTreeSet::from([Position::epsilon()]),
            order: BTreeSet::new(),
        }]),
        Interaction::Binary(BinaryOp::Alt, l, r) => {
            let mut out: BTreeSet<Ordering> = orderings_with(l, mode).iter().map(|o| o.prefixed(1)).collect();
            out.extend(orderings_with(r, mode).iter().map(|o| o.prefixed(2)));
            out
        }
        Interaction::Binary(op, l, r) => {
            let left = orderings_with(l, mode);
            let right = orderings_with(r, mode);
            let mut out = BTreeSet::new();
            for o1 in &left {
                for o2 in &right {
                    let mut order: BTreeSet<(Position, Position)> =
                        o1.order.iter().map(|(a, b)| (a.prefixed(1), b.prefixed(1))).collect();
                    order.extend(o2.order.iter().map(|(a, b)| (a.prefixed(2), b.prefixed(2))));
                    match op {
                        BinaryOp::Strict => {
                            for p1 in &o1.events {
                                for p2 in &o2.events {
                                    order.insert((p1.prefixed(1), p2.prefixed(2)));
                                }
                            }
                        }
                        BinaryOp::Seq => {
                            for p1 in &o1.events {
                                let l1 = lifeline_at(l, p1);
                                for p2 in &o2.events {
                                    if l1 == lifeline_at(r, p2) {
                                        order.insert((p1.prefixed(1), p2.prefixed(2)));
                                    }
                                }
                            }
                        }
                        BinaryOp::Par => {}
                        BinaryOp::Alt => unreachable!(),
                    }
                    let mut events: BTreeSet<Position> = o1.events.iter().map(|p| p.prefixed(1)).collect();
                    events.extend(o2.events.iter().map(|p| p.prefixed(2)));
                    out.insert(Ordering { events, order });
                }
            }
            out
        }
        Interaction::Loop(_, body) => {
            let mut out: BTreeSet<Ordering> = orderings_with(body, mode).iter().map(|o| o.prefixed(1)).collect();
            out.insert(Ordering::default());
            out
        }
    }
}

fn lifeline_at<'a>(i: &'a Interaction, p: &Position) -> &'a str {
    i.subterm_at(p)
        .ok()
        .and_then(Interaction::as_action)
        .expect("ordering events address actions")
        .lifeline()
}

fn action_at<'a>(i: &'a Interaction, p: &Position) -> Result<&'a Action> {
    i.subterm_at(p)?
        .as_action()
        .ok_or_else(|| Error::InvalidArgument(format!("position `{p}` does not address an action")))
}

/// `sem(i, e, o)`: every trace playing each position of `e` exactly once
/// without placing `p2` before `p1` when `(p1, p2) ∈ o`.
pub fn linearizations(i: &Interaction, ordg: &Ordering) -> Result<TraceSet> {
    let mut out = TraceSet::new();
    linearize_into(i, ordg, usize::MAX, &mut out)?;
    Ok(out)
}

/// Enumerates by repeatedly extracting a minimal element, backtracking.
fn linearize_into(i: &Interaction, ordg: &Ordering, cap: usize, out: &mut TraceSet) -> Result<()> {
    let events: Vec<&Position> = ordg.events.iter().collect();
    let index: BTreeMap<&Position, usize> = events.iter().enumerate().map(|(k, p)| (*p, k)).collect();
    let actions = events
        .iter()
        .map(|p| action_at(i, p).cloned())
        .collect::<Result<Vec<_>>>()?;
    let n = events.len();
    let mut preds = vec![0usize; n];
    let mut succs = vec![Vec::new(); n];
    for (a, b) in &ordg.order {
        if let (Some(&ka), Some(&kb)) = (index.get(a), index.get(b)) {
            if ka != kb && !succs[ka].contains(&kb) {
                succs[ka].push(kb);
                preds[kb] += 1;
            }
        }
    }

    struct Walk<'w> {
        actions: &'w [Action],
        succs: &'w [Vec<usize>],
        preds: Vec<usize>,
        used: Vec<bool>,
        current: Vec<Action>,
        cap: usize,
    }

    impl Walk<'_> {
        fn go(&mut self, out: &mut TraceSet) -> Result<()> {
            if self.current.len() == self.actions.len() {
                out.insert(Trace::new(self.current.clone()));
                if out.len() > self.cap {
                    return Err(Error::ResourceLimit {
                        what: "linearizations",
                        size: out.len(),
                        cap: self.cap,
                    });
                }
                return Ok(());
            }
            for k in 0..self.actions.len() {
                if self.used[k] || self.preds[k] > 0 {
                    continue;
                }
                self.used[k] = true;
                for &s in &self.succs[k] {
                    self.preds[s] -= 1;
                }
                self.current.push(self.actions[k].clone());
                self.go(out)?;
                self.current.pop();
                for &s in &self.succs[k] {
                    self.preds[s] += 1;
                }
                self.used[k] = false;
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        actions: &actions,
        succs: &succs,
        preds,
        used: vec![false; n],
        current: Vec::with_capacity(n),
        cap,
    };
    walk.go(out)
}

/// `σ(i)` for a loop-free term.
pub fn sigma_basic(i: &Interaction) -> Result<TraceSet> {
    sigma_basic_with(i, EmptyOrdering::Repaired)
}

pub fn sigma_basic_with(i: &Interaction, mode: EmptyOrdering) -> Result<TraceSet> {
    sigma_basic_capped(i, mode, usize::MAX)
}

fn sigma_basic_capped(i: &Interaction, mode: EmptyOrdering, cap: usize) -> Result<TraceSet> {
    if !i.is_loop_free() {
        return Err(Error::ContainsLoop);
    }
    let mut out = TraceSet::new();
    for ordg in orderings_with(i, mode) {
        linearize_into(i, &ordg, cap, &mut out)?;
    }
    Ok(out)
}

/// Every term obtained by instantiating exactly one loop once.
pub fn unfold_once(i: &Interaction) -> Vec<Interaction> {
    let mut out = Vec::new();
    for p in i.positions() {
        if let Ok(Interaction::Loop(kind, body)) = i.subterm_at(&p) {
            let instance = Interaction::binary(
                kind.op(),
                (**body).clone(),
                Interaction::looped(*kind, (**body).clone()),
            );
            out.push(i.replace_at(&p, instance).expect("position taken from the term"));
        }
    }
    out
}

/// `Υ(i, n)`: all terms reachable by exactly `n` single-loop instantiations.
pub fn unfoldings(i: &Interaction, n: usize) -> BTreeSet<Interaction> {
    let mut level = BTreeSet::from([i.clone()]);
    for _ in 0..n {
        level = level.iter().flat_map(unfold_once).collect();
        if level.is_empty() {
            break;
        }
    }
    level
}

/// `F(i)`: replaces every loop subterm by `∅`.
pub fn flatten(i: &Interaction) -> Interaction {
    match i {
        Interaction::Empty | Interaction::Act(_) => i.clone(),
        Interaction::Binary(op, l, r) => Interaction::binary(*op, flatten(l), flatten(r)),
        Interaction::Loop(..) => Interaction::Empty,
    }
}

/// Bounded unfolding semantics: the union over `n <= max_unfolds` and every
/// `i' ∈ Υ(i, n)` of `σ(F(i'))`.
pub fn sigma_u(i: &Interaction, max_unfolds: usize) -> TraceSet {
    sigma_u_capped(i, max_unfolds, usize::MAX).expect("uncapped")
}

/// As [`sigma_u`], failing with `ResourceLimit` once more than `cap` traces
/// have been produced.
pub fn sigma_u_capped(i: &Interaction, max_unfolds: usize, cap: usize) -> Result<TraceSet> {
    let mut out = TraceSet::new();
    let mut flattened_seen = BTreeSet::new();
    let mut level = BTreeSet::from([i.clone()]);
    for n in 0..=max_unfolds {
        for term in &level {
            let flat = flatten(term);
            if flattened_seen.insert(flat.clone()) {
                let part = sigma_basic_capped(&flat, EmptyOrdering::Repaired, cap)?;
                out.extend(part);
                if out.len() > cap {
                    return Err(Error::ResourceLimit {
                        what: "unfolding semantics",
                        size: out.len(),
                        cap,
                    });
                }
            }
        }
        if n < max_unfolds {
            level = level.iter().flat_map(unfold_once).collect();
            if level.is_empty() {
                break;
            }
        }
    }
    Ok(out)
}
