//! Small-step semantics: frontier actions, pruning, the execution function
//! and the bounded operational trace semantics.

use std::collections::{BTreeSet, HashMap};

use crate::denotational::{orderings, TraceSet};
use crate::dsl::Trace;
use crate::error::{Error, Result};
use crate::term::{Action, BinaryOp, Interaction, Position};

/// Result of pruning a term on a lifeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneResult {
    pub pruned: Interaction,
    /// The whole term had to go; `pruned` is then `∅`.
    pub eliminated: bool,
}

impl PruneResult {
    fn kept(pruned: Interaction) -> Self {
        PruneResult {
            pruned,
            eliminated: false,
        }
    }

    fn gone() -> Self {
        PruneResult {
            pruned: Interaction::Empty,
            eliminated: true,
        }
    }
}

/// One transition `i --act--> next` obtained by executing the frontier
/// action at `position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub action: Action,
    pub position: Position,
    pub next: Interaction,
    /// Loop nodes crossed by `position`; each one is instantiated by the step.
    pub unfolds: usize,
}

/// The union over `ord(i)` of the minimal elements of each ordering.
pub fn frontier(i: &Interaction) -> Vec<Position> {
    let mut out = BTreeSet::new();
    for ordg in orderings(i) {
        out.extend(ordg.minimal().cloned());
    }
    out.into_iter().collect()
}

/// The same set as [`frontier`], computed in one pass without building
/// orderings: a right operand of `strict` needs the left to express `ε`,
/// and one of `seq` needs the left to be able to avoid its lifeline.
pub fn frontier_structural(i: &Interaction) -> Vec<Position> {
    let mut out = Vec::new();
    collect_frontier(i, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn collect_frontier(i: &Interaction, path: &mut Vec<u8>, out: &mut Vec<Position>) {
    match i {
        Interaction::Empty => {}
        Interaction::Act(_) => out.push(Position::from_digits(path.iter().copied()).expect("digits are 1/2")),
        Interaction::Loop(_, body) => {
            path.push(1);
            collect_frontier(body, path, out);
            path.pop();
        }
        Interaction::Binary(op, l, r) => {
            path.push(1);
            collect_frontier(l, path, out);
            path.pop();
            match op {
                BinaryOp::Alt | BinaryOp::Par => {
                    path.push(2);
                    collect_frontier(r, path, out);
                    path.pop();
                }
                BinaryOp::Strict => {
                    if exp_eps(l) {
                        path.push(2);
                        collect_frontier(r, path, out);
                        path.pop();
                    }
                }
                BinaryOp::Seq => {
                    let mut right = Vec::new();
                    collect_frontier(r, &mut Vec::new(), &mut right);
                    for p in right {
                        let lifeline = r
                            .subterm_at(&p)
                            .ok()
                            .and_then(Interaction::as_action)
                            .map(Action::lifeline);
                        if lifeline.is_some_and(|lf| can_avoid(l, lf)) {
                            path.push(2);
                            path.extend_from_slice(p.digits());
                            out.push(Position::from_digits(path.iter().copied()).expect("digits are 1/2"));
                            path.truncate(path.len() - 1 - p.len());
                        }
                    }
                }
            }
        }
    }
}

/// Whether some ordering of `i` has no action on `lifeline` (i.e. pruning
/// `i` on `lifeline` does not eliminate it).
pub fn can_avoid(i: &Interaction, lifeline: &str) -> bool {
    match i {
        Interaction::Empty | Interaction::Loop(..) => true,
        Interaction::Act(a) => a.lifeline() != lifeline,
        Interaction::Binary(BinaryOp::Alt, l, r) => can_avoid(l, lifeline) || can_avoid(r, lifeline),
        Interaction::Binary(_, l, r) => can_avoid(l, lifeline) && can_avoid(r, lifeline),
    }
}

/// Whether the empty trace is in the semantics of `i`.
pub fn exp_eps(i: &Interaction) -> bool {
    match i {
        Interaction::Empty | Interaction::Loop(..) => true,
        Interaction::Act(_) => false,
        Interaction::Binary(BinaryOp::Alt, l, r) => exp_eps(l) || exp_eps(r),
        Interaction::Binary(_, l, r) => exp_eps(l) && exp_eps(r),
    }
}

/// Removes the branching choices of `i` that host actions on `lifeline`.
pub fn prune(i: &Interaction, lifeline: &str) -> PruneResult {
    match i {
        Interaction::Empty => PruneResult::kept(Interaction::Empty),
        Interaction::Act(a) if a.lifeline() == lifeline => PruneResult::gone(),
        Interaction::Act(_) => PruneResult::kept(i.clone()),
        Interaction::Binary(BinaryOp::Alt, l, r) => {
            let pl = prune(l, lifeline);
            let pr = prune(r, lifeline);
            match (pl.eliminated, pr.eliminated) {
                (true, true) => PruneResult::gone(),
                (true, false) => pr,
                (false, true) => pl,
                (false, false) => PruneResult::kept(Interaction::alt(pl.pruned, pr.pruned)),
            }
        }
        Interaction::Binary(op, l, r) => {
            let pl = prune(l, lifeline);
            if pl.eliminated {
                return PruneResult::gone();
            }
            let pr = prune(r, lifeline);
            if pr.eliminated {
                return PruneResult::gone();
            }
            PruneResult::kept(Interaction::binary(*op, pl.pruned, pr.pruned))
        }
        Interaction::Loop(kind, body) => {
            let pb = prune(body, lifeline);
            if pb.eliminated {
                PruneResult::kept(Interaction::Empty)
            } else {
                PruneResult::kept(Interaction::looped(*kind, pb.pruned))
            }
        }
    }
}

/// `χ(i, p)`: the continuation of `i` after executing the frontier action at `p`.
pub fn execute(i: &Interaction, p: &Position) -> Result<Interaction> {
    if !frontier_structural(i).contains(p) {
        return Err(Error::NotInFrontier(p.clone()));
    }
    Ok(execute_unchecked(i, p))
}

/// `χ(i, p)` without checking `p ∈ front(i)`.
///
/// # Panics
///
/// Panics if `p` does not address an action, or if a `seq` left operand is
/// eliminated by pruning (which cannot happen for frontier positions).
pub fn execute_unchecked(i: &Interaction, p: &Position) -> Interaction {
    let target = i
        .subterm_at(p)
        .ok()
        .and_then(Interaction::as_action)
        .expect("executed position must address an action");
    chi(i, p.digits(), target.lifeline())
}

fn chi(i: &Interaction, digits: &[u8], lifeline: &str) -> Interaction {
    let Some((&d, rest)) = digits.split_first() else {
        return Interaction::Empty;
    };
    match (i, d) {
        (Interaction::Binary(BinaryOp::Alt, l, _), 1) => chi(l, rest, lifeline),
        (Interaction::Binary(BinaryOp::Alt, _, r), 2) => chi(r, rest, lifeline),
        (Interaction::Binary(op, l, r), 1) => Interaction::binary(*op, chi(l, rest, lifeline), (**r).clone()),
        (Interaction::Binary(BinaryOp::Strict, _, r), 2) => chi(r, rest, lifeline),
        (Interaction::Binary(BinaryOp::Par, l, r), 2) => Interaction::par((**l).clone(), chi(r, rest, lifeline)),
        (Interaction::Binary(BinaryOp::Seq, l, r), 2) => {
            let pl = prune(l, lifeline);
            assert!(
                !pl.eliminated,
                "frontier/prune inconsistency: left operand of seq eliminated on lifeline `{lifeline}`"
            );
            Interaction::seq(pl.pruned, chi(r, rest, lifeline))
        }
        (Interaction::Loop(kind, body), 1) => Interaction::binary(kind.op(), chi(body, rest, lifeline), i.clone()),
        _ => panic!("position digit {d} does not exist below `{i}`"),
    }
}

/// Number of loop nodes on the path from the root to `p` (excluding `p`).
pub fn loop_cost(i: &Interaction, p: &Position) -> usize {
    let mut cur = i;
    let mut n = 0;
    for &d in p.digits() {
        if matches!(cur, Interaction::Loop(..)) {
            n += 1;
        }
        match cur.child(d) {
            Some(c) => cur = c,
            None => break,
        }
    }
    n
}

/// Every transition out of `i`, one per frontier position, in position order.
pub fn steps(i: &Interaction) -> Vec<Step> {
    frontier_structural(i)
        .into_iter()
        .map(|position| {
            let action = i
                .subterm_at(&position)
                .ok()
                .and_then(Interaction::as_action)
                .cloned()
                .expect("frontier positions address actions");
            Step {
                next: chi(i, position.digits(), action.lifeline()),
                unfolds: loop_cost(i, &position),
                action,
                position,
            }
        })
        .collect()
}

/// Bounded operational semantics: traces obtained by chaining steps, where
/// every loop node a step crosses uses one unit of a shared budget of
/// `max_unfolds` instantiations.
pub fn sigma_o(i: &Interaction, max_unfolds: usize) -> TraceSet {
    sigma_o_capped(i, max_unfolds, usize::MAX).expect("uncapped")
}

pub fn sigma_o_capped(i: &Interaction, max_unfolds: usize, cap: usize) -> Result<TraceSet> {
    let mut memo = HashMap::new();
    let set = sigma_o_rec(i, max_unfolds, cap, &mut memo)?;
    Ok(set.iter().cloned().collect())
}

fn sigma_o_rec(
    i: &Interaction,
    budget: usize,
    cap: usize,
    memo: &mut HashMap<(Interaction, usize), BTreeSet<Trace>>,
) -> Result<BTreeSet<Trace>> {
    if let Some(hit) = memo.get(&(i.clone(), budget)) {
        return Ok(hit.clone());
    }
    let mut out = BTreeSet::new();
    if exp_eps(i) {
        out.insert(Trace::empty());
    }
    for step in steps(i) {
        if step.unfolds > budget {
            continue;
        }
        for t in sigma_o_rec(&step.next, budget - step.unfolds, cap, memo)? {
            out.insert(t.prepend(step.action.clone()));
        }
        if out.len() > cap {
            return Err(Error::ResourceLimit {
                what: "operational semantics",
                size: out.len(),
                cap,
            });
        }
    }
    memo.insert((i.clone(), budget), out.clone());
    Ok(out)
}
