use std::collections::HashSet;

use crate::analysis::Verdict;
use crate::dsl::Trace;
use crate::operational::{exp_eps, steps};
use crate::term::Interaction;

/// A loop budget large enough for [`classify_expected`] to see every way of
/// consuming `t`: each action crosses at most `loop_nesting(i)` loops.
pub fn sufficient_bound(i: &Interaction, t: &Trace) -> usize {
    t.len() * i.loop_nesting().max(1)
}

/// Classifies `t` against `i` from reachability alone.
///
/// The residual terms reachable by consuming successive actions of `t`
/// (within a shared budget of `bound` loop instantiations) are computed
/// level by level. `t` is `Covered` when a residual after the whole trace
/// expresses `ε`, `TooShort` when some residual exists and can still be
/// completed, `TooLong` when a strict prefix was accepted, and `Out`
/// otherwise.
pub fn classify_expected(i: &Interaction, t: &Trace, bound: usize) -> Verdict {
    let mut level: HashSet<(Interaction, usize)> = HashSet::from([(i.clone(), bound)]);
    let mut prefix_accepted = false;
    for act in t.actions() {
        prefix_accepted |= level.iter().any(|(r, _)| exp_eps(r));
        let mut next = HashSet::new();
        for (r, budget) in &level {
            for step in steps(r) {
                if &step.action == act && step.unfolds <= *budget {
                    next.insert((step.next, budget - step.unfolds));
                }
            }
        }
        level = next;
    }
    if level.iter().any(|(r, _)| exp_eps(r)) {
        Verdict::Covered
    } else if level
        .iter()
        .any(|(r, b)| completion(r, *b, &mut HashSet::new()).is_some())
    {
        Verdict::TooShort
    } else if prefix_accepted {
        Verdict::TooLong
    } else {
        Verdict::Out
    }
}

/// Some trace, possibly empty, taking `i` to a term that expresses `ε`.
pub fn completion(i: &Interaction, budget: usize, seen: &mut HashSet<(Interaction, usize)>) -> Option<Trace> {
    if exp_eps(i) {
        return Some(Trace::empty());
    }
    if !seen.insert((i.clone(), budget)) {
        return None;
    }
    let mut candidates = steps(i);
    candidates.sort_by_key(|s| s.unfolds);
    for step in candidates {
        if step.unfolds > budget {
            continue;
        }
        if let Some(rest) = completion(&step.next, budget - step.unfolds, seen) {
            return Some(rest.prepend(step.action));
        }
    }
    None
}
