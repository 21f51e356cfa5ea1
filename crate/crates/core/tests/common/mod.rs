#![allow(dead_code)]

use interkernel::{Action, BinaryOp, Interaction, LoopKind, Trace};
use proptest::prelude::*;

pub fn action(l: &str, emit: bool, m: &str) -> Action {
    if emit {
        Action::emit(l, m)
    } else {
        Action::receive(l, m)
    }
}

pub fn arb_action(
    lifelines: &'static [&'static str],
    messages: &'static [&'static str],
) -> impl Strategy<Value = Action> {
    (0..lifelines.len(), any::<bool>(), 0..messages.len())
        .prop_map(move |(l, e, m)| action(lifelines[l], e, messages[m]))
}

fn arb_leaf(
    lifelines: &'static [&'static str],
    messages: &'static [&'static str],
) -> impl Strategy<Value = Interaction> {
    prop_oneof![
        1 => Just(Interaction::Empty),
        4 => arb_action(lifelines, messages).prop_map(Interaction::act),
    ]
}

fn arb_binop() -> impl Strategy<Value = BinaryOp> {
    prop::sample::select(BinaryOp::ALL.to_vec())
}

fn arb_loop() -> impl Strategy<Value = LoopKind> {
    prop::sample::select(LoopKind::ALL.to_vec())
}

/// Terms over lifelines a, b, c and messages m, n, with loops.
pub fn arb_interaction(depth: u32) -> impl Strategy<Value = Interaction> {
    arb_leaf(&["a", "b", "c"], &["m", "n"]).prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            3 => (arb_binop(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Interaction::binary(op, l, r)),
            1 => (arb_loop(), inner).prop_map(|(k, b)| Interaction::looped(k, b)),
        ]
    })
}

/// Loop-free terms with at most `max_actions` actions.
pub fn arb_loop_free(depth: u32, max_actions: usize) -> impl Strategy<Value = Interaction> {
    arb_leaf(&["a", "b", "c"], &["m", "n"])
        .prop_recursive(depth, 16, 2, |inner| {
            (arb_binop(), inner.clone(), inner).prop_map(|(op, l, r)| Interaction::binary(op, l, r))
        })
        .prop_filter("too many actions", move |i| i.action_count() <= max_actions)
}

/// All interleavings of two traces, each action tagged with the operand
/// (`false` left, `true` right) it comes from.
pub fn interleavings(t1: &[Action], t2: &[Action]) -> Vec<Vec<(bool, Action)>> {
    if t1.is_empty() || t2.is_empty() {
        let side = t1.is_empty();
        return vec![t1.iter().chain(t2).map(|a| (side, a.clone())).collect()];
    }
    let mut out = Vec::new();
    for mut rest in interleavings(&t1[1..], t2) {
        rest.insert(0, (false, t1[0].clone()));
        out.push(rest);
    }
    for mut rest in interleavings(t1, &t2[1..]) {
        rest.insert(0, (true, t2[0].clone()));
        out.push(rest);
    }
    out
}

pub fn trace(actions: Vec<Action>) -> Trace {
    Trace::new(actions)
}
