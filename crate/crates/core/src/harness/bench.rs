use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::oracle::completion;
use crate::analysis::{analyze, Verdict};
use crate::dsl::{parse_interaction_permissive, Trace};
use crate::error::{Error, Result};
use crate::operational::{exp_eps, steps};
use crate::term::{Interaction, LoopKind};

const MQTT_MODEL: &str = include_str!("../../models/mqtt.ik");

/// Source text of the bundled client/broker model.
pub fn mqtt_model_text() -> &'static str {
    MQTT_MODEL
}

/// The bundled client/broker model: a strict connect phase, a `loopPar`
/// over five request/response exchanges, and a strict disconnect phase.
pub fn mqtt_model() -> Interaction {
    parse_interaction_permissive(MQTT_MODEL).expect("bundled model parses")
}

/// Analysis of one prefix of one trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    /// Index of the trace in the input.
    pub trace: usize,
    pub length: usize,
    pub verdict: Verdict,
    pub seconds: f64,
    pub explored_nodes: u64,
}

/// Analyzes every prefix (including the empty one and the full trace) of
/// every trace and records wall-clock times.
pub fn bench_trace_analysis(model: &Interaction, traces: &[Trace]) -> Vec<BenchRecord> {
    let mut out = Vec::new();
    for (k, t) in traces.iter().enumerate() {
        for len in 0..=t.len() {
            let prefix = t.prefix(len);
            let start = Instant::now();
            let report = analyze(model, &prefix);
            let seconds = start.elapsed().as_secs_f64();
            out.push(BenchRecord {
                trace: k,
                length: len,
                verdict: report.verdict,
                seconds,
                explored_nodes: report.explored_nodes,
            });
        }
    }
    out
}

/// Tab-separated `trace length verdict seconds explored_nodes`, with a header.
pub fn bench_tsv(records: &[BenchRecord]) -> String {
    let mut s = String::from("trace\tlength\tverdict\tseconds\texplored_nodes\n");
    for r in records {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{:.9}\t{}",
            r.trace, r.length, r.verdict, r.seconds, r.explored_nodes
        );
    }
    s
}

/// Random accepted traces of `model` in which its `loopPar` loops are
/// instantiated `instances` times in total, instances running concurrently.
///
/// Each trace is a random walk over the transitions of the model. A step
/// is allowed if it keeps the number of started loop instances (of any kind)
/// within `instances` and, until all instances are started, does not
/// discard a `loopPar` node. The walk stops when no step is allowed, and
/// is then completed by the shortest budget-free continuation if the term
/// does not already accept `ε`. Walk `k` uses ChaCha8 seeded from
/// `derive_seed(seed, k)`.
pub fn generate_concurrent_traces(
    model: &Interaction,
    instances: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Trace>> {
    if model.count_loops(Some(LoopKind::Par)) == 0 {
        return Err(Error::InvalidArgument("the model has no loopPar".into()));
    }
    (0..count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(super::mutants::derive_seed(seed, k as u64));
            concurrent_walk(model, instances, &mut rng)
        })
        .collect()
}

fn concurrent_walk(model: &Interaction, instances: usize, rng: &mut impl Rng) -> Result<Trace> {
    let mut cur = model.clone();
    let mut started = 0;
    let mut trace = Trace::empty();
    loop {
        let par_loops = cur.count_loops(Some(LoopKind::Par));
        let allowed: Vec<_> = steps(&cur)
            .into_iter()
            .filter(|s| started + s.unfolds <= instances)
            .filter(|s| started + s.unfolds >= instances || s.next.count_loops(Some(LoopKind::Par)) >= par_loops)
            .collect();
        if allowed.is_empty() {
            break;
        }
        let step = allowed[rng.gen_range(0..allowed.len())].clone();
        started += step.unfolds;
        trace.push(step.action);
        cur = step.next;
    }
    if !exp_eps(&cur) {
        let rest = completion(&cur, 0, &mut Default::default()).ok_or(Error::EmptySemantics)?;
        for a in rest.into_actions() {
            trace.push(a);
        }
    }
    Ok(trace)
}
