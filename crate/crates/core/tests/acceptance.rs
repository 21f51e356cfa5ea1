//! End-to-end acceptance checks, one line of output per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use interkernel::analysis::{analyze, Verdict};
use interkernel::denotational::{
    flatten, linearizations, orderings, sigma_basic, sigma_u, sigma_u_capped, unfoldings, Ordering, TraceSet,
};
use interkernel::dsl::{parse_interaction_permissive as parse, parse_trace_permissive};
use interkernel::harness::{
    bench_trace_analysis, bench_tsv, classify_expected, concordance, count_by_depth, derive_seed, diff_semantics,
    enumerate, generate_concurrent_traces, generate_mutants, mqtt_model, sample_interactions, sufficient_bound,
    ConcordanceConfig, EnumSpec, MutantCategory, MutantPlan, NodeKinds,
};
use interkernel::operational::{can_avoid, execute, exp_eps, frontier, prune, sigma_o, sigma_o_capped, steps};
use interkernel::{BinaryOp, Interaction, Position, Trace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 0x1c0ffee;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn traces(items: &[&str]) -> TraceSet {
    items.iter().map(|s| parse_trace_permissive(s).unwrap()).collect()
}

fn pos(s: &str) -> Position {
    s.parse().unwrap()
}

fn positions(items: &[&str]) -> Vec<Position> {
    items.iter().map(|s| pos(s)).collect()
}

fn ordering(events: &[&str], order: &[(&str, &str)]) -> Ordering {
    Ordering {
        events: events.iter().map(|s| pos(s)).collect(),
        order: order.iter().map(|(a, b)| (pos(a), pos(b))).collect(),
    }
}

fn criterion_1() -> Outcome {
    let cells: [((usize, usize), [u128; 3]); 9] = [
        ((1, 1), [3, 45, 9315]),
        ((1, 2), [5, 115, 57845]),
        ((2, 1), [5, 115, 57845]),
        ((1, 3), [7, 217, 201159]),
        ((3, 1), [7, 217, 201159]),
        ((2, 2), [9, 351, 519129]),
        ((2, 3), [13, 715, 2121405]),
        ((3, 2), [13, 715, 2121405]),
        ((3, 3), [19, 1501, 9244659]),
    ];
    let start = Instant::now();
    for ((l, m), expected) in cells {
        let got = count_by_depth(&EnumSpec::new(l, m, 3).unwrap()).unwrap();
        check(got == expected, || format!("({l},{m}): {got:?} != {expected:?}"))?;
    }
    let closed = start.elapsed();
    check(closed < Duration::from_secs(1), || {
        format!("closed form took {closed:?}")
    })?;

    let start = Instant::now();
    for ((l, m), expected) in cells {
        let spec = EnumSpec::new(l, m, 2).unwrap();
        let mut by_depth = [0u128; 2];
        for i in enumerate(&spec) {
            by_depth[i.depth() - 1] += 1;
        }
        check(by_depth == expected[..2], || {
            format!("enumerated ({l},{m}) depths 1-2: {by_depth:?}")
        })?;
    }
    let spec = EnumSpec::new(1, 1, 3).unwrap();
    let mut by_depth = [0u128; 3];
    let mut seen = BTreeSet::new();
    for i in enumerate(&spec) {
        by_depth[i.depth() - 1] += 1;
        seen.insert(i);
    }
    check(by_depth == [3, 45, 9315], || {
        format!("enumerated (1,1) depth 3: {by_depth:?}")
    })?;
    check(seen.len() == 3 + 45 + 9315, || {
        "duplicate terms in (1,1) depth 3".into()
    })?;
    let cross = start.elapsed();
    check(cross < Duration::from_secs(60), || {
        format!("cross-check took {cross:?}")
    })?;
    Ok(format!(
        "9 cells exact; closed form {closed:.2?}, enumeration cross-check {cross:.2?}"
    ))
}

fn criterion_2() -> Outcome {
    let choice = parse("seq(alt(a!m1,b?m2),a!m3)").unwrap();
    let two_loops = parse("seq(loopSeq(strict(a!m1,b?m1)),seq(loopSeq(alt(a!m2,b?m3)),a!m4))").unwrap();
    let handshake = parse("loopSeq(strict(a!m,b?m))").unwrap();
    let mut n = 0;
    let mut eq = |ok: bool, what: &str| -> Result<(), String> {
        n += 1;
        check(ok, || what.to_string())
    };

    // positions
    eq(
        choice.positions() == positions(&["", "1", "11", "12", "2"]).into_iter().collect(),
        "pos(choice)",
    )?;
    // orderings
    let o2: BTreeSet<Ordering> = [ordering(&["11", "2"], &[("11", "2")]), ordering(&["12", "2"], &[])]
        .into_iter()
        .collect();
    eq(orderings(&choice) == o2, "ord(choice)")?;
    eq(
        orderings(&parse("a!m").unwrap()) == [ordering(&[""], &[])].into_iter().collect(),
        "ord(a!m)",
    )?;
    eq(
        orderings(&parse("loopSeq(a!m)").unwrap()) == [ordering(&["1"], &[]), ordering(&[], &[])].into_iter().collect(),
        "ord(loopSeq(a!m))",
    )?;
    // sem
    eq(
        linearizations(&choice, &ordering(&["12", "2"], &[])).unwrap() == traces(&["b?m2.a!m3", "a!m3.b?m2"]),
        "sem(choice,{12,2},{})",
    )?;
    eq(
        linearizations(&choice, &ordering(&["11", "2"], &[("11", "2")])).unwrap() == traces(&["a!m1.a!m3"]),
        "sem(choice,{11,2},{(11,2)})",
    )?;
    eq(
        linearizations(&choice, &ordering(&[], &[])).unwrap() == traces(&[""]),
        "sem(_,{},{})",
    )?;
    // sigma on loop-free terms
    eq(
        sigma_basic(&choice).unwrap() == traces(&["a!m1.a!m3", "b?m2.a!m3", "a!m3.b?m2"]),
        "sigma(choice)",
    )?;
    eq(sigma_basic(&Interaction::Empty).unwrap() == traces(&[""]), "sigma(0)")?;
    eq(
        sigma_basic(&parse("par(a!m1,a!m2)").unwrap()).unwrap() == traces(&["a!m1.a!m2", "a!m2.a!m1"]),
        "sigma(par)",
    )?;
    // unfoldings, flattening, sigma_u
    let handshake_unfolded = parse("seq(strict(a!m,b?m),loopSeq(strict(a!m,b?m)))").unwrap();
    eq(
        unfoldings(&handshake, 1) == [handshake_unfolded.clone()].into_iter().collect(),
        "unfold(handshake,1)",
    )?;
    eq(
        unfoldings(&handshake, 0) == [handshake.clone()].into_iter().collect(),
        "unfold(handshake,0)",
    )?;
    eq(unfoldings(&parse("a!m").unwrap(), 2).is_empty(), "unfold(a!m,2)")?;
    eq(flatten(&handshake) == Interaction::Empty, "F(handshake)")?;
    eq(
        flatten(&handshake_unfolded) == parse("seq(strict(a!m,b?m),0)").unwrap(),
        "F(handshake')",
    )?;
    eq(
        sigma_u(&handshake, 1) == traces(&["", "a!m.b?m"]),
        "sigma_u(handshake,1)",
    )?;
    eq(
        sigma_u(&parse("strict(a!m,b?m)").unwrap(), 4) == traces(&["a!m.b?m"]),
        "sigma_u(strict,4)",
    )?;
    // frontier
    eq(frontier(&choice) == positions(&["11", "12", "2"]), "front(choice)")?;
    eq(
        frontier(&two_loops) == positions(&["111", "2111", "2112", "22"]),
        "front(two_loops)",
    )?;
    eq(
        frontier(&parse("strict(a!m,b?m)").unwrap()) == positions(&["1"]),
        "front(strict)",
    )?;
    eq(exp_eps(&parse("alt(a!m,loopSeq(b?m))").unwrap()), "exp_eps(alt)")?;
    eq(!exp_eps(&parse("strict(a!m,0)").unwrap()), "exp_eps(strict)")?;
    // prune
    let r = prune(two_loops.subterm_at(&pos("1")).unwrap(), "a");
    eq(r.pruned == Interaction::Empty && !r.eliminated, "prune(two_loops|1,a)")?;
    let r = prune(two_loops.subterm_at(&pos("21")).unwrap(), "a");
    eq(
        r.pruned == parse("loopSeq(b?m3)").unwrap() && !r.eliminated,
        "prune(two_loops|21,a)",
    )?;
    eq(prune(&parse("alt(a!m1,a!m2)").unwrap(), "a").eliminated, "prune(alt,a)")?;
    eq(!can_avoid(&parse("strict(a!m,b?m)").unwrap(), "b"), "can_avoid")?;
    // execution
    eq(
        execute(&choice, &pos("2")).unwrap() == parse("seq(b?m2,0)").unwrap(),
        "chi(choice,2)",
    )?;
    eq(
        execute(&choice, &pos("11")).unwrap() == parse("seq(0,a!m3)").unwrap(),
        "chi(choice,11)",
    )?;
    eq(
        execute(&handshake, &pos("11")).unwrap() == parse("seq(strict(0,b?m),loopSeq(strict(a!m,b?m)))").unwrap(),
        "chi(handshake,11)",
    )?;
    eq(
        execute(&two_loops, &pos("22")).unwrap() == parse("seq(0,seq(loopSeq(b?m3),0))").unwrap(),
        "chi(two_loops,22)",
    )?;
    eq(steps(&choice).len() == 3, "steps(choice)")?;
    // operational semantics and analysis
    eq(
        sigma_o(&choice, 0) == traces(&["a!m1.a!m3", "b?m2.a!m3", "a!m3.b?m2"]),
        "sigma_o(choice)",
    )?;
    eq(
        sigma_o(&parse("loopStrict(strict(a!m,b?m))").unwrap(), 2) == traces(&["", "a!m.b?m", "a!m.b?m.a!m.b?m"]),
        "sigma_o(loopStrict,2)",
    )?;
    let t = parse_trace_permissive("a!m4.b?m3").unwrap();
    eq(
        analyze(&two_loops, &t).verdict == Verdict::Covered,
        "omega(two_loops,a!m4.b?m3)",
    )?;
    Ok(format!("{n} golden values match"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let all: Vec<Interaction> = enumerate(&EnumSpec::new(1, 1, 3).unwrap()).collect();
    let bad: Vec<String> = all
        .par_iter()
        .filter_map(|i| match diff_semantics(i, 2) {
            Ok(d) if d.equal => None,
            Ok(d) => Some(format!(
                "{i}: {} unfold-only, {} operational-only",
                d.only_u.len(),
                d.only_o.len()
            )),
            Err(e) => Some(format!("{i}: {e}")),
        })
        .collect();
    check(bad.is_empty(), || {
        format!("(1,1) depth<=3: {} mismatches, first {}", bad.len(), bad[0])
    })?;

    let spec = EnumSpec::new(2, 2, 3).unwrap();
    let sample = sample_interactions(&spec, 500, &mut ChaCha8Rng::seed_from_u64(SEED)).unwrap();
    let bad: Vec<String> = sample
        .par_iter()
        .filter_map(|i| match diff_semantics(i, 3) {
            Ok(d) if d.equal => None,
            Ok(d) => Some(format!(
                "{i}: {} unfold-only, {} operational-only",
                d.only_u.len(),
                d.only_o.len()
            )),
            Err(e) => Some(format!("{i}: {e}")),
        })
        .collect();
    check(bad.is_empty(), || {
        format!("(2,2) sample: {} mismatches, first {}", bad.len(), bad[0])
    })?;
    let took = start.elapsed();
    check(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!(
        "{} exhaustive (1,1) terms at bound 2 and {} sampled (2,2) terms at bound 3 agree in {took:.1?}",
        all.len(),
        sample.len()
    ))
}

fn concordance_models() -> (EnumSpec, Vec<Interaction>) {
    let spec = EnumSpec::new(3, 3, 3).unwrap();
    let models = sample_interactions(&spec, 120, &mut ChaCha8Rng::seed_from_u64(SEED ^ 4)).unwrap();
    (spec, models)
}

fn criterion_4() -> Outcome {
    let (spec, models) = concordance_models();
    let config = ConcordanceConfig {
        plan: MutantPlan::default(),
        alphabet: spec.alphabet(),
        seed: SEED,
    };
    let report = concordance(&models, &config).map_err(|e| e.to_string())?;
    check(report.models >= 100, || format!("only {} models", report.models))?;
    let accepted = report.count(MutantCategory::Accepted, Verdict::Covered);
    let single: usize = Verdict::ALL
        .iter()
        .map(|v| report.count(MutantCategory::SingleAction, *v))
        .sum();
    check(single == 18 * report.models, || {
        format!("{single} single-action traces")
    })?;
    check(report.mismatches.is_empty(), || {
        format!("{} mismatches:\n{}", report.mismatches.len(), report.mismatches_jsonl())
    })?;
    let mut table = String::new();
    for ((c, e, o), n) in &report.table {
        table.push_str(&format!("\n    {c:<13} expected {e:<8} obtained {o:<8} {n}"));
    }
    Ok(format!(
        "{} traces over {} models, 0 mismatches, {accepted} accepted traces Covered{table}",
        report.traces, report.models
    ))
}

fn criterion_5() -> Outcome {
    let (spec, models) = concordance_models();
    let alphabet = spec.alphabet();
    let results: Vec<Result<(usize, Vec<String>), String>> = models
        .par_iter()
        .enumerate()
        .map(|(k, i)| {
            let batches = generate_mutants(i, &MutantPlan::default(), &alphabet, derive_seed(SEED, k as u64))
                .map_err(|e| e.to_string())?;
            let mut pairs = 0;
            let mut bad = Vec::new();
            for b in batches {
                for t in &b.mutants {
                    pairs += 1;
                    let covered = analyze(i, t).verdict == Verdict::Covered;
                    let member = sigma_o_capped(i, t.len(), 1_000_000)
                        .map_err(|e| e.to_string())?
                        .contains(t);
                    if covered != member {
                        bad.push(format!("{i} / {t}: covered={covered} member={member}"));
                    }
                }
            }
            Ok((pairs, bad))
        })
        .collect();
    let mut pairs = 0;
    let mut bad = Vec::new();
    for r in results {
        let (p, b) = r?;
        pairs += p;
        bad.extend(b);
    }
    check(bad.is_empty(), || {
        format!("{} of {pairs} pairs disagree, first {}", bad.len(), bad[0])
    })?;
    Ok(format!(
        "{pairs} (model, trace) pairs: Covered iff member of sigma_o(i,|t|)"
    ))
}

fn criterion_6() -> Outcome {
    let model = mqtt_model();
    let traces = generate_concurrent_traces(&model, 10, 20, SEED).map_err(|e| e.to_string())?;
    for t in &traces {
        let v = analyze(&model, t).verdict;
        check(v == Verdict::Covered, || format!("{t}: {v}"))?;
    }
    let long: Vec<Trace> = traces.iter().filter(|t| t.len() >= 50).map(|t| t.prefix(50)).collect();
    check(!long.is_empty(), || "no trace reaches length 50".into())?;
    let mut times: Vec<Duration> = long
        .iter()
        .map(|t| {
            let s = Instant::now();
            let _ = analyze(&model, t);
            s.elapsed()
        })
        .collect();
    times.sort();
    let median = times[times.len() / 2];
    check(median < Duration::from_secs(10), || format!("median {median:?}"))?;

    let records = bench_trace_analysis(&model, &traces[..1]);
    for r in &records {
        let full = r.length == traces[r.trace].len();
        let ok = if full {
            r.verdict == Verdict::Covered
        } else {
            matches!(r.verdict, Verdict::Covered | Verdict::TooShort)
        };
        check(ok, || format!("trace {} prefix {}: {}", r.trace, r.length, r.verdict))?;
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("mqtt_prefix_times.tsv");
    std::fs::write(&path, bench_tsv(&records)).map_err(|e| e.to_string())?;
    let lengths: Vec<usize> = traces.iter().map(Trace::len).collect();
    Ok(format!(
        "20 traces Covered (lengths {}..{}), median time at length 50 over {} traces {median:.3?}; series in {}",
        lengths.iter().min().unwrap(),
        lengths.iter().max().unwrap(),
        long.len(),
        path.display()
    ))
}

fn combine(op: BinaryOp, s1: &TraceSet, s2: &TraceSet) -> TraceSet {
    let mut out = TraceSet::new();
    for t1 in s1.iter() {
        for t2 in s2.iter() {
            for t in common::interleavings(t1.actions(), t2.actions()) {
                let keep = t.iter().enumerate().all(|(k, (right, a))| {
                    !right
                        || t[k + 1..].iter().all(|(r2, b)| match op {
                            BinaryOp::Strict => *r2,
                            BinaryOp::Seq => *r2 || a.lifeline() != b.lifeline(),
                            _ => true,
                        })
                });
                if keep {
                    out.insert(t.into_iter().map(|(_, a)| a).collect());
                }
            }
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let small: Vec<Interaction> = enumerate(&EnumSpec::new(1, 1, 3).unwrap()).collect();

    // term round trip and position laws
    for i in &small {
        check(parse(&i.to_string()).as_ref() == Ok(i), || format!("round trip of {i}"))?;
        for p in i.positions() {
            let s = i.subterm_at(&p).unwrap().clone();
            check(i.replace_at(&p, s).as_ref() == Ok(i), || {
                format!("replace at {p} in {i}")
            })?;
        }
    }

    // sigma_u grows with the bound
    let bad = small.par_iter().find_any(|i| {
        (0..2).any(
            |n| match (sigma_u_capped(i, n, 100_000), sigma_u_capped(i, n + 1, 100_000)) {
                (Ok(a), Ok(b)) => !a.is_subset(&b),
                _ => true,
            },
        )
    });
    check(bad.is_none(), || format!("sigma_u not monotone on {}", bad.unwrap()))?;

    // alt is union, on all pairs of depth <= 2 terms
    let d2: Vec<Interaction> = enumerate(&EnumSpec::new(1, 1, 2).unwrap()).collect();
    let bad = d2.par_iter().find_map_any(|i1| {
        d2.iter().find_map(|i2| {
            let i = Interaction::alt(i1.clone(), i2.clone());
            let mut union = sigma_u(i1, 2);
            union.extend(sigma_u(i2, 2));
            (sigma_u(&i, 2) != union).then(|| i.to_string())
        })
    });
    check(bad.is_none(), || format!("alt law fails on {}", bad.unwrap()))?;

    // weak sequencing (and strict, par) by brute force on loop-free terms with at most 4 actions
    let loop_free = NodeKinds {
        loops: vec![],
        ..NodeKinds::default()
    };
    let lf: Vec<Interaction> = enumerate(&EnumSpec::with_kinds(2, 1, 2, loop_free).unwrap()).collect();
    let bad = lf.par_iter().find_map_any(|i1| {
        lf.iter().find_map(|i2| {
            if i1.action_count() + i2.action_count() > 4 {
                return None;
            }
            let (s1, s2) = (sigma_basic(i1).unwrap(), sigma_basic(i2).unwrap());
            [BinaryOp::Seq, BinaryOp::Strict, BinaryOp::Par]
                .into_iter()
                .find_map(|op| {
                    let i = Interaction::binary(op, i1.clone(), i2.clone());
                    (sigma_basic(&i).unwrap() != combine(op, &s1, &s2)).then(|| i.to_string())
                })
        })
    });
    check(bad.is_none(), || {
        format!("brute-force sequencing law fails on {}", bad.unwrap())
    })?;

    // prune soundness on every depth <= 3 term over two lifelines
    let d3: Vec<Interaction> = enumerate(&EnumSpec::new(2, 1, 3).unwrap()).collect();
    let bad = d3.par_iter().find_map_any(|i| {
        ["a", "b"].into_iter().find_map(|l| {
            let r = prune(i, l);
            (0..=2).find_map(|n| {
                let kept: TraceSet = sigma_o(i, n)
                    .iter()
                    .filter(|t| t.actions().iter().all(|a| a.lifeline() != l))
                    .cloned()
                    .collect();
                let ok = if r.eliminated {
                    kept.is_empty()
                } else {
                    sigma_o(&r.pruned, n) == kept
                };
                (!ok).then(|| format!("{i} on {l} at {n}"))
            })
        })
    });
    check(bad.is_none(), || format!("prune soundness fails on {}", bad.unwrap()))?;

    // omega degrades monotonically along accepted traces
    let models = sample_interactions(
        &EnumSpec::new(2, 2, 3).unwrap(),
        300,
        &mut ChaCha8Rng::seed_from_u64(SEED ^ 7),
    )
    .unwrap();
    let extra = parse_trace_permissive("a!m1").unwrap();
    let bad = models.par_iter().find_map_any(|i| {
        let accepted = sigma_o_capped(i, 2, 100_000).ok()?;
        let bad = accepted.iter().take(30).find_map(|t| {
            let full = analyze(i, t).verdict == Verdict::Covered;
            let prefixes =
                (0..t.len()).all(|k| matches!(analyze(i, &t.prefix(k)).verdict, Verdict::Covered | Verdict::TooShort));
            let mut longer = t.clone();
            longer.push(extra.actions()[0].clone());
            let v = analyze(i, &longer).verdict;
            let oracle = classify_expected(i, &longer, sufficient_bound(i, &longer));
            (!(full && prefixes && v != Verdict::Out && v == oracle)).then(|| format!("{i} / {t}"))
        });
        bad
    });
    check(bad.is_none(), || format!("omega degradation fails on {}", bad.unwrap()))?;

    Ok(format!(
        "round trip on {} terms, monotonicity, alt union on {} pairs, sequencing on {} loop-free pairs, prune on {} terms, omega on {} models",
        small.len(),
        d2.len() * d2.len(),
        lf.len() * lf.len(),
        d3.len(),
        models.len()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("enumeration counts", criterion_1),
        ("worked-example goldens", criterion_2),
        ("back-to-back semantics equality", criterion_3),
        ("analyzer/oracle concordance", criterion_4),
        ("Covered iff bounded membership", criterion_5),
        ("performance smoke", criterion_6),
        ("property suites", criterion_7),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({took:.1?}): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({took:.1?}): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
