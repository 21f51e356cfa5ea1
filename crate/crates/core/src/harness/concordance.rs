use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::mutants::{derive_seed, generate_mutants, MutantCategory, MutantPlan};
use crate::analysis::{analyze, Verdict};
use crate::error::Result;
use crate::term::{Action, Interaction};

#[derive(Debug, Clone)]
pub struct ConcordanceConfig {
    pub plan: MutantPlan,
    /// Actions used for single-action traces and for mutations.
    pub alphabet: Vec<Action>,
    pub seed: u64,
}

/// A trace on which the analyzer and the oracle disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub model: String,
    pub trace: String,
    pub category: MutantCategory,
    pub expected: Verdict,
    pub obtained: Verdict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConcordanceReport {
    pub models: usize,
    pub traces: usize,
    /// Trace counts keyed by (category, expected, obtained).
    pub table: BTreeMap<(MutantCategory, Verdict, Verdict), usize>,
    pub mismatches: Vec<Mismatch>,
}

impl ConcordanceReport {
    fn merge(mut self, other: ConcordanceReport) -> Self {
        self.models += other.models;
        self.traces += other.traces;
        for (k, n) in other.table {
            *self.table.entry(k).or_default() += n;
        }
        self.mismatches.extend(other.mismatches);
        self
    }

    /// Traces of `category` that got `obtained`.
    pub fn count(&self, category: MutantCategory, obtained: Verdict) -> usize {
        self.table
            .iter()
            .filter(|((c, _, o), _)| *c == category && *o == obtained)
            .map(|(_, n)| n)
            .sum()
    }

    /// Tab-separated rows `category expected obtained count`, with a header.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("category\texpected\tobtained\tcount\n");
        for ((c, e, o), n) in &self.table {
            let _ = writeln!(s, "{c}\t{e}\t{o}\t{n}");
        }
        s
    }

    /// One JSON object per line per mismatch.
    pub fn mismatches_jsonl(&self) -> String {
        self.mismatches
            .iter()
            .map(|m| serde_json::to_string(m).expect("plain data") + "\n")
            .collect()
    }
}

/// Runs the analyzer against the oracle on every mutant of every model.
///
/// Models are processed in parallel; model `k` uses the seed
/// `derive_seed(config.seed, k)`, so results do not depend on scheduling.
pub fn concordance(models: &[Interaction], config: &ConcordanceConfig) -> Result<ConcordanceReport> {
    let parts: Vec<ConcordanceReport> = models
        .par_iter()
        .enumerate()
        .map(|(k, i)| model_concordance(i, config, derive_seed(config.seed, k as u64)))
        .collect::<Result<_>>()?;
    Ok(parts
        .into_iter()
        .fold(ConcordanceReport::default(), ConcordanceReport::merge))
}

fn model_concordance(i: &Interaction, config: &ConcordanceConfig, seed: u64) -> Result<ConcordanceReport> {
    let mut report = ConcordanceReport {
        models: 1,
        ..ConcordanceReport::default()
    };
    for batch in generate_mutants(i, &config.plan, &config.alphabet, seed)? {
        for (t, &expected) in batch.mutants.iter().zip(&batch.expected) {
            let obtained = analyze(i, t).verdict;
            report.traces += 1;
            *report.table.entry((batch.category, expected, obtained)).or_default() += 1;
            if obtained != expected {
                report.mismatches.push(Mismatch {
                    model: i.to_string(),
                    trace: t.to_string(),
                    category: batch.category,
                    expected,
                    obtained,
                });
            }
        }
    }
    Ok(report)
}
