use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::diff::DEFAULT_TRACE_CAP;
use super::oracle::{classify_expected, sufficient_bound};
use crate::analysis::Verdict;
use crate::dsl::Trace;
use crate::error::{Error, Result};
use crate::operational::sigma_o_capped;
use crate::term::{Action, Interaction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutantCategory {
    Accepted,
    SingleAction,
    Prefix,
    Addition,
    Replacement,
}

impl MutantCategory {
    pub const ALL: [MutantCategory; 5] = [
        MutantCategory::Accepted,
        MutantCategory::SingleAction,
        MutantCategory::Prefix,
        MutantCategory::Addition,
        MutantCategory::Replacement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutantCategory::Accepted => "accepted",
            MutantCategory::SingleAction => "single-action",
            MutantCategory::Prefix => "prefix",
            MutantCategory::Addition => "addition",
            MutantCategory::Replacement => "replacement",
        }
    }
}

impl fmt::Display for MutantCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Traces derived from one origin, each with its oracle verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantBatch {
    pub origin: Trace,
    pub category: MutantCategory,
    pub mutants: Vec<Trace>,
    pub expected: Vec<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantPlan {
    /// Loop budget for sampling accepted traces.
    pub bound: usize,
    /// Accepted traces per model.
    pub samples: usize,
    /// Addition mutants per accepted trace.
    pub additions: usize,
    /// Replacement mutants per accepted trace.
    pub replacements: usize,
    pub cap: usize,
}

impl Default for MutantPlan {
    fn default() -> Self {
        MutantPlan {
            bound: 3,
            samples: 5,
            additions: 5,
            replacements: 5,
            cap: DEFAULT_TRACE_CAP,
        }
    }
}

/// Seed for the `index`-th work item of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Builds the mutant batches of one model.
///
/// The first batch holds the single-action traces over `alphabet`. Then, for
/// each of `plan.samples` traces drawn without replacement from
/// `sigma_o(i, plan.bound)`, come the accepted trace itself, all its strict
/// prefixes, `plan.additions` traces extending it by a random action, and
/// `plan.replacements` traces made of a random non-empty prefix whose last
/// action is replaced by a different one. Random choices use ChaCha8 seeded
/// from `seed`.
pub fn generate_mutants(
    i: &Interaction,
    plan: &MutantPlan,
    alphabet: &[Action],
    seed: u64,
) -> Result<Vec<MutantBatch>> {
    if plan.samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let accepted: Vec<Trace> = sigma_o_capped(i, plan.bound, plan.cap)?.into_iter().collect();
    if accepted.is_empty() {
        return Err(Error::EmptySemantics);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch = |origin: &Trace, category, mutants: Vec<Trace>| {
        let expected = mutants
            .iter()
            .map(|t| classify_expected(i, t, sufficient_bound(i, t)))
            .collect();
        MutantBatch {
            origin: origin.clone(),
            category,
            mutants,
            expected,
        }
    };

    let mut out = vec![batch(
        &Trace::empty(),
        MutantCategory::SingleAction,
        alphabet.iter().map(|a| Trace::new(vec![a.clone()])).collect(),
    )];
    let n = plan.samples.min(accepted.len());
    let mut picked = sample(&mut rng, accepted.len(), n).into_vec();
    picked.sort_unstable();
    for origin in picked.into_iter().map(|k| &accepted[k]) {
        out.push(batch(origin, MutantCategory::Accepted, vec![origin.clone()]));
        out.push(batch(
            origin,
            MutantCategory::Prefix,
            (0..origin.len()).map(|k| origin.prefix(k)).collect(),
        ));
        if !alphabet.is_empty() {
            let additions = (0..plan.additions)
                .map(|_| {
                    let mut t = origin.clone();
                    t.push(alphabet[rng.gen_range(0..alphabet.len())].clone());
                    t
                })
                .collect();
            out.push(batch(origin, MutantCategory::Addition, additions));
        }
        if alphabet.len() > 1 && !origin.is_empty() {
            let replacements = (0..plan.replacements)
                .map(|_| {
                    let m = rng.gen_range(1..=origin.len());
                    let old = &origin.actions()[m - 1];
                    let others: Vec<&Action> = alphabet.iter().filter(|a| *a != old).collect();
                    let mut t = origin.prefix(m - 1);
                    t.push(others[rng.gen_range(0..others.len())].clone());
                    t
                })
                .collect();
            out.push(batch(origin, MutantCategory::Replacement, replacements));
        }
    }
    Ok(out)
}
