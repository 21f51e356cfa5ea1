//! Experiment drivers: enumeration of terms by depth, back-to-back
//! comparison of the two semantics, mutant generation with an independent
//! verdict oracle, analyzer concordance and timing.

pub mod bench;
pub mod concordance;
pub mod diff;
pub mod enumeration;
pub mod mutants;
pub mod oracle;

pub use bench::{bench_trace_analysis, bench_tsv, generate_concurrent_traces, mqtt_model, BenchRecord};
pub use concordance::{concordance, ConcordanceConfig, ConcordanceReport, Mismatch};
pub use diff::{diff_semantics, diff_semantics_capped, DiffOutcome, DEFAULT_TRACE_CAP};
pub use enumeration::{
    count_by_depth, count_total, enumerate, nth_interaction, sample_interactions, EnumSpec, NodeKinds,
};
pub use mutants::{derive_seed, generate_mutants, MutantBatch, MutantCategory, MutantPlan};
pub use oracle::{classify_expected, completion, sufficient_bound};
