//! Formal semantics for interaction terms: a term algebra, a textual
//! syntax, denotational and operational trace semantics, offline trace
//! analysis, and a test harness relating all of them.

pub mod analysis;
pub mod denotational;
pub mod dsl;
pub mod error;
pub mod harness;
pub mod operational;
pub mod term;

pub use analysis::{analyze, analyze_in, verdict_max, AnalysisReport, Verdict, WitnessStep};
pub use denotational::{sigma_basic, sigma_u, TraceSet};
pub use dsl::{parse_interaction, parse_trace, print_interaction, ParseError, Trace};
pub use error::{Error, Result};
pub use operational::{execute, exp_eps, frontier, prune, sigma_o, Step};
pub use term::{Action, BinaryOp, Direction, Interaction, LoopKind, Position, Signature};
