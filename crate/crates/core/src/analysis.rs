//! Offline trace analysis with four verdicts.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsl::Trace;
use crate::error::{Error, Result};
use crate::operational::{exp_eps, steps};
use crate::term::{Action, Interaction, Position, Signature};

/// Analysis verdicts, totally ordered `Out < TooLong < TooShort < Covered`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Out,
    TooLong,
    TooShort,
    Covered,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [Verdict::Covered, Verdict::TooShort, Verdict::TooLong, Verdict::Out];

    pub fn token(self) -> &'static str {
        match self {
            Verdict::Out => "Out",
            Verdict::TooLong => "TooLong",
            Verdict::TooShort => "TooShort",
            Verdict::Covered => "Covered",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Verdict::ALL
            .into_iter()
            .find(|v| v.token() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown verdict `{s}`")))
    }
}

/// The strongest verdict; `None` for an empty input.
pub fn verdict_max(vs: impl IntoIterator<Item = Verdict>) -> Option<Verdict> {
    vs.into_iter().max()
}

/// One executed action along the witness path, with the resulting term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub position: Position,
    pub term: Interaction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub verdict: Verdict,
    /// Number of analysis nodes evaluated.
    pub explored_nodes: u64,
    /// Steps of the first derivation reaching `verdict`; `None` iff `Out`.
    pub witness: Option<Vec<WitnessStep>>,
}

/// Analyzes `t` against `i`, after checking both against `sig`.
pub fn analyze_in(sig: &Signature, i: &Interaction, t: &Trace) -> Result<AnalysisReport> {
    sig.check_interaction(i)?;
    for a in t.actions() {
        sig.check_action(a)?;
    }
    Ok(analyze(i, t))
}

/// Computes the verdict of `t` against `i`.
///
/// The empty trace is `Covered` when `i` expresses `ε` and `TooShort`
/// otherwise. A trace `act.t'` gets the strongest of `TooLong`/`Out`
/// (depending on `exp_eps(i)`) and the verdicts of `t'` against every
/// frontier step matching `act`. Exploration stops at the first `Covered`.
pub fn analyze(i: &Interaction, t: &Trace) -> AnalysisReport {
    let mut omega = Omega {
        trace: t.actions(),
        memo: HashMap::new(),
        explored: 0,
    };
    let verdict = omega.eval(i, 0);
    let witness = (verdict > Verdict::Out).then(|| omega.witness(i));
    AnalysisReport {
        verdict,
        explored_nodes: omega.explored,
        witness,
    }
}

struct Node {
    verdict: Verdict,
    next: Option<(Position, Interaction)>,
}

struct Omega<'t> {
    trace: &'t [Action],
    memo: HashMap<(Interaction, usize), Node>,
    explored: u64,
}

impl Omega<'_> {
    fn eval(&mut self, i: &Interaction, k: usize) -> Verdict {
        let key = (i.clone(), k);
        if let Some(node) = self.memo.get(&key) {
            return node.verdict;
        }
        self.explored += 1;
        let accepts_eps = exp_eps(i);
        let node = if k == self.trace.len() {
            Node {
                verdict: if accepts_eps {
                    Verdict::Covered
                } else {
                    Verdict::TooShort
                },
                next: None,
            }
        } else {
            let mut best = Node {
                verdict: if accepts_eps { Verdict::TooLong } else { Verdict::Out },
                next: None,
            };
            let head = &self.trace[k];
            for step in steps(i) {
                if &step.action != head {
                    continue;
                }
                let v = self.eval(&step.next, k + 1);
                if v > best.verdict {
                    best = Node {
                        verdict: v,
                        next: Some((step.position, step.next)),
                    };
                    if v == Verdict::Covered {
                        break;
                    }
                }
            }
            best
        };
        let verdict = node.verdict;
        self.memo.insert(key, node);
        verdict
    }

    fn witness(&self, root: &Interaction) -> Vec<WitnessStep> {
        let mut out = Vec::new();
        let mut cur = root.clone();
        let mut k = 0;
        while let Some(Node { next: Some((p, n)), .. }) = self.memo.get(&(cur.clone(), k)) {
            out.push(WitnessStep {
                position: p.clone(),
                term: n.clone(),
            });
            cur = n.clone();
            k += 1;
        }
        out
    }
}
