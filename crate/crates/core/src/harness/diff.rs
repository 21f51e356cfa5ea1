use crate::denotational::{sigma_u_capped, TraceSet};
use crate::error::Result;
use crate::operational::sigma_o_capped;
use crate::term::Interaction;

/// Default cap on the size of either trace set in a comparison.
pub const DEFAULT_TRACE_CAP: usize = 1_000_000;

/// Back-to-back comparison of the unfolding and operational semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOutcome {
    pub interaction: Interaction,
    pub bound: usize,
    pub equal: bool,
    pub only_u: TraceSet,
    pub only_o: TraceSet,
}

pub fn diff_semantics(i: &Interaction, bound: usize) -> Result<DiffOutcome> {
    diff_semantics_capped(i, bound, DEFAULT_TRACE_CAP)
}

/// Fails with `ResourceLimit` when either set grows past `cap`.
pub fn diff_semantics_capped(i: &Interaction, bound: usize, cap: usize) -> Result<DiffOutcome> {
    let u = sigma_u_capped(i, bound, cap)?;
    let o = sigma_o_capped(i, bound, cap)?;
    let only_u = u.difference(&o);
    let only_o = o.difference(&u);
    Ok(DiffOutcome {
        interaction: i.clone(),
        bound,
        equal: only_u.is_empty() && only_o.is_empty(),
        only_u,
        only_o,
    })
}
