//! Exhaustive enumeration of interactions by depth, with closed-form counts
//! and direct indexing for uniform sampling.
//!
//! Terms are listed depth by depth. Inside a depth `d > 1`, binary nodes come
//! first (operator by operator, then operand pairs in lexicographic index
//! order with at least one operand of depth `d - 1`), then loops (kind by
//! kind, then body). The index of a term in [`enumerate`] is the index
//! accepted by [`nth_interaction`].

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::term::{Action, BinaryOp, Interaction, LoopKind, Signature};

/// Node kinds allowed in enumerated terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeKinds {
    pub empty: bool,
    pub actions: bool,
    pub binary: Vec<BinaryOp>,
    pub loops: Vec<LoopKind>,
}

impl Default for NodeKinds {
    fn default() -> Self {
        NodeKinds {
            empty: true,
            actions: true,
            binary: BinaryOp::ALL.to_vec(),
            loops: LoopKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumSpec {
    pub lifelines: usize,
    pub messages: usize,
    pub depth: usize,
    pub kinds: NodeKinds,
}

impl EnumSpec {
    pub fn new(lifelines: usize, messages: usize, depth: usize) -> Result<Self> {
        Self::with_kinds(lifelines, messages, depth, NodeKinds::default())
    }

    pub fn with_kinds(lifelines: usize, messages: usize, depth: usize, kinds: NodeKinds) -> Result<Self> {
        if lifelines == 0 || messages == 0 {
            return Err(Error::InvalidArgument(
                "lifeline and message counts must be at least 1".into(),
            ));
        }
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        Ok(EnumSpec {
            lifelines,
            messages,
            depth,
            kinds,
        })
    }

    /// Generated signature: lifelines `a, b, ...`, messages `m` or `m1, m2, ...`.
    pub fn signature(&self) -> Signature {
        Signature::generated(self.lifelines, self.messages).expect("validated counts")
    }

    /// Depth-1 terms in enumeration order.
    pub fn leaves(&self) -> Vec<Interaction> {
        let mut out = Vec::new();
        if self.kinds.empty {
            out.push(Interaction::Empty);
        }
        if self.kinds.actions {
            out.extend(self.signature().actions().into_iter().map(Interaction::act));
        }
        out
    }

    /// Every action of the signature, as used for single-action traces.
    pub fn alphabet(&self) -> Vec<Action> {
        self.signature().actions()
    }
}

/// Number of terms of each exact depth `1..=spec.depth`.
///
/// `a(1)` is the number of leaves; for `d > 1`,
/// `a(d) = b·(S(d-1)² - S(d-2)²) + k·a(d-1)` with `b` binary operators,
/// `k` loop kinds and `S` the running sum.
pub fn count_by_depth(spec: &EnumSpec) -> Result<Vec<u128>> {
    let overflow = || Error::ResourceLimit {
        what: "term count",
        size: usize::MAX,
        cap: usize::MAX,
    };
    let nb = spec.kinds.binary.len() as u128;
    let nk = spec.kinds.loops.len() as u128;
    let mut a = vec![spec.leaves().len() as u128];
    let mut s = vec![0u128, a[0]];
    for d in 2..=spec.depth {
        let s1 = s[d - 1];
        let s2 = s[d - 2];
        let pairs = s1
            .checked_mul(s1)
            .and_then(|x| x.checked_sub(s2 * s2))
            .ok_or_else(overflow)?;
        let n = nb
            .checked_mul(pairs)
            .and_then(|x| x.checked_add(nk.checked_mul(a[d - 2])?))
            .ok_or_else(overflow)?;
        a.push(n);
        s.push(s1.checked_add(n).ok_or_else(overflow)?);
    }
    Ok(a)
}

/// Total number of terms of depth at most `spec.depth`.
pub fn count_total(spec: &EnumSpec) -> Result<u128> {
    Ok(count_by_depth(spec)?.iter().sum())
}

/// Lazily yields every term of depth at most `spec.depth`, each once.
///
/// Terms below the maximal depth are materialized; the last level is
/// generated on demand.
pub fn enumerate(spec: &EnumSpec) -> Box<dyn Iterator<Item = Interaction> + Send> {
    let mut all: Vec<Interaction> = spec.leaves();
    let mut level_start = 0;
    for _ in 2..spec.depth {
        let next = level(&all, level_start, spec);
        level_start = all.len();
        all.extend(next);
    }
    if spec.depth == 1 {
        return Box::new(all.into_iter());
    }
    let below: Arc<Vec<Interaction>> = Arc::new(all);
    let n = below.len();
    let split = level_start;
    let binaries = {
        let below = below.clone();
        spec.kinds.binary.clone().into_iter().flat_map(move |op| {
            let below = below.clone();
            (0..n).flat_map(move |li| {
                let below = below.clone();
                let rs = if li < split { split..n } else { 0..n };
                rs.map(move |ri| Interaction::binary(op, below[li].clone(), below[ri].clone()))
            })
        })
    };
    let loops = {
        let below = below.clone();
        spec.kinds.loops.clone().into_iter().flat_map(move |k| {
            let below = below.clone();
            (split..n).map(move |bi| Interaction::looped(k, below[bi].clone()))
        })
    };
    let prefix: Vec<Interaction> = below.to_vec();
    Box::new(prefix.into_iter().chain(binaries).chain(loops))
}

fn level(all: &[Interaction], split: usize, spec: &EnumSpec) -> Vec<Interaction> {
    let n = all.len();
    let mut out = Vec::new();
    for &op in &spec.kinds.binary {
        for li in 0..n {
            let rs = if li < split { split..n } else { 0..n };
            for ri in rs {
                out.push(Interaction::binary(op, all[li].clone(), all[ri].clone()));
            }
        }
    }
    for &k in &spec.kinds.loops {
        for body in &all[split..] {
            out.push(Interaction::looped(k, body.clone()));
        }
    }
    out
}

/// The term at `index` in [`enumerate`] order, computed without listing its
/// predecessors. `None` when `index` is past the end.
pub fn nth_interaction(spec: &EnumSpec, index: u128) -> Option<Interaction> {
    let counts = count_by_depth(spec).ok()?;
    let mut sums = vec![0u128];
    for c in &counts {
        sums.push(sums.last().unwrap() + c);
    }
    if index >= *sums.last().unwrap() {
        return None;
    }
    Some(unrank(spec, &spec.leaves(), &counts, &sums, index))
}

fn unrank(spec: &EnumSpec, leaves: &[Interaction], a: &[u128], s: &[u128], index: u128) -> Interaction {
    // s[d] = number of terms of depth ≤ d
    let d = (1..s.len()).find(|&d| index < s[d]).expect("index in range");
    let k = index - s[d - 1];
    if d == 1 {
        return leaves[k as usize].clone();
    }
    let (s1, s2) = (s[d - 1], s[d - 2]);
    let block = s1 * s1 - s2 * s2;
    let nb = spec.kinds.binary.len() as u128;
    if k < nb * block {
        let op = spec.kinds.binary[(k / block) as usize];
        let k = k % block;
        let low = s2 * a[d - 2];
        let (li, ri) = if k < low {
            (k / a[d - 2], s2 + k % a[d - 2])
        } else {
            let k = k - low;
            (s2 + k / s1, k % s1)
        };
        Interaction::binary(op, unrank(spec, leaves, a, s, li), unrank(spec, leaves, a, s, ri))
    } else {
        let k = k - nb * block;
        let kind = spec.kinds.loops[(k / a[d - 2]) as usize];
        Interaction::looped(kind, unrank(spec, leaves, a, s, s2 + k % a[d - 2]))
    }
}

/// `n` distinct terms drawn uniformly among all terms of depth at most
/// `spec.depth` (all of them when fewer exist), in index order.
pub fn sample_interactions(spec: &EnumSpec, n: usize, rng: &mut impl Rng) -> Result<Vec<Interaction>> {
    let total = count_total(spec)?;
    let mut indices: Vec<u128> = if total <= usize::MAX as u128 && (total as usize) <= n {
        (0..total).collect()
    } else if total <= u32::MAX as u128 {
        sample(rng, total as usize, n).into_iter().map(|i| i as u128).collect()
    } else {
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < n {
            seen.insert(rng.gen_range(0..total));
        }
        seen.into_iter().collect()
    };
    indices.sort_unstable();
    Ok(indices
        .into_iter()
        .map(|i| nth_interaction(spec, i).expect("index below total"))
        .collect())
}
