//! Optimal non-crossing matching restricted to a sparse edge set.
//!
//! Given candidate edges (r, s) between positions of two strings, find a
//! maximum-cardinality subset that is strictly increasing in both
//! coordinates. Sorting by r ascending with s descending as a tiebreak
//! reduces the problem to longest strictly-increasing subsequence on the
//! s values, solved with binary-searchable tails and predecessor links.

use crate::error::{Error, Result};
use crate::meter::WorkMeter;
use crate::script::{EditOp, EditScript};
use crate::text::Text;

/// Candidate edges between 1-based positions; duplicates removed on
/// canonicalization.
#[derive(Debug, Clone, Default)]
pub struct EdgeSet {
    edges: Vec<(usize, usize)>,
}

impl EdgeSet {
    pub fn new(mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// A non-crossing matching: pairs strictly increasing in both coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    pairs: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        for w in pairs.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 <= w[0].1 {
                return Err(Error::InvalidParam(format!(
                    "alignment pairs {:?} and {:?} cross or repeat",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { pairs })
    }

    pub fn empty() -> Self {
        Self { pairs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Maximum non-crossing subset of `T`. Ties among equal-cardinality
/// optima break toward the leftmost tail choices; the cardinality is
/// what is guaranteed. Charges one unit per edge processed.
pub fn max_restricted_alignment(t: &EdgeSet, meter: &mut WorkMeter) -> Alignment {
    let mut edges = t.edges().to_vec();
    if edges.is_empty() {
        return Alignment::empty();
    }
    // r ascending, s descending: equal-r edges can then never chain.
    edges.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));

    // tails[l] = index of the edge ending the best-so-far chain of length
    // l+1 with the smallest s.
    let mut tails: Vec<usize> = Vec::new();
    let mut prev: Vec<usize> = vec![usize::MAX; edges.len()];
    for (idx, &(_, s)) in edges.iter().enumerate() {
        meter.charge(1);
        let slot = tails.partition_point(|&tail| edges[tail].1 < s);
        if slot > 0 {
            prev[idx] = tails[slot - 1];
        }
        if slot == tails.len() {
            tails.push(idx);
        } else {
            tails[slot] = idx;
        }
    }

    let mut chain = Vec::with_capacity(tails.len());
    let mut cur = *tails.last().unwrap();
    loop {
        chain.push(edges[cur]);
        if prev[cur] == usize::MAX {
            break;
        }
        cur = prev[cur];
    }
    chain.reverse();
    Alignment::new(chain).expect("LIS chain is strictly increasing in both coordinates")
}

/// Convert an alignment whose pairs connect equal symbols into the indel
/// script that deletes unmatched `u` positions and inserts unmatched `v`
/// positions. Length is exactly |u| + |v| - 2|A|.
pub fn script_from_alignment(u: &Text, v: &Text, a: &Alignment) -> Result<EditScript> {
    for &(r, s) in a.pairs() {
        if u.sym(r) != v.sym(s) {
            return Err(Error::MismatchedPair { u_pos: r, v_pos: s });
        }
    }
    let mut ops = Vec::with_capacity(u.len() + v.len() - 2 * a.len());
    // Work right to left over the gaps between consecutive matched pairs,
    // so every position is still valid when its op applies.
    let mut hi_u = u.len();
    let mut hi_v = v.len();
    for k in (0..=a.len()).rev() {
        let (lo_u, lo_v) = if k == 0 { (0, 0) } else { a.pairs()[k - 1] };
        for pos in ((lo_u + 1)..=hi_u).rev() {
            ops.push(EditOp::Delete { pos });
        }
        for s in ((lo_v + 1)..=hi_v).rev() {
            ops.push(EditOp::Insert {
                pos: lo_u + 1,
                symbol: v.sym(s),
            });
        }
        if k > 0 {
            hi_u = lo_u - 1;
            hi_v = lo_v - 1;
        }
    }
    Ok(EditScript::new(ops))
}
