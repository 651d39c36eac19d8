//! Reduction from string pairs to block matching and back.
//!
//! x is cut into blocks of 6B letters and y into blocks of 3B letters
//! (both padded to a common multiple of 6B first). An x-block *partially
//! edit matches* a y-block j when some 6B-letter window of y, starting
//! inside block j-1 on a coarse offset grid, is within the match radius
//! of it; it *fully* matches j when it partially matches j but not j-1.
//! Full matching feeds the clean-alignment solver, and the block pairs
//! it returns are expanded back into a letter-level script through the
//! sparse matcher.

use std::collections::HashMap;

use crate::clean::{solve_clean_alignment, BlockAlignment, MatchOracle};
use crate::distance::ed_bounded_slices;
use crate::error::{Error, Result};
use crate::meter::WorkMeter;
use crate::rng::Prng;
use crate::script::{apply_script, merge_adjacent_indels, EditScript};
use crate::sparse::{max_restricted_alignment, script_from_alignment, EdgeSet};
use crate::text::Text;

/// Pseudorandomness parameters (p, B), with p kept as the exact unit
/// fraction 1/inv_p so threshold comparisons stay in integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PseudoParams {
    inv_p: usize,
    b: usize,
    clamped: bool,
}

impl PseudoParams {
    /// `inv_p` is 1/p. Values of p below 1/B are clamped up to 1/B,
    /// which leaves the set of p-unique blocks unchanged.
    pub fn new(inv_p: usize, b: usize) -> Result<Self> {
        if inv_p == 0 {
            return Err(Error::InvalidParam("1/p must be a positive integer".into()));
        }
        if b == 0 {
            return Err(Error::InvalidParam("block size B must be positive".into()));
        }
        let clamped = inv_p > b;
        Ok(Self {
            inv_p: if clamped { b } else { inv_p },
            b,
            clamped,
        })
    }

    /// Parse "1/4", "2/8", or "1" style ratios into the unit fraction.
    pub fn parse_p(s: &str) -> Result<usize> {
        let bad = || Error::Parse(format!("cannot parse p from {s:?}; expected a/b with a|b"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (
                a.trim().parse::<u64>().map_err(|_| bad())?,
                b.trim().parse::<u64>().map_err(|_| bad())?,
            ),
            None => (s.trim().parse::<u64>().map_err(|_| bad())?, 1),
        };
        if num == 0 || den == 0 || den % num != 0 {
            return Err(Error::Parse(format!(
                "p = {s} is not a unit fraction with integral 1/p"
            )));
        }
        Ok((den / num) as usize)
    }

    pub fn inv_p(&self) -> usize {
        self.inv_p
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    /// Edit radius for window matches: floor(B / 8p).
    pub fn match_radius(&self) -> usize {
        self.b * self.inv_p / 8
    }

    /// Window offset grid: max(1, floor(pB / 100)).
    pub fn grid_step(&self) -> usize {
        (self.b / (100 * self.inv_p)).max(1)
    }

    /// Largest integer distance that refutes p-uniqueness (ed < pB).
    pub fn unique_fail_threshold(&self) -> usize {
        (self.b - 1) / self.inv_p
    }

    /// floor(pB / 2), the sampled uniqueness test's distance threshold.
    pub fn half_unique_threshold(&self) -> usize {
        self.b / (2 * self.inv_p)
    }

    /// max(1, floor(pB / 8)), the sampled uniqueness test's position grid.
    pub fn audit_grid(&self) -> usize {
        (self.b / (8 * self.inv_p)).max(1)
    }

    /// True when `ed * inv_p >= B`, i.e. ed >= pB.
    pub fn meets_unique_distance(&self, ed: usize) -> bool {
        ed * self.inv_p >= self.b
    }
}

/// x and y padded to a shared multiple of 6B and cut into blocks.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    x: Text,
    y: Text,
    b: usize,
    n_padded: usize,
    x_orig_len: usize,
    y_orig_len: usize,
}

impl BlockDecomposition {
    pub fn new(x: &Text, y: &Text, params: &PseudoParams) -> Self {
        let b = params.b();
        let longest = x.len().max(y.len()).max(1);
        let n_padded = longest.div_ceil(6 * b) * 6 * b;
        Self {
            x: x.padded(n_padded - x.len()),
            y: y.padded(n_padded - y.len()),
            b,
            n_padded,
            x_orig_len: x.len(),
            y_orig_len: y.len(),
        }
    }

    pub fn padded_len(&self) -> usize {
        self.n_padded
    }

    pub fn x_padded(&self) -> &Text {
        &self.x
    }

    pub fn y_padded(&self) -> &Text {
        &self.y
    }

    pub fn x_orig_len(&self) -> usize {
        self.x_orig_len
    }

    pub fn y_orig_len(&self) -> usize {
        self.y_orig_len
    }

    pub fn x_block_count(&self) -> usize {
        self.n_padded / (6 * self.b)
    }

    pub fn y_block_count(&self) -> usize {
        self.n_padded / (3 * self.b)
    }

    /// 1-based inclusive positions of x-block `i`.
    pub fn x_block_range(&self, i: usize) -> (usize, usize) {
        ((i - 1) * 6 * self.b + 1, i * 6 * self.b)
    }

    /// 1-based inclusive positions of y-block `j`.
    pub fn y_block_range(&self, j: usize) -> (usize, usize) {
        ((j - 1) * 3 * self.b + 1, j * 3 * self.b)
    }
}

/// Memoized partial/full edit matching over a decomposition.
pub struct EditMatcher<'a> {
    dec: &'a BlockDecomposition,
    params: &'a PseudoParams,
    partial_memo: HashMap<(u32, u32), bool>,
}

impl<'a> EditMatcher<'a> {
    pub fn new(dec: &'a BlockDecomposition, params: &'a PseudoParams) -> Self {
        Self {
            dec,
            params,
            partial_memo: HashMap::new(),
        }
    }

    /// Does some 6B-window starting in y-block j-1 on the offset grid
    /// come within the match radius of x-block i? False for j < 2.
    pub fn partial(&mut self, i: usize, j: usize, meter: &mut WorkMeter) -> bool {
        if j < 2 {
            return false;
        }
        let key = (i as u32, j as u32);
        if let Some(&hit) = self.partial_memo.get(&key) {
            return hit;
        }
        let dec = self.dec;
        let b6 = 6 * dec.b;
        let radius = self.params.match_radius();
        let step = self.params.grid_step();
        let (xb_lo, xb_hi) = dec.x_block_range(i);
        let block = dec.x.slice(xb_lo, xb_hi);
        let (r, _) = dec.y_block_range(j - 1);
        let windows = (3 * dec.b).div_ceil(step);
        let mut hit = false;
        for t in 0..windows {
            let s = r + t * step;
            if s + b6 - 1 > dec.n_padded {
                break;
            }
            let window = dec.y.slice(s, s + b6 - 1);
            if ed_bounded_slices(block, window, radius, meter).is_some() {
                hit = true;
                break;
            }
        }
        self.partial_memo.insert(key, hit);
        hit
    }

    /// Partial match with j but not with j-1.
    pub fn full(&mut self, i: usize, j: usize, meter: &mut WorkMeter) -> bool {
        self.partial(i, j, meter) && !self.partial(i, j - 1, meter)
    }
}

/// Expand block pairs into a letter-level indel script.
///
/// Every edge must connect a fully edit-matching pair. Candidate letter
/// edges connect each x-letter of a matched block to the equal y-letters
/// within 9B positions of the partner block; the optimal non-crossing
/// subset of those candidates becomes the script. Pad positions never
/// enter the edge set, so the script transforms the original strings.
pub fn recover_edits(
    dec: &BlockDecomposition,
    params: &PseudoParams,
    matcher: &mut EditMatcher,
    e: &BlockAlignment,
    meter: &mut WorkMeter,
) -> Result<EditScript> {
    let b = params.b();
    for pair in e.pairs() {
        if !matcher.full(pair.x, pair.y, meter) {
            return Err(Error::EdgeNotMatching {
                x_block: pair.x,
                y_block: pair.y,
            });
        }
    }
    let mut edges = Vec::new();
    for pair in e.pairs() {
        let (xb_lo, xb_hi) = dec.x_block_range(pair.x);
        let (yb_lo, yb_hi) = dec.y_block_range(pair.y);
        let win_lo = yb_lo.saturating_sub(9 * b).max(1);
        let win_hi = (yb_hi + 9 * b).min(dec.y_orig_len());
        let xb_hi = xb_hi.min(dec.x_orig_len());
        for r in xb_lo..=xb_hi {
            let xr = dec.x.sym(r);
            for s in win_lo..=win_hi {
                meter.charge(1);
                if dec.y.sym(s) == xr {
                    edges.push((r, s));
                }
            }
        }
    }
    let alignment = max_restricted_alignment(&EdgeSet::new(edges), meter);
    let x_orig = Text::from_slice(dec.x.slice(1, dec.x_orig_len()), dec.x.alphabet());
    let y_orig = Text::from_slice(dec.y.slice(1, dec.y_orig_len()), dec.y.alphabet());
    script_from_alignment(&x_orig, &y_orig, &alignment)
}

/// Result of one end-to-end approximation.
#[derive(Debug, Clone)]
pub struct ApproxOutcome {
    pub estimate: usize,
    pub script: EditScript,
    /// Which repetition produced the winning script; repetitions.len()
    /// means the trivial rewrite won.
    pub winner: usize,
    pub repetitions: usize,
}

/// Approximate ed(x, y) treating x as (p, B)-pseudorandom.
///
/// Runs the pipeline `repetitions` times on split randomness streams and
/// keeps the shortest script found, capped by the trivial rewrite of
/// length |x| + |y|. The returned script always applies, so the estimate
/// never undershoots the true distance.
pub fn approx_ed(
    x: &Text,
    y: &Text,
    params: &PseudoParams,
    rng: &mut Prng,
    repetitions: usize,
    meter: &mut WorkMeter,
) -> Result<ApproxOutcome> {
    let reps = repetitions.max(1);
    let dec = BlockDecomposition::new(x, y, params);
    let nx = dec.x_block_count();
    let ny = dec.y_block_count();

    let mut best = EditScript::trivial(x, y);
    let mut winner = reps;
    for rep in 0..reps {
        let mut rep_rng = rng.split();
        let mut matcher = EditMatcher::new(&dec, params);
        let block_pairs = {
            let mut scoped_meter = WorkMeter::new();
            let mut oracle =
                MatchOracle::new(nx, ny, |i, j| matcher.full(i, j, &mut scoped_meter));
            let pairs = solve_clean_alignment(&mut oracle, &mut rep_rng, 100);
            meter.absorb(&scoped_meter);
            pairs
        };
        let script = recover_edits(&dec, params, &mut matcher, &block_pairs, meter)?;
        let script = merge_adjacent_indels(&script);
        if script.len() < best.len() {
            best = script;
            winner = rep;
        }
    }
    debug_assert_eq!(
        apply_script(x, &best).expect("approximation scripts always apply"),
        *y
    );
    Ok(ApproxOutcome {
        estimate: best.len(),
        script: best,
        winner,
        repetitions: reps,
    })
}
