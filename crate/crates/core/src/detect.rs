//! Parameter-oblivious drivers.
//!
//! Neither driver knows a good block size in advance. Both race the
//! exact bounded search against a doubling search over block sizes
//! B_i = alpha * 2^i, where each level asks the sampled audit whether
//! the adversarial mass at (p = 2/alpha, B_i) is small enough to trust
//! the block pipeline. Races are scheduled by consumed work units in
//! fixed slices, never wall clock, so outcomes are reproducible.

use serde::{Deserialize, Serialize};

use crate::audit::{sampled_m_test, DEFAULT_SAMPLE_COEFF};
use crate::blocks::{approx_ed, PseudoParams};
use crate::distance::{ed_exact_with_script, BoundedSearch, SearchStep};
use crate::error::{Error, Result};
use crate::meter::WorkMeter;
use crate::rng::Prng;
use crate::script::EditScript;
use crate::text::Text;

/// Work-unit slice for round-robin racing.
pub const RACE_SLICE: u64 = 1 << 16;

/// Multiplier on the closing budget granted to the exact branch.
pub const DEFAULT_BUDGET_COEFF: f64 = 4.0;

fn validate_alpha(alpha: usize) -> Result<()> {
    if alpha < 2 || !alpha.is_power_of_two() {
        return Err(Error::InvalidParam(format!(
            "alpha must be a power of two >= 2, got {alpha}"
        )));
    }
    Ok(())
}

fn inv_p_for_alpha(alpha: usize) -> usize {
    (alpha / 2).max(1)
}

/// One audited level of the doubling search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelReport {
    pub b: usize,
    pub threshold: f64,
    pub accepted: bool,
    pub failures: usize,
    pub sample_size: usize,
}

/// Outcome of a detection or query run.
#[derive(Debug, Clone)]
pub struct DetectOutcome {
    pub estimate: usize,
    pub script: EditScript,
    /// True when the exact branch supplied the answer.
    pub exact: bool,
    pub detected_b: Option<usize>,
    pub levels: Vec<LevelReport>,
    /// No usable block size was accepted; the exact DP answered.
    pub fallback: bool,
}

/// Reusable preprocessing result for a source string.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceProfile {
    pub schema_version: u32,
    pub alpha: usize,
    pub inv_p_used: usize,
    pub detected_b: Option<usize>,
    pub levels: Vec<LevelReport>,
    pub seed: u64,
    pub x_len: usize,
    pub x_fingerprint: u64,
}

impl SourceProfile {
    pub fn matches(&self, x: &Text) -> bool {
        self.x_len == x.len() && self.x_fingerprint == x.fingerprint()
    }
}

/// Threshold for the single-shot doubling search at level B_i:
/// 2 n^{2/3} alpha^{2/3} (B_i + alpha^2)^{1/3}, clamped into (0, n].
fn single_shot_threshold(n: usize, alpha: usize, b: usize) -> f64 {
    let nf = n as f64;
    let t = 2.0 * nf.powf(2.0 / 3.0)
        * (alpha as f64).powf(2.0 / 3.0)
        * ((b + alpha * alpha) as f64).cbrt();
    t.min(nf).max(1.0)
}

/// Threshold for preprocessing: 2 sqrt(n (B_i + alpha^2)), clamped.
fn preprocess_threshold(n: usize, alpha: usize, b: usize) -> f64 {
    let t = 2.0 * ((n * (b + alpha * alpha)) as f64).sqrt();
    t.min(n as f64).max(1.0)
}

/// Closing window for the exact branch once a block size is accepted:
/// coeff * n^{4/3} (B_j + alpha^2)^{2/3} / alpha^{2/3}.
fn closing_budget(n: usize, alpha: usize, b: usize, coeff: f64) -> u64 {
    let nf = n as f64;
    (coeff * nf.powf(4.0 / 3.0) * ((b + alpha * alpha) as f64).powf(2.0 / 3.0)
        / (alpha as f64).powf(2.0 / 3.0)) as u64
}

/// Resumable doubling search over block sizes. Each `step` runs one
/// sampled audit level; levels are pre-seeded from split streams so the
/// interleaving with the racing partner cannot change the draws.
struct DoublingSearch<'a> {
    x: &'a Text,
    alpha: usize,
    next_b: usize,
    max_b: usize,
    rng: Prng,
    levels: Vec<LevelReport>,
    accepted: Option<usize>,
    exhausted: bool,
}

impl<'a> DoublingSearch<'a> {
    fn new(x: &'a Text, alpha: usize, rng: Prng) -> Self {
        Self {
            x,
            alpha,
            next_b: alpha,
            max_b: x.len() / 6,
            rng,
            levels: Vec::new(),
            accepted: None,
            exhausted: false,
        }
    }

    fn done(&self) -> bool {
        self.accepted.is_some() || self.exhausted
    }

    /// Run one level. Returns the accepted block size, if any.
    fn step(&mut self, meter: &mut WorkMeter) -> Result<Option<usize>> {
        if self.done() {
            return Ok(self.accepted);
        }
        if self.next_b > self.max_b || self.next_b == 0 {
            self.exhausted = true;
            return Ok(None);
        }
        let b = self.next_b;
        let params = PseudoParams::new(inv_p_for_alpha(self.alpha), b)?;
        let threshold = single_shot_threshold(self.x.len(), self.alpha, b);
        let mut level_rng = self.rng.split();
        let verdict = sampled_m_test(
            self.x,
            &params,
            threshold,
            &mut level_rng,
            DEFAULT_SAMPLE_COEFF,
            meter,
        )?;
        self.levels.push(LevelReport {
            b,
            threshold,
            accepted: verdict.verdict,
            failures: verdict.failures,
            sample_size: verdict.sample_size,
        });
        if verdict.verdict {
            self.accepted = Some(b);
            return Ok(Some(b));
        }
        self.next_b = b.saturating_mul(2);
        Ok(None)
    }
}

/// Single-shot O(alpha)-approximation without a known block size.
///
/// Races the exact bounded search against the doubling audit in
/// work-unit slices. If the exact branch reaches the corner first the
/// answer is exact. Once a block size B_j is accepted, the block
/// pipeline produces an estimate and the exact branch gets one closing
/// budget window to beat it. If no level accepts, the exact search runs
/// to completion (the string is not usably pseudorandom).
pub fn detect_single_shot(
    x: &Text,
    y: &Text,
    alpha: usize,
    rng: &mut Prng,
    budget_coeff: f64,
    meter: &mut WorkMeter,
) -> Result<DetectOutcome> {
    validate_alpha(alpha)?;
    let n = x.len().max(y.len()).max(2);
    let mut exact_branch = BoundedSearch::new(x, y);
    let mut doubling = DoublingSearch::new(x, alpha, rng.split());
    let mut approx_rng = rng.split();
    let mut audit_units: u64 = 0;

    let accepted_b = loop {
        if !doubling.done() && audit_units / RACE_SLICE < exact_branch.spent() / RACE_SLICE {
            let before = meter.units();
            let accepted = doubling.step(meter)?;
            audit_units += meter.units() - before;
            if let Some(b) = accepted {
                break Some(b);
            }
            continue;
        }
        match exact_branch.step(meter, None) {
            SearchStep::Finished(d) => {
                return Ok(DetectOutcome {
                    estimate: d,
                    script: exact_branch.script(),
                    exact: true,
                    detected_b: doubling.accepted,
                    levels: doubling.levels,
                    fallback: false,
                });
            }
            SearchStep::Advanced => {}
            SearchStep::BudgetExhausted => unreachable!("uncapped race branch"),
        }
        if doubling.exhausted {
            // Not usably pseudorandom at any level: finish exactly.
            loop {
                if let SearchStep::Finished(d) = exact_branch.step(meter, None) {
                    return Ok(DetectOutcome {
                        estimate: d,
                        script: exact_branch.script(),
                        exact: true,
                        detected_b: None,
                        levels: doubling.levels,
                        fallback: true,
                    });
                }
            }
        }
    };

    let b_j = accepted_b.expect("loop exits with an accepted level");
    let params = PseudoParams::new(inv_p_for_alpha(alpha), b_j)?;
    let reps = (n as f64).log2().ceil() as usize;
    let approx = approx_ed(x, y, &params, &mut approx_rng, reps, meter)?;

    // Closing window for the exact branch.
    let window = closing_budget(n, alpha, b_j, budget_coeff).max(exact_branch.spent());
    loop {
        match exact_branch.step(meter, Some(window)) {
            SearchStep::Finished(d) => {
                return Ok(DetectOutcome {
                    estimate: d,
                    script: exact_branch.script(),
                    exact: true,
                    detected_b: Some(b_j),
                    levels: doubling.levels,
                    fallback: false,
                });
            }
            SearchStep::Advanced => {}
            SearchStep::BudgetExhausted => {
                return Ok(DetectOutcome {
                    estimate: approx.estimate,
                    script: approx.script,
                    exact: false,
                    detected_b: Some(b_j),
                    levels: doubling.levels,
                    fallback: false,
                });
            }
        }
    }
}

/// Preprocess a source string: find the first block size whose sampled
/// audit accepts at p = 2/alpha. The profile alone is enough to answer
/// queries without re-detection.
pub fn preprocess_source(
    x: &Text,
    alpha: usize,
    seed: u64,
    meter: &mut WorkMeter,
) -> Result<SourceProfile> {
    validate_alpha(alpha)?;
    let n = x.len();
    let mut rng = Prng::from_seed(seed);
    let mut levels = Vec::new();
    let mut detected_b = None;
    let mut b = alpha;
    while b <= n / 6 {
        let params = PseudoParams::new(inv_p_for_alpha(alpha), b)?;
        let threshold = preprocess_threshold(n, alpha, b);
        let mut level_rng = rng.split();
        let verdict = sampled_m_test(
            x,
            &params,
            threshold,
            &mut level_rng,
            DEFAULT_SAMPLE_COEFF,
            meter,
        )?;
        levels.push(LevelReport {
            b,
            threshold,
            accepted: verdict.verdict,
            failures: verdict.failures,
            sample_size: verdict.sample_size,
        });
        if verdict.verdict {
            detected_b = Some(b);
            break;
        }
        b = b.saturating_mul(2);
    }
    Ok(SourceProfile {
        schema_version: 1,
        alpha,
        inv_p_used: inv_p_for_alpha(alpha),
        detected_b,
        levels,
        seed,
        x_len: x.len(),
        x_fingerprint: x.fingerprint(),
    })
}

/// Answer one query against a preprocessed source string.
///
/// The exact bounded search gets a budget of coeff * n * B_j units; if
/// it cannot finish inside that, the block pipeline answers.
pub fn query_source(
    profile: &SourceProfile,
    x: &Text,
    y: &Text,
    rng: &mut Prng,
    budget_coeff: f64,
    meter: &mut WorkMeter,
) -> Result<DetectOutcome> {
    if !profile.matches(x) {
        return Err(Error::ProfileMismatch(format!(
            "profile was built for a string of length {} with fingerprint {:#018x}",
            profile.x_len, profile.x_fingerprint
        )));
    }
    let n = x.len().max(y.len()).max(2);
    let Some(b_j) = profile.detected_b else {
        // Preprocessing found no usable level; answer exactly.
        let (d, script) = ed_exact_with_script(x, y, meter);
        return Ok(DetectOutcome {
            estimate: d,
            script,
            exact: true,
            detected_b: None,
            levels: profile.levels.clone(),
            fallback: true,
        });
    };
    let budget = (budget_coeff * (n as f64) * (b_j as f64)) as u64;
    let mut search = BoundedSearch::new(x, y);
    loop {
        match search.step(meter, Some(budget)) {
            SearchStep::Finished(d) => {
                return Ok(DetectOutcome {
                    estimate: d,
                    script: search.script(),
                    exact: true,
                    detected_b: Some(b_j),
                    levels: profile.levels.clone(),
                    fallback: false,
                });
            }
            SearchStep::Advanced => {}
            SearchStep::BudgetExhausted => break,
        }
    }
    let params = PseudoParams::new(profile.inv_p_used, b_j)?;
    let reps = (n as f64).log2().ceil() as usize;
    let approx = approx_ed(x, y, &params, rng, reps, meter)?;
    Ok(DetectOutcome {
        estimate: approx.estimate,
        script: approx.script,
        exact: false,
        detected_b: Some(b_j),
        levels: profile.levels.clone(),
        fallback: false,
    })
}
