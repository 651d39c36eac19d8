//! Exact and bounded edit distance.
//!
//! Two engines live here. `ed_exact` is the textbook quadratic DP with an
//! optional traceback. The bounded engine walks furthest-reaching points
//! along diagonals, one edit level at a time, so that deciding
//! `ed(u, v) <= k` costs O(|u| + |v| + k^2) comparisons on typical inputs
//! instead of a full band sweep. The level-at-a-time structure is also
//! what lets budgeted callers pause and resume the search inside a
//! deterministic work-unit race.

use crate::error::{Error, Result};
use crate::meter::WorkMeter;
use crate::script::{EditOp, EditScript};
use crate::text::{Symbol, Text};

const UNREACHED: i64 = -1;

/// Full DP, distance only. Charges one unit per cell.
pub fn ed_exact(u: &Text, v: &Text, meter: &mut WorkMeter) -> usize {
    let a = u.symbols();
    let b = v.symbols();
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return n + m;
    }
    let mut row: Vec<u32> = (0..=m as u32).collect();
    for i in 1..=n {
        let mut diag = row[0];
        row[0] = i as u32;
        for j in 1..=m {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            let next = (diag + cost).min(row[j] + 1).min(row[j - 1] + 1);
            diag = row[j];
            row[j] = next;
        }
        meter.charge(m as u64);
    }
    row[m] as usize
}

/// Full DP with traceback. Memory is O(|u| * |v|); guard at call sites.
pub fn ed_exact_with_script(u: &Text, v: &Text, meter: &mut WorkMeter) -> (usize, EditScript) {
    let a = u.symbols();
    let b = v.symbols();
    let (n, m) = (a.len(), b.len());
    // Directions: 0 = diag, 1 = up (delete), 2 = left (insert).
    let mut dir = vec![0u8; (n + 1) * (m + 1)];
    let mut row: Vec<u32> = (0..=m as u32).collect();
    for j in 1..=m {
        dir[j] = 2;
    }
    for i in 1..=n {
        let mut diag = row[0];
        row[0] = i as u32;
        dir[i * (m + 1)] = 1;
        for j in 1..=m {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            let d_diag = diag + cost;
            let d_up = row[j] + 1;
            let d_left = row[j - 1] + 1;
            let (best, dd) = if d_diag <= d_up && d_diag <= d_left {
                (d_diag, 0)
            } else if d_up <= d_left {
                (d_up, 1)
            } else {
                (d_left, 2)
            };
            dir[i * (m + 1) + j] = dd;
            diag = row[j];
            row[j] = best;
        }
        meter.charge(m as u64);
    }
    let dist = row[m] as usize;

    let mut ops = Vec::with_capacity(dist);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match dir[i * (m + 1) + j] {
            0 => {
                if a[i - 1] != b[j - 1] {
                    ops.push(EditOp::Substitute {
                        pos: i,
                        symbol: b[j - 1],
                    });
                }
                i -= 1;
                j -= 1;
            }
            1 => {
                ops.push(EditOp::Delete { pos: i });
                i -= 1;
            }
            _ => {
                ops.push(EditOp::Insert {
                    pos: i + 1,
                    symbol: b[j - 1],
                });
                j -= 1;
            }
        }
    }
    debug_assert_eq!(ops.len(), dist);
    (dist, EditScript::new(ops))
}

/// Outcome of advancing the bounded search by one edit level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStep {
    Finished(usize),
    Advanced,
    BudgetExhausted,
}

/// Resumable furthest-reaching-diagonal search.
///
/// Level `d` records, for each diagonal `e = i - j`, the largest prefix
/// position `i` of `u` reachable with at most `d` edits. Matches are
/// consumed by sliding along the diagonal, one charged comparison per
/// symbol. Finishing level `d` with the corner reached means
/// `ed(u, v) = d` exactly.
pub struct BoundedSearch<'a> {
    u: &'a [Symbol],
    v: &'a [Symbol],
    levels: Vec<Vec<i64>>,
    next_d: usize,
    result: Option<usize>,
    aborted: bool,
    spent: u64,
}

impl<'a> BoundedSearch<'a> {
    pub fn new(u: &'a Text, v: &'a Text) -> Self {
        Self::over_slices(u.symbols(), v.symbols())
    }

    pub fn over_slices(u: &'a [Symbol], v: &'a [Symbol]) -> Self {
        Self {
            u,
            v,
            levels: Vec::new(),
            next_d: 0,
            result: None,
            aborted: false,
            spent: 0,
        }
    }

    pub fn result(&self) -> Option<usize> {
        self.result
    }

    /// Units this search has charged so far.
    pub fn spent(&self) -> u64 {
        self.spent
    }

    /// Edit levels completed so far.
    pub fn levels_done(&self) -> usize {
        self.next_d
    }

    /// Advance one edit level (level 0 first). `cap` bounds total spent
    /// units; crossing it abandons the search permanently.
    pub fn step(&mut self, meter: &mut WorkMeter, cap: Option<u64>) -> SearchStep {
        if let Some(d) = self.result {
            return SearchStep::Finished(d);
        }
        if self.aborted {
            return SearchStep::BudgetExhausted;
        }
        let (u, v) = (self.u, self.v);
        let n = u.len() as i64;
        let m = v.len() as i64;
        let d = self.next_d as i64;
        let lo = -(d.min(m));
        let hi = d.min(n);
        let mut level = vec![UNREACHED; (hi - lo + 1) as usize];
        let mut spent = self.spent;
        let mut exhausted = false;

        // Slide along diagonal `e` from `i`, one charged comparison per
        // symbol. Stops if the next comparison would cross the cap.
        let slide = |e: i64, mut i: i64, spent: &mut u64, meter: &mut WorkMeter| -> Option<i64> {
            while i < n && i - e < m {
                if let Some(c) = cap {
                    if *spent >= c {
                        return None;
                    }
                }
                *spent += 1;
                meter.charge(1);
                if u[i as usize] == v[(i - e) as usize] {
                    i += 1;
                } else {
                    break;
                }
            }
            Some(i)
        };

        if d == 0 {
            match slide(0, 0, &mut spent, meter) {
                Some(i) => level[(0 - lo) as usize] = i,
                None => exhausted = true,
            }
        } else {
            let prev = &self.levels[self.next_d - 1];
            let plo = -((d - 1).min(m));
            let phi = (d - 1).min(n);
            let fetch = |e: i64| -> i64 {
                if e < plo || e > phi {
                    UNREACHED
                } else {
                    prev[(e - plo) as usize]
                }
            };
            for e in lo..=hi {
                spent += 1;
                meter.charge(1);
                let mut best = fetch(e); // carry: reachable stays reachable
                let del = fetch(e - 1);
                if del != UNREACHED && del + 1 <= n && del - (e - 1) <= m {
                    best = best.max(del + 1);
                }
                let sub = fetch(e);
                if sub != UNREACHED && sub + 1 <= n && sub - e + 1 <= m {
                    best = best.max(sub + 1);
                }
                let ins = fetch(e + 1);
                if ins != UNREACHED && ins - e <= m && ins <= n {
                    best = best.max(ins);
                }
                if best == UNREACHED {
                    continue;
                }
                best = best.min(n).min(m + e);
                match slide(e, best, &mut spent, meter) {
                    Some(i) => level[(e - lo) as usize] = i,
                    None => {
                        exhausted = true;
                        break;
                    }
                }
            }
        }
        self.spent = spent;
        if exhausted {
            self.aborted = true;
            return SearchStep::BudgetExhausted;
        }
        let target = n - m;
        let done = target >= lo && target <= hi && level[(target - lo) as usize] >= n;
        self.levels.push(level);
        self.next_d += 1;
        if done {
            self.result = Some(d as usize);
            return SearchStep::Finished(d as usize);
        }
        SearchStep::Advanced
    }

    /// Reconstruct an optimal script after the search finished.
    pub fn script(&self) -> EditScript {
        let d_final = self.result.expect("script requires a finished search");
        let n = self.u.len() as i64;
        let m = self.v.len() as i64;
        let value = |d: i64, e: i64| -> i64 {
            if d < 0 {
                return UNREACHED;
            }
            let lo = -(d.min(m));
            let hi = d.min(n);
            if e < lo || e > hi {
                UNREACHED
            } else {
                self.levels[d as usize][(e - lo) as usize]
            }
        };
        let mut ops = Vec::new();
        let mut e = n - m;
        let mut d = d_final as i64;
        while d > 0 {
            // Matched symbols along the slide need no ops; the pre-slide
            // entry point is whichever predecessor candidate reaches
            // furthest, and the op happened right at that entry.
            let stay = value(d - 1, e);
            let del = value(d - 1, e - 1);
            let sub = stay;
            let ins = value(d - 1, e + 1);
            let del_i = if del != UNREACHED && del + 1 <= n && del - (e - 1) <= m {
                del + 1
            } else {
                UNREACHED
            };
            let sub_i = if sub != UNREACHED && sub + 1 <= n && sub - e + 1 <= m {
                sub + 1
            } else {
                UNREACHED
            };
            let ins_i = if ins != UNREACHED && ins - e <= m && ins <= n {
                ins
            } else {
                UNREACHED
            };
            // Pure carry, no edit spent at this level.
            if stay != UNREACHED && stay >= del_i.max(sub_i).max(ins_i) {
                d -= 1;
                continue;
            }
            if sub_i >= del_i && sub_i >= ins_i {
                ops.push(EditOp::Substitute {
                    pos: (sub + 1) as usize,
                    symbol: self.v[(sub - e) as usize],
                });
                d -= 1;
            } else if del_i >= ins_i {
                ops.push(EditOp::Delete {
                    pos: (del + 1) as usize,
                });
                d -= 1;
                e -= 1;
            } else {
                ops.push(EditOp::Insert {
                    pos: (ins + 1) as usize,
                    symbol: self.v[(ins - e - 1) as usize],
                });
                d -= 1;
                e += 1;
            }
        }
        EditScript::new(ops)
    }
}

/// Does `ed(u, v) <= k`? Returns the exact distance when so.
///
/// Charges O(|u| + |v| + k^2) units on typical inputs.
pub fn ed_bounded(u: &Text, v: &Text, k: usize, meter: &mut WorkMeter) -> Option<usize> {
    ed_bounded_slices(u.symbols(), v.symbols(), k, meter)
}

pub fn ed_bounded_slices(
    u: &[Symbol],
    v: &[Symbol],
    k: usize,
    meter: &mut WorkMeter,
) -> Option<usize> {
    let diff = u.len().abs_diff(v.len());
    meter.charge(1);
    if diff > k {
        return None;
    }
    let mut search = BoundedSearch::over_slices(u, v);
    loop {
        if search.levels_done() > k {
            return None;
        }
        match search.step(meter, None) {
            SearchStep::Finished(d) => return if d <= k { Some(d) } else { None },
            SearchStep::Advanced => {}
            SearchStep::BudgetExhausted => unreachable!("uncapped search"),
        }
    }
}

/// Run the bounded search under a unit budget. Completes with the exact
/// distance and script, or returns None once the budget would be crossed.
/// Deterministic for fixed inputs and budget.
pub fn ed_bounded_budgeted(
    u: &Text,
    v: &Text,
    budget: u64,
    meter: &mut WorkMeter,
) -> Option<(usize, EditScript)> {
    let mut search = BoundedSearch::new(u, v);
    loop {
        match search.step(meter, Some(budget)) {
            SearchStep::Finished(d) => return Some((d, search.script())),
            SearchStep::Advanced => {}
            SearchStep::BudgetExhausted => return None,
        }
    }
}

/// Guard for quadratic exact DP invocations coming from interfaces that
/// accept arbitrary inputs.
pub fn exact_guard(n: usize, m: usize, limit_cells: usize, force: bool) -> Result<()> {
    let cells = (n + 1).saturating_mul(m + 1);
    if !force && cells > limit_cells {
        return Err(Error::SizeGuard {
            what: "exact edit distance DP",
            limit: limit_cells,
            actual: cells,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;
    use crate::script::apply_script;

    fn t(codes: &[Symbol]) -> Text {
        Text::from_codes(codes.to_vec(), 26).unwrap()
    }

    fn word(s: &str) -> Text {
        let codes: Vec<Symbol> = s.bytes().map(|b| (b - b'a') as Symbol).collect();
        Text::from_codes(codes, 26).unwrap()
    }

    /// Independent oracle: plain recursion with memoization, structurally
    /// unrelated to either production engine.
    fn ed_recursive_oracle(u: &[Symbol], v: &[Symbol]) -> usize {
        fn go(
            u: &[Symbol],
            v: &[Symbol],
            i: usize,
            j: usize,
            memo: &mut std::collections::HashMap<(usize, usize), usize>,
        ) -> usize {
            if i == u.len() {
                return v.len() - j;
            }
            if j == v.len() {
                return u.len() - i;
            }
            if let Some(&d) = memo.get(&(i, j)) {
                return d;
            }
            let d = if u[i] == v[j] {
                go(u, v, i + 1, j + 1, memo)
            } else {
                let sub = go(u, v, i + 1, j + 1, memo);
                let del = go(u, v, i + 1, j, memo);
                let ins = go(u, v, i, j + 1, memo);
                1 + sub.min(del).min(ins)
            };
            memo.insert((i, j), d);
            d
        }
        go(u, v, 0, 0, &mut std::collections::HashMap::new())
    }

    fn random_text(rng: &mut Prng, len: usize, alphabet: u16) -> Text {
        let codes: Vec<Symbol> = (0..len).map(|_| rng.index(alphabet as usize) as Symbol).collect();
        Text::from_codes(codes, alphabet).unwrap()
    }

    #[test]
    fn identity_and_empty() {
        let mut m = WorkMeter::new();
        assert_eq!(ed_exact(&word("abc"), &word("abc"), &mut m), 0);
        assert_eq!(ed_exact(&Text::empty(26), &word("abc"), &mut m), 3);
    }

    #[test]
    fn kitten_sitting_verified_against_oracle() {
        let u = word("kitten");
        let v = word("sitting");
        assert_eq!(ed_recursive_oracle(u.symbols(), v.symbols()), 3);
        let mut m = WorkMeter::new();
        assert_eq!(ed_exact(&u, &v, &mut m), 3);
        let (d, script) = ed_exact_with_script(&u, &v, &mut m);
        assert_eq!(d, 3);
        assert_eq!(apply_script(&u, &script).unwrap(), v);
    }

    #[test]
    fn exact_matches_oracle_on_random_pairs() {
        let mut rng = Prng::from_seed(101);
        let mut m = WorkMeter::new();
        for _ in 0..120 {
            let n = rng.index(18);
            let k = rng.index(18);
            let u = random_text(&mut rng, n, 3);
            let v = random_text(&mut rng, k, 3);
            let expect = ed_recursive_oracle(u.symbols(), v.symbols());
            assert_eq!(ed_exact(&u, &v, &mut m), expect);
            let (d, script) = ed_exact_with_script(&u, &v, &mut m);
            assert_eq!(d, expect);
            assert_eq!(apply_script(&u, &script).unwrap(), v, "script must rebuild v");
        }
    }

    #[test]
    fn bounded_zero_threshold() {
        let mut m = WorkMeter::new();
        assert_eq!(ed_bounded(&word("abc"), &word("abd"), 0, &mut m), None);
        assert_eq!(ed_bounded(&word("abc"), &word("abc"), 0, &mut m), Some(0));
    }

    #[test]
    fn bounded_agrees_with_exact_on_random_pairs() {
        let mut rng = Prng::from_seed(77);
        let mut m = WorkMeter::new();
        for _ in 0..500 {
            let n = rng.index(40);
            let l = rng.index(40);
            let u = random_text(&mut rng, n, 4);
            let v = random_text(&mut rng, l, 4);
            let k = rng.index(12);
            let exact = ed_exact(&u, &v, &mut m);
            match ed_bounded(&u, &v, k, &mut m) {
                Some(d) => {
                    assert_eq!(d, exact);
                    assert!(d <= k);
                }
                None => assert!(exact > k),
            }
        }
    }

    #[test]
    fn bounded_script_roundtrips() {
        let mut rng = Prng::from_seed(3);
        let mut m = WorkMeter::new();
        for _ in 0..100 {
            let n = rng.index(30);
            let l = rng.index(30);
            let u = random_text(&mut rng, n, 4);
            let v = random_text(&mut rng, l, 4);
            let (d, script) = ed_bounded_budgeted(&u, &v, u64::MAX, &mut m).unwrap();
            assert_eq!(d, ed_exact(&u, &v, &mut m));
            assert_eq!(script.len(), d, "bounded scripts are optimal");
            assert_eq!(apply_script(&u, &script).unwrap(), v);
        }
    }

    #[test]
    fn budget_respected_on_equal_strings() {
        let mut rng = Prng::from_seed(9);
        let x = random_text(&mut rng, 64, 4);
        let mut m = WorkMeter::new();
        // The equality scan itself costs |x| units.
        assert!(ed_bounded_budgeted(&x, &x, 63, &mut m).is_none());
        let got = ed_bounded_budgeted(&x, &x, 64, &mut m);
        assert_eq!(got.map(|(d, s)| (d, s.len())), Some((0, 0)));
        let empty = Text::empty(4);
        assert!(ed_bounded_budgeted(&empty, &empty, 0, &mut m).is_some());
    }

    #[test]
    fn budget_gives_up_on_distant_pair() {
        let mut rng = Prng::from_seed(10);
        let n = 128;
        let x = random_text(&mut rng, n, 4);
        let y = random_text(&mut rng, n, 4); // ed ~ n/2
        let mut m = WorkMeter::new();
        assert!(ed_bounded_budgeted(&x, &y, n as u64, &mut m).is_none());
    }

    #[test]
    fn budget_suffices_for_tiny_distance() {
        let mut rng = Prng::from_seed(11);
        let n = 256;
        let x = random_text(&mut rng, n, 4);
        let mut codes = x.symbols().to_vec();
        codes[10] = (codes[10] + 1) % 4;
        codes[200] = (codes[200] + 1) % 4;
        let y = Text::from_codes(codes, 4).unwrap();
        let mut m = WorkMeter::new();
        let got = ed_bounded_budgeted(&x, &y, 100 * n as u64, &mut m);
        assert_eq!(got.as_ref().map(|(d, _)| *d), Some(2));
        let (_, script) = got.unwrap();
        assert_eq!(apply_script(&x, &script).unwrap(), y);
    }

    #[test]
    fn bounded_work_is_near_linear_plus_k_squared() {
        let mut rng = Prng::from_seed(42);
        for &(n, k) in &[(64usize, 4usize), (256, 4), (1024, 4), (1024, 16), (4096, 8)] {
            let u = random_text(&mut rng, n, 4);
            let v = random_text(&mut rng, n, 4);
            let mut m = WorkMeter::new();
            let _ = ed_bounded(&u, &v, k, &mut m);
            let bound = 8 * (2 * n + k * k + 1) as u64;
            assert!(
                m.units() <= bound,
                "n={n} k={k}: {} units > {bound}",
                m.units()
            );
        }
    }
}
