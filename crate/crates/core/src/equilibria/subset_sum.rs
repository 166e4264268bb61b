//! Pseudo-polynomial subset-sum machinery behind the subset-quantified
//! equilibrium checks.
//!
//! Minimal coverage of a retained or migrating set depends on its smallest
//! member as well as its total, so the searches here are stratified by the
//! candidate minimum: for a minimum value `x`, one item of size `x` is forced
//! in and only items of size `>= x` may join it.

use crate::model::{Instance, Size};

const UNREACHED: usize = usize::MAX;
const ROOT: usize = usize::MAX - 1;

/// Every achievable subset sum of an item multiset, each with one witness.
#[derive(Debug, Clone)]
pub struct SumTable {
    /// For each sum, the item whose insertion first reached it.
    via: Vec<usize>,
    sizes: Vec<Size>,
}

impl SumTable {
    pub fn max_sum(&self) -> Size {
        (self.via.len() - 1) as Size
    }

    pub fn is_reachable(&self, sum: Size) -> bool {
        (sum as usize) < self.via.len() && self.via[sum as usize] != UNREACHED
    }

    pub fn reachable_sums(&self) -> impl Iterator<Item = Size> + '_ {
        self.via
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNREACHED)
            .map(|(t, _)| t as Size)
    }

    /// A subset of the input items summing to `sum`, sorted ascending.
    pub fn witness(&self, sum: Size) -> Option<Vec<usize>> {
        if !self.is_reachable(sum) {
            return None;
        }
        let mut t = sum as usize;
        let mut out = Vec::new();
        while self.via[t] != ROOT {
            let item = self.via[t];
            out.push(item);
            t -= self.sizes[item] as usize;
        }
        out.sort_unstable();
        Some(out)
    }
}

/// Standard 0/1 subset-sum table over `items`, `O(|items| · Σa)`.
pub fn subset_sums(items: &[usize], inst: &Instance) -> SumTable {
    let total = inst.sum_of(items) as usize;
    let mut via = vec![UNREACHED; total + 1];
    via[0] = ROOT;
    let mut high = 0usize;
    for &item in items {
        let a = inst.size(item) as usize;
        for t in (a..=high + a).rev() {
            if via[t] == UNREACHED && via[t - a] != UNREACHED {
                // first reach: t - a was built from earlier items only
                via[t] = item;
            }
        }
        high += a;
    }
    SumTable {
        via,
        sizes: inst.sizes().to_vec(),
    }
}

/// Least achievable subset sum `>= threshold`, with a witness.
pub fn min_subset_at_least(
    items: &[usize],
    threshold: Size,
    inst: &Instance,
) -> Option<(Size, Vec<usize>)> {
    let table = subset_sums(items, inst);
    (threshold..=table.max_sum())
        .find(|&t| table.is_reachable(t))
        .map(|t| (t, table.witness(t).expect("reachable")))
}

/// Reachability of sums `0..=cap` over `sizes`.
fn reach(sizes: impl IntoIterator<Item = Size>, cap: usize) -> Vec<bool> {
    let mut r = vec![false; cap + 1];
    r[0] = true;
    let mut high = 0usize;
    for a in sizes {
        let a = a as usize;
        if a > cap {
            continue;
        }
        let top = (high + a).min(cap);
        for t in (a..=top).rev() {
            if r[t - a] {
                r[t] = true;
            }
        }
        high = top;
    }
    r
}

/// Admissible totals for a chosen set `S`, as a function of its smallest size:
/// `lo <= s(S) < upper(min(S))`. The empty set is evaluated with `Size::MAX`
/// as its minimum.
pub(crate) trait Window {
    fn lo(&self) -> Size;
    fn upper(&self, min: Size) -> Size;

    fn admits(&self, sum: Size, min: Size) -> bool {
        sum >= self.lo() && sum < self.upper(min)
    }
}

/// Per-pool reachability of `s(S)` for every possible minimum of `S`.
pub(crate) struct StratifiedSums {
    /// `(x, prefix)` where `prefix[k]` counts reachable totals `< k` among
    /// sets whose minimum size is exactly `x`.
    classes: Vec<(Size, Vec<u32>)>,
    total: Size,
}

impl StratifiedSums {
    pub(crate) fn new(pool: &[usize], inst: &Instance) -> Self {
        let total = inst.sum_of(pool);
        let mut values: Vec<Size> = pool.iter().map(|&j| inst.size(j)).collect();
        values.sort_unstable();
        values.dedup();
        let classes = values
            .into_iter()
            .map(|x| {
                let mut skipped = false;
                let rest = pool.iter().map(|&j| inst.size(j)).filter(|&a| {
                    if a == x && !skipped {
                        skipped = true;
                        return false;
                    }
                    a >= x
                });
                let r = reach(rest, (total - x) as usize);
                let mut prefix = Vec::with_capacity(total as usize + 2);
                let mut acc = 0u32;
                for s in 0..=total {
                    prefix.push(acc);
                    if s >= x && r[(s - x) as usize] {
                        acc += 1;
                    }
                }
                prefix.push(acc);
                (x, prefix)
            })
            .collect();
        Self { classes, total }
    }

    /// Whether some non-empty `S` of the pool has an admissible total.
    pub(crate) fn any(&self, window: &impl Window) -> bool {
        let lo = window.lo();
        self.classes.iter().any(|(x, prefix)| {
            let hi = window.upper(*x).min(self.total + 1);
            lo < hi && prefix[hi as usize] > prefix[lo as usize]
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    Free,
    In,
    Out,
}

/// Whether some `S` with `In ⊆ S ⊆ pool \ Out` has an admissible total.
pub(crate) fn feasible(pool: &[usize], slots: &[Slot], inst: &Instance, window: &impl Window) -> bool {
    let mut forced_sum = 0;
    let mut forced_min = Size::MAX;
    let mut free = Vec::new();
    for (&j, &slot) in pool.iter().zip(slots) {
        match slot {
            Slot::In => {
                forced_sum += inst.size(j);
                forced_min = forced_min.min(inst.size(j));
            }
            Slot::Free => free.push(inst.size(j)),
            Slot::Out => {}
        }
    }
    let lo = window.lo();
    let check = |base: Size, min: Size, rest: &mut dyn Iterator<Item = Size>| {
        let hi = window.upper(min);
        if hi <= base || hi <= lo {
            return false;
        }
        let span = (hi - 1 - base) as usize;
        let r = reach(rest, span);
        let start = lo.saturating_sub(base) as usize;
        r.iter().skip(start).any(|&b| b)
    };
    // the forced minimum stays the minimum
    if forced_min == Size::MAX {
        if window.admits(0, Size::MAX) {
            return true;
        }
    } else if check(
        forced_sum,
        forced_min,
        &mut free.iter().copied().filter(|&a| a >= forced_min),
    ) {
        return true;
    }
    // a free item of smaller size becomes the minimum
    let mut values: Vec<Size> = free.iter().copied().filter(|&a| a < forced_min).collect();
    values.sort_unstable();
    values.dedup();
    values.into_iter().any(|x| {
        let mut skipped = false;
        let mut rest = free.iter().copied().filter(|&a| {
            if a == x && !skipped {
                skipped = true;
                return false;
            }
            a >= x
        });
        check(forced_sum + x, x, &mut rest)
    })
}

/// Which list the lexicographic minimum is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Listed {
    /// The chosen set `S` itself.
    Chosen,
    /// The pool items left out of `S`.
    Rejected,
}

/// Lexicographically smallest listed set (sorted item indices, a prefix
/// ranking before its extensions) over all admissible choices of `S`.
/// `pool` must be sorted ascending.
pub(crate) fn lex_min(
    pool: &[usize],
    inst: &Instance,
    window: &impl Window,
    listed: Listed,
) -> Option<Vec<usize>> {
    let (mark, unmark) = match listed {
        Listed::Chosen => (Slot::In, Slot::Out),
        Listed::Rejected => (Slot::Out, Slot::In),
    };
    let mut slots = vec![Slot::Free; pool.len()];
    if !feasible(pool, &slots, inst, window) {
        return None;
    }
    let mut next = 0;
    loop {
        // the current prefix alone, with everything after it unlisted
        let mut closed = slots.clone();
        for s in closed.iter_mut().skip(next) {
            *s = unmark;
        }
        if feasible(pool, &closed, inst, window) {
            return Some(
                pool.iter()
                    .zip(&closed)
                    .filter(|(_, &s)| s == mark)
                    .map(|(&j, _)| j)
                    .collect(),
            );
        }
        let (pos, trial) = (next..pool.len()).find_map(|pos| {
            let mut trial = slots.clone();
            for s in &mut trial[next..pos] {
                *s = unmark;
            }
            trial[pos] = mark;
            feasible(pool, &trial, inst, window).then_some((pos, trial))
        })?;
        slots = trial;
        next = pos + 1;
    }
}
