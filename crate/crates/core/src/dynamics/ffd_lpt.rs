use crate::equilibria::BinTarget;
use crate::model::{check_reasonable, largest_position, shrink_to_minimal, smallest_position, Instance, Partition};
use crate::potential::covered_sizes;

use super::{ffd_items, DynamicsError, MigrationTrace, Step, StepKind};

/// Working state: covered bins in a stable order plus the uncovered bin.
struct State<'a> {
    inst: &'a Instance,
    covered: Vec<Vec<usize>>,
    tail: Vec<usize>,
    trace: MigrationTrace,
}

impl State<'_> {
    fn record(&mut self, kind: StepKind, movers: Vec<usize>, source_bin: Option<usize>, target_bin: BinTarget) {
        let mut all = self.covered.clone();
        all.push(self.tail.clone());
        let potential_after = covered_sizes(&all, self.inst);
        self.trace.push(Step {
            kind,
            movers,
            source_bin,
            target_bin,
            fired_set: Vec::new(),
            potential_after,
        });
    }

    /// First-fit decreasing over `pool` plus the uncovered bin; covered
    /// results are appended, the leftover becomes the new uncovered bin.
    fn regroup(&mut self, mut pool: Vec<usize>) {
        pool.append(&mut self.tail);
        if pool.is_empty() {
            return;
        }
        let mut bins = ffd_items(&pool, self.inst);
        if let Some(tail) = bins.pop_if(|b| !self.inst.is_covered(b)) {
            self.tail = tail;
        }
        self.covered.extend(bins);
        self.record(StepKind::Regroup, pool, None, BinTarget::New);
    }

    /// `(bin, position)` of the smallest covered item, lowest index on ties.
    fn smallest_covered(&self) -> Option<(usize, usize)> {
        self.covered
            .iter()
            .enumerate()
            .filter_map(|(k, bin)| smallest_position(bin, self.inst).map(|pos| (k, pos)))
            .min_by_key(|&(k, pos)| {
                let j = self.covered[k][pos];
                (self.inst.size(j), j)
            })
    }
}

/// Converts a reasonable partition into an NE without lowering welfare.
///
/// 1. Shrink every covered bin to minimal by taking out smallest items.
/// 2. Run first-fit decreasing over the removed items and the uncovered bin.
/// 3. While the largest uncovered item beats the smallest covered item, swap
///    them, re-shrink the receiving bin and re-run first-fit decreasing on the
///    removed items together with the uncovered bin.
/// 4. Hand the remaining uncovered items, largest first, to the least loaded
///    covered bin (lowest index on ties).
pub fn ffd_lpt(partition: &Partition, inst: &Instance) -> Result<(Partition, MigrationTrace), DynamicsError> {
    check_reasonable(partition, inst)?;
    let mut state = State {
        inst,
        covered: Vec::new(),
        tail: Vec::new(),
        trace: MigrationTrace::new(inst.len()),
    };

    let mut removed = Vec::new();
    for (i, bin) in partition.bins().iter().enumerate() {
        let mut bin = bin.clone();
        if inst.is_covered(&bin) {
            let out = shrink_to_minimal(&mut bin, inst);
            state.covered.push(bin);
            if !out.is_empty() {
                state.record(StepKind::Shrink, out.clone(), Some(i), BinTarget::New);
            }
            removed.extend(out);
        } else {
            state.tail = bin;
        }
    }
    state.regroup(removed);

    while let (Some(big_pos), Some((k, small_pos))) = (largest_position(&state.tail, inst), state.smallest_covered()) {
        let big = state.tail[big_pos];
        let small = state.covered[k][small_pos];
        if inst.size(big) <= inst.size(small) {
            break;
        }
        state.tail[big_pos] = small;
        state.covered[k][small_pos] = big;
        state.record(StepKind::Exchange, vec![big, small], Some(k), BinTarget::Existing(k));
        let out = shrink_to_minimal(&mut state.covered[k], inst);
        state.regroup(out);
    }

    if !state.covered.is_empty() {
        let mut loads: Vec<_> = state.covered.iter().map(|b| inst.sum_of(b)).collect();
        for j in inst.decreasing_order(&std::mem::take(&mut state.tail)) {
            let k = (0..loads.len()).min_by_key(|&k| (loads[k], k)).expect("covered bins exist");
            loads[k] += inst.size(j);
            state.covered[k].push(j);
            state.record(StepKind::Place, vec![j], None, BinTarget::Existing(k));
        }
    }

    let State {
        mut covered,
        tail,
        trace,
        ..
    } = state;
    covered.push(tail);
    Ok((Partition::from_bins(covered, inst.len()), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::verify_ne;
    use crate::generators::{gen_random, random_partition};
    use crate::model::{canonicalize, social_welfare, ModelError, Size};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inst(sizes: &[Size], b: Size) -> Instance {
        Instance::new(sizes.to_vec(), b).unwrap()
    }

    #[test]
    fn shrinks_and_regroups() {
        let i = inst(&[5, 4, 3, 2, 1], 6);
        let start = Partition::new(vec![vec![0, 1, 2], vec![3, 4]], 5).unwrap();
        assert_eq!(social_welfare(&start, &i), 1);
        let (out, _) = ffd_lpt(&start, &i).unwrap();
        assert_eq!(out.bins(), &[vec![0, 1], vec![2, 3, 4]]);
        assert_eq!(social_welfare(&out, &i), 2);
        assert!(verify_ne(&out, &i).unwrap().holds);
    }

    #[test]
    fn fixed_point() {
        let i = inst(&[3, 3, 4, 2], 6);
        let start = Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        let (out, trace) = ffd_lpt(&start, &i).unwrap();
        assert_eq!(out, start);
        assert!(trace.is_empty());
    }

    #[test]
    fn grand_coalition_start() {
        let i = inst(&[5, 4, 3, 2, 1, 5], 6);
        let (out, _) = ffd_lpt(&Partition::grand_coalition(6), &i).unwrap();
        assert!(social_welfare(&out, &i) >= 1);
        assert!(verify_ne(&out, &i).unwrap().holds);
    }

    #[test]
    fn uncoverable_instance() {
        let i = inst(&[1, 2], 6);
        let (out, _) = ffd_lpt(&Partition::grand_coalition(2), &i).unwrap();
        assert_eq!(out, Partition::grand_coalition(2));
    }

    #[test]
    fn rejects_unreasonable() {
        let i = inst(&[1, 2, 5], 6);
        let p = Partition::new(vec![vec![0], vec![1], vec![2]], 3).unwrap();
        assert_eq!(
            ffd_lpt(&p, &i).unwrap_err(),
            DynamicsError::Contract(ModelError::NotReasonable { uncovered: 3 })
        );
    }

    #[test]
    fn random_starts_reach_ne() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..300 {
            let i = gen_random(1 + (seed as usize % 30), 1 + seed % 20, seed).unwrap();
            let start = canonicalize(&random_partition(i.len(), 1 + seed as usize % 12, &mut rng), &i);
            let (out, _) = ffd_lpt(&start, &i).unwrap();
            assert!(verify_ne(&out, &i).unwrap().holds, "seed {seed}");
            assert!(social_welfare(&out, &i) >= social_welfare(&start, &i));
        }
    }
}
