//! Brute-force verifiers: every fired set, group and coalition is enumerated
//! explicitly and judged with the plain payoff and coverage predicates. They
//! share no search code with the dynamic-programming verifiers and serve as
//! their oracle.

use num_rational::Ratio;

use crate::equilibria::{rationality, BinTarget, Deviation, EquilibriumKind, Verdict, Violation};
use crate::model::{check_reasonable, payoff, Instance, Partition, Size};

use super::OracleError;

/// Largest set the verifiers will enumerate subsets of.
pub const MAX_SUBSET_ITEMS: usize = 24;

fn subsets(items: &[usize]) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> + '_ {
    (0u32..1 << items.len()).map(move |mask| {
        let (mut chosen, mut rest) = (Vec::new(), Vec::new());
        for (k, &j) in items.iter().enumerate() {
            if mask >> k & 1 == 1 {
                chosen.push(j);
            } else {
                rest.push(j);
            }
        }
        (chosen, rest)
    })
}

fn moved(partition: &Partition, item: usize, target: usize) -> Partition {
    let mut bins = partition.bins().to_vec();
    bins[partition.bin_of(item)].retain(|&x| x != item);
    bins[target].push(item);
    let bins = bins.into_iter().filter(|b| !b.is_empty()).collect();
    Partition::new(bins, partition.num_items()).expect("moving an item keeps a partition")
}

fn delta(items: &[usize], inst: &Instance) -> Size {
    if inst.is_covered(items) {
        inst.sum_of(items)
    } else {
        Size::MAX
    }
}

fn best(candidates: impl Iterator<Item = (usize, usize, Vec<usize>)>) -> Option<(usize, usize, Vec<usize>)> {
    candidates.min()
}

fn single(found: Option<(usize, usize, Vec<usize>)>, partition: &Partition) -> Verdict {
    match found {
        None => Verdict::holds(),
        Some((j, i, fired)) => Verdict::fails(Violation::Deviation(Deviation {
            mover: Some(j),
            source_bin: Some(partition.bin_of(j)),
            target_bin: BinTarget::Existing(i),
            fired_set: fired,
            migrating_group: Vec::new(),
        })),
    }
}

pub fn exhaustive_ne(partition: &Partition, inst: &Instance) -> Result<Verdict, OracleError> {
    check_reasonable(partition, inst)?;
    let found = (0..inst.len())
        .flat_map(|j| (0..partition.num_bins()).map(move |i| (j, i)))
        .filter(|&(j, i)| i != partition.bin_of(j))
        .find(|&(j, i)| {
            let before = payoff(j, partition, inst).expect("valid item");
            let after = payoff(j, &moved(partition, j, i), inst).expect("valid item");
            after > before
        })
        .map(|(j, i)| (j, i, Vec::new()));
    Ok(single(found, partition))
}

fn check_size(items: usize) -> Result<(), OracleError> {
    if items > MAX_SUBSET_ITEMS {
        return Err(OracleError::OverCap {
            n: items,
            cap: MAX_SUBSET_ITEMS,
        });
    }
    Ok(())
}

/// Moves of single agents into `targets`, with every fired subset enumerated.
fn fired_moves(
    partition: &Partition,
    inst: &Instance,
    movers: &[usize],
    targets: &[usize],
    allow_firing: bool,
    undominated: impl Fn(Size, usize, usize) -> bool,
) -> Option<(usize, usize, Vec<usize>)> {
    let bins = partition.bins();
    let mut found = Vec::new();
    for &j in movers {
        for &i in targets {
            if i == partition.bin_of(j) {
                continue;
            }
            for (fired, kept) in subsets(&bins[i]) {
                if !allow_firing && !fired.is_empty() {
                    continue;
                }
                let mut joined = kept;
                joined.push(j);
                let total = inst.sum_of(&joined);
                if inst.is_minimal_covered(&joined) && undominated(total, j, i) {
                    found.push((j, i, fired));
                }
            }
        }
    }
    best(found.into_iter())
}

pub fn exhaustive_fne(level: u8, partition: &Partition, inst: &Instance) -> Result<Verdict, OracleError> {
    let last = match rationality(partition, inst) {
        Ok(last) => last,
        Err(v) => return Ok(Verdict::fails(v)),
    };
    for bin in partition.bins() {
        check_size(bin.len())?;
    }
    let bins = partition.bins();
    let found = match level {
        1 | 2 => {
            let Some(last) = last else {
                return Ok(Verdict::holds());
            };
            let movers: Vec<usize> = (0..inst.len()).filter(|&j| partition.bin_of(j) != last).collect();
            fired_moves(partition, inst, &movers, &[last], level == 2, |total, j, _| {
                total < inst.sum_of(&bins[partition.bin_of(j)])
            })
        }
        3 => {
            let movers: Vec<usize> = (0..inst.len()).collect();
            let targets: Vec<usize> = (0..bins.len()).collect();
            fired_moves(partition, inst, &movers, &targets, true, |total, j, i| {
                total < delta(&bins[i], inst).min(delta(&bins[partition.bin_of(j)], inst))
            })
        }
        _ => unreachable!("FNE levels are 1, 2 and 3"),
    };
    Ok(single(found, partition))
}

pub fn exhaustive_msne(partition: &Partition, inst: &Instance) -> Result<Verdict, OracleError> {
    let last = match rationality(partition, inst) {
        Ok(Some(last)) => last,
        Ok(None) => return Ok(Verdict::holds()),
        Err(v) => return Ok(Verdict::fails(v)),
    };
    let bins = partition.bins();
    let tail_sum = inst.sum_of(&bins[last]);
    let mut found = Vec::new();
    for (i, bin) in bins.iter().enumerate() {
        if i == last {
            continue;
        }
        check_size(bin.len())?;
        for (group, kept) in subsets(bin) {
            let mut joined = bins[last].clone();
            joined.extend_from_slice(&group);
            if inst.sum_of(&kept) > tail_sum && inst.is_minimal_covered(&joined) {
                found.push((i, group));
            }
        }
    }
    Ok(match found.into_iter().min() {
        None => Verdict::holds(),
        Some((i, group)) => Verdict::fails(Violation::Deviation(Deviation {
            mover: None,
            source_bin: Some(i),
            target_bin: BinTarget::Existing(last),
            fired_set: Vec::new(),
            migrating_group: group,
        })),
    })
}

/// Every coalition `B` with `s(B) >= b` is tested for a strict payoff gain of
/// all its members.
pub fn exhaustive_sne(partition: &Partition, inst: &Instance) -> Result<Verdict, OracleError> {
    check_reasonable(partition, inst)?;
    check_size(inst.len())?;
    let everyone: Vec<usize> = (0..inst.len()).collect();
    let current: Vec<Ratio<u64>> = everyone
        .iter()
        .map(|&j| payoff(j, partition, inst).expect("valid item"))
        .collect();
    let blocking = subsets(&everyone)
        .map(|(coalition, _)| coalition)
        .filter(|c| {
            let total = inst.sum_of(c);
            total >= inst.bin_volume()
                && c.iter()
                    .all(|&j| Ratio::new(inst.size(j), total) > current[j])
        })
        .min();
    Ok(match blocking {
        None => Verdict::holds(),
        Some(group) => Verdict::fails(Violation::Deviation(Deviation {
            mover: None,
            source_bin: None,
            target_bin: BinTarget::New,
            fired_set: Vec::new(),
            migrating_group: group,
        })),
    })
}

pub fn exhaustive_verify(
    kind: EquilibriumKind,
    partition: &Partition,
    inst: &Instance,
) -> Result<Verdict, OracleError> {
    match kind {
        EquilibriumKind::Ne => exhaustive_ne(partition, inst),
        EquilibriumKind::Fne1 => exhaustive_fne(1, partition, inst),
        EquilibriumKind::Fne2 => exhaustive_fne(2, partition, inst),
        EquilibriumKind::Fne3 => exhaustive_fne(3, partition, inst),
        EquilibriumKind::Msne => exhaustive_msne(partition, inst),
        EquilibriumKind::Sne => exhaustive_sne(partition, inst),
    }
}
