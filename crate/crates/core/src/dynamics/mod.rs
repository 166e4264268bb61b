//! Constructive algorithms. Every run that moves agents returns a
//! [`MigrationTrace`] that can be replayed and audited step by step.

mod ffd_lpt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibria::{min_subset_at_least, verify_fne1, verify_fne3, verify_msne, BinTarget, Violation};
use crate::model::{
    canonicalize, check_rational, is_rational, rationalize, shrink_to_minimal, Instance, ModelError, Partition,
};
use crate::potential::{potential, PotentialVector};

pub use ffd_lpt::ffd_lpt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Contract(#[from] ModelError),
    #[error("iteration budget of {iterations} exhausted before reaching an equilibrium")]
    BudgetExhausted { iterations: usize, best: Partition },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Items taken out of a covered bin until it is minimal covered.
    Shrink,
    /// Pooled items re-filled first-fit decreasing.
    Regroup,
    /// Largest uncovered item swapped with the smallest covered item.
    Exchange,
    /// Leftover item assigned to the least loaded covered bin.
    Place,
    /// Agent or group migration into another bin.
    Migrate,
    /// One full fire-and-rebalance transformation.
    Transform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub kind: StepKind,
    pub movers: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source_bin: Option<usize>,
    pub target_bin: BinTarget,
    #[serde(default)]
    pub fired_set: Vec<usize>,
    pub potential_after: PotentialVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MigrationTrace {
    pub steps: Vec<Step>,
    /// Number of steps each item took part in as a mover.
    pub per_agent_counts: Vec<usize>,
}

impl MigrationTrace {
    pub fn new(n: usize) -> Self {
        Self {
            steps: Vec::new(),
            per_agent_counts: vec![0; n],
        }
    }

    pub fn push(&mut self, step: Step) {
        for &j in &step.movers {
            self.per_agent_counts[j] += 1;
        }
        self.steps.push(step);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn migrations_of(&self, kind: StepKind) -> usize {
        self.steps.iter().filter(|s| s.kind == kind).count()
    }
}

/// First-fit decreasing over a subset of items: fill the current bin until it
/// is covered, then open the next. Only the last bin can be uncovered.
pub fn ffd_items(items: &[usize], inst: &Instance) -> Vec<Vec<usize>> {
    let mut bins = Vec::new();
    let mut current = Vec::new();
    let mut total = 0;
    for j in inst.decreasing_order(items) {
        current.push(j);
        total += inst.size(j);
        if total >= inst.bin_volume() {
            bins.push(std::mem::take(&mut current));
            total = 0;
        }
    }
    if !current.is_empty() {
        bins.push(current);
    }
    bins
}

/// First-fit decreasing over the whole instance. The result is rational.
pub fn ffd(inst: &Instance) -> Partition {
    let all: Vec<usize> = (0..inst.len()).collect();
    Partition::from_bins(ffd_items(&all, inst), inst.len())
}

/// Best-response dynamics for FNE(I): while some covered agent profits from
/// joining the uncovered bin with the result minimal covered, the smallest
/// such agent moves and its old bin becomes the uncovered one.
pub fn best_response_fne1(
    partition: &Partition,
    inst: &Instance,
) -> Result<(Partition, MigrationTrace), DynamicsError> {
    check_rational(partition, inst)?;
    let mut trace = MigrationTrace::new(inst.len());
    let mut current = partition.clone();
    while let Some(Violation::Deviation(d)) = verify_fne1(&current, inst).witness {
        let (Some(j), Some(src), BinTarget::Existing(dst)) = (d.mover, d.source_bin, d.target_bin) else {
            unreachable!("FNE(I) witnesses are single moves into an existing bin");
        };
        let mut bins = current.into_bins();
        bins[src].retain(|&x| x != j);
        bins[dst].push(j);
        current = Partition::from_bins(bins, inst.len());
        trace.push(Step {
            kind: StepKind::Migrate,
            movers: vec![j],
            source_bin: Some(src),
            target_bin: BinTarget::Existing(dst),
            fired_set: Vec::new(),
            potential_after: potential(&current, inst)?,
        });
    }
    Ok((current, trace))
}

/// Greedy strong equilibrium: repeatedly carve out a minimum covering subset
/// of the remaining items. The leftover, if any, is the uncovered bin.
pub fn construct_sne(inst: &Instance) -> Partition {
    let mut rest: Vec<usize> = (0..inst.len()).collect();
    let mut bins = Vec::new();
    while let Some((_, chosen)) = min_subset_at_least(&rest, inst.bin_volume(), inst) {
        rest.retain(|j| chosen.binary_search(j).is_err());
        bins.push(chosen);
    }
    if !rest.is_empty() {
        bins.push(rest);
    }
    Partition::from_bins(bins, inst.len())
}

fn check_budget(iterations: usize, cap: Option<usize>, best: &Partition) -> Result<(), DynamicsError> {
    match cap {
        Some(cap) if iterations >= cap => Err(DynamicsError::BudgetExhausted {
            iterations,
            best: best.clone(),
        }),
        _ => Ok(()),
    }
}

/// Improvement dynamics towards FNE(III). Each round takes the verifier's
/// witness `(j, B_i, E)` and applies the fire-and-rebalance transformation:
/// `j` joins `B_i`, `E` goes back to `j`'s old bin, that bin is shrunk to
/// minimal, the surplus `D` joins the uncovered bin (or opens one), and the
/// uncovered bin is shrunk again with its surplus opening a new bin.
///
/// No polynomial bound on the number of rounds is claimed; `max_iterations`
/// caps it.
pub fn improve_to_fne3(
    partition: &Partition,
    inst: &Instance,
    max_iterations: Option<usize>,
) -> Result<(Partition, MigrationTrace), DynamicsError> {
    check_rational(partition, inst)?;
    let mut trace = MigrationTrace::new(inst.len());
    let mut current = partition.clone();
    let mut rounds = 0;
    while let Some(Violation::Deviation(d)) = verify_fne3(&current, inst).witness {
        check_budget(rounds, max_iterations, &current)?;
        rounds += 1;
        let (Some(j), Some(src), BinTarget::Existing(dst)) = (d.mover, d.source_bin, d.target_bin) else {
            unreachable!("FNE(III) witnesses are single moves into an existing bin");
        };
        let fired = d.fired_set;
        let mut bins = current.into_bins();
        bins[src].retain(|&x| x != j);
        bins[dst].retain(|x| !fired.contains(x));
        bins[dst].push(j);
        bins[src].extend_from_slice(&fired);

        let surplus = shrink_to_minimal(&mut bins[src], inst);
        if !surplus.is_empty() {
            let uncovered =
                (0..bins.len()).find(|&k| k != src && !bins[k].is_empty() && !inst.is_covered(&bins[k]));
            match uncovered {
                Some(u) => {
                    bins[u].extend(surplus);
                    let extra = shrink_to_minimal(&mut bins[u], inst);
                    if !extra.is_empty() {
                        bins.push(extra);
                    }
                }
                None => bins.push(surplus),
            }
        }
        let mut next = Partition::from_bins(bins, inst.len());
        if !is_rational(&next, inst) {
            next = rationalize(&next, inst);
        }
        current = next;
        let mut movers = vec![j];
        movers.extend_from_slice(&fired);
        trace.push(Step {
            kind: StepKind::Transform,
            movers,
            source_bin: Some(src),
            target_bin: BinTarget::Existing(dst),
            fired_set: fired,
            potential_after: potential(&current, inst)?,
        });
    }
    Ok((current, trace))
}

/// Improvement dynamics towards M-SNE: the verifier's witness group leaves its
/// covered bin for the uncovered bin, which becomes minimal covered; the group's
/// old bin becomes the uncovered one.
pub fn improve_to_msne(
    partition: &Partition,
    inst: &Instance,
    max_iterations: Option<usize>,
) -> Result<(Partition, MigrationTrace), DynamicsError> {
    check_rational(partition, inst)?;
    let mut trace = MigrationTrace::new(inst.len());
    let mut current = partition.clone();
    let mut rounds = 0;
    while let Some(Violation::Deviation(d)) = verify_msne(&current, inst).witness {
        check_budget(rounds, max_iterations, &current)?;
        rounds += 1;
        let (Some(src), BinTarget::Existing(dst)) = (d.source_bin, d.target_bin) else {
            unreachable!("M-SNE witnesses are group moves into an existing bin");
        };
        let group = d.migrating_group;
        let mut bins = current.into_bins();
        bins[src].retain(|x| !group.contains(x));
        bins[dst].extend_from_slice(&group);
        current = canonicalize(&Partition::from_bins(bins, inst.len()), inst);
        trace.push(Step {
            kind: StepKind::Migrate,
            movers: group,
            source_bin: Some(src),
            target_bin: BinTarget::Existing(dst),
            fired_set: Vec::new(),
            potential_after: potential(&current, inst)?,
        });
    }
    Ok((current, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{verify_fne1, verify_fne3, verify_msne, verify_sne};
    use crate::generators;
    use crate::model::{social_welfare, Size};

    fn inst(sizes: &[Size], b: Size) -> Instance {
        Instance::new(sizes.to_vec(), b).unwrap()
    }

    fn part(bins: &[&[usize]], n: usize) -> Partition {
        Partition::new(bins.iter().map(|b| b.to_vec()).collect(), n).unwrap()
    }

    #[test]
    fn ffd_examples() {
        let i = inst(&[5, 4, 3, 2, 1], 6);
        let p = ffd(&i);
        assert_eq!(p.bins(), &[vec![0, 1], vec![2, 3, 4]]);
        assert_eq!(social_welfare(&p, &i), 2);

        let i = inst(&[3], 6);
        assert_eq!(social_welfare(&ffd(&i), &i), 0);

        let i = inst(&[5; 5], 6);
        let p = ffd(&i);
        assert_eq!(p.bins(), &[vec![0, 1], vec![2, 3], vec![4]]);
        assert!(is_rational(&p, &i));
    }

    #[test]
    fn best_response_examples() {
        let i = inst(&[5, 2, 2, 2], 6);
        let (out, trace) = best_response_fne1(&part(&[&[0, 1], &[2, 3]], 4), &i).unwrap();
        assert_eq!(out.normalized(), part(&[&[0], &[1, 2, 3]], 4));
        assert_eq!(trace.len(), 1);
        assert!(verify_fne1(&out, &i).holds);

        let (again, trace) = best_response_fne1(&out, &i).unwrap();
        assert_eq!(again, out);
        assert!(trace.is_empty());

        let (i, eq, _) = generators::gen_thm3(3).unwrap();
        assert!(best_response_fne1(&eq, &i).unwrap().1.is_empty());

        let i = inst(&[5, 4, 3, 1], 6);
        assert!(matches!(
            best_response_fne1(&part(&[&[0, 1, 2], &[3]], 4), &i),
            Err(DynamicsError::Contract(ModelError::NotRational { bin: 0 }))
        ));
    }

    #[test]
    fn construct_sne_examples() {
        let i = generators::gen_thm6_reduction(&[1, 1, 1, 1]).unwrap();
        let p = construct_sne(&i);
        assert_eq!(p.normalized(), part(&[&[0, 1], &[2, 3]], 4));
        assert!(p.bins().iter().all(|b| i.is_exactly_covered(b)));
        assert!(verify_sne(&p, &i).unwrap().holds);

        // all-even sizes with an odd half: nothing is exactly covered
        let i = generators::gen_thm6_reduction(&[2, 2, 2, 4, 4]).unwrap();
        let p = construct_sne(&i);
        assert!(p.bins().iter().all(|b| !i.is_exactly_covered(b)));
        assert!(verify_sne(&p, &i).unwrap().holds);

        let i = inst(&[1, 2], 6);
        let p = construct_sne(&i);
        assert_eq!(p, Partition::grand_coalition(2));
        assert_eq!(social_welfare(&p, &i), 0);
    }

    #[test]
    fn improve_fne3_examples() {
        let (i, eq, _) = generators::gen_thm3(3).unwrap();
        let (out, trace) = improve_to_fne3(&eq, &i, None).unwrap();
        assert_eq!(out, eq);
        assert!(trace.is_empty());

        let i = inst(&[5, 2, 2, 2], 6);
        let start = part(&[&[0, 1], &[2, 3]], 4);
        let (out, trace) = improve_to_fne3(&start, &i, None).unwrap();
        assert_eq!(trace.len(), 1);
        assert!(verify_fne3(&out, &i).holds);
        assert!(social_welfare(&out, &i) >= 1);
    }

    #[test]
    fn improve_msne_examples() {
        let i = generators::gen_thm8_reduction(&[1, 1, 2]).unwrap();
        let eq = part(&[&[2, 3], &[0, 1]], 4);
        assert!(improve_to_msne(&eq, &i, None).unwrap().1.is_empty());

        // sizes (4,6,6,8,11), b = 23; {6,8,11} = 25 is minimal, {6,8} exits
        let i = generators::gen_thm8_reduction(&[2, 3, 3, 4]).unwrap();
        let inflated = part(&[&[2, 3, 4], &[0, 1]], 5);
        let (out, trace) = improve_to_msne(&inflated, &i, None).unwrap();
        assert_eq!(trace.steps[0].movers, vec![2, 3]);
        assert!(verify_msne(&out, &i).holds);
        // second exit: {4, 8} leaves {6, 6} = 12 > 11 and covers {11}
        assert_eq!(trace.steps[1].movers, vec![0, 3]);
        assert_eq!(out.normalized(), part(&[&[0, 3, 4], &[1, 2]], 5));
    }

    #[test]
    fn budget_cap() {
        let i = inst(&[5, 2, 2, 2], 6);
        let start = part(&[&[0, 1], &[2, 3]], 4);
        match improve_to_fne3(&start, &i, Some(0)) {
            Err(DynamicsError::BudgetExhausted { iterations: 0, best }) => assert_eq!(best, start),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
