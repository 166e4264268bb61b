//! Worst-case families, partition-problem reductions, and seeded random
//! instances.
//!
//! Within the two ratio families large items come first. The reduction
//! instances keep the partition-problem items first, in input order, followed
//! by the added large item(s).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Instance, ModelError, Partition, Size};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("family parameter n must be at least 2 (got {0})")]
    FamilyTooSmall(usize),
    #[error("partition instance must be non-empty")]
    EmptyPartitionInstance,
    #[error("partition instance entries must be positive")]
    NonPositiveEntry,
    #[error("partition instance total {0} is odd")]
    OddTotal(Size),
    #[error("partition instance total must be at least 2")]
    TotalTooSmall,
    #[error("random instances need n >= 1 and max_size >= 1")]
    BadRandomParams,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Returns the family instance, its FNE(III) partition (`n` bins of two large
/// items plus two bins of `2n` unit items, welfare `n + 2`) and the optimum
/// (`2n` bins of one large and two unit items, welfare `2n`).
pub fn gen_thm3(n: usize) -> Result<(Instance, Partition, Partition), GenError> {
    if n < 2 {
        return Err(GenError::FamilyTooSmall(n));
    }
    let large = 2 * n as Size - 2;
    let mut sizes = vec![large; 2 * n];
    sizes.extend(std::iter::repeat_n(1, 4 * n));
    let inst = Instance::new(sizes, 2 * n as Size)?;

    let mut eq: Vec<Vec<usize>> = (0..n).map(|k| vec![2 * k, 2 * k + 1]).collect();
    eq.push((2 * n..4 * n).collect());
    eq.push((4 * n..6 * n).collect());
    let opt = (0..2 * n)
        .map(|k| vec![k, 2 * n + 2 * k, 2 * n + 2 * k + 1])
        .collect();
    Ok((
        inst.clone(),
        Partition::for_instance(eq, &inst)?,
        Partition::for_instance(opt, &inst)?,
    ))
}

/// Returns the family instance, its SNE (two bins of `n` small items plus `n`
/// bins of two large items, welfare `n + 2`) and the pairing optimum (`2n`
/// bins of one large and one small item, welfare `2n`).
pub fn gen_thm7(n: usize) -> Result<(Instance, Partition, Partition), GenError> {
    if n < 2 {
        return Err(GenError::FamilyTooSmall(n));
    }
    let mut sizes = vec![2 * n as Size - 1; 2 * n];
    sizes.extend(std::iter::repeat_n(2, 2 * n));
    let inst = Instance::new(sizes, 2 * n as Size)?;

    let mut sne = vec![(2 * n..3 * n).collect::<Vec<_>>(), (3 * n..4 * n).collect()];
    sne.extend((0..n).map(|k| vec![2 * k, 2 * k + 1]));
    let opt = (0..2 * n).map(|k| vec![k, 2 * n + k]).collect();
    Ok((
        inst.clone(),
        Partition::for_instance(sne, &inst)?,
        Partition::for_instance(opt, &inst)?,
    ))
}

fn check_entries(e: &[Size]) -> Result<Size, GenError> {
    if e.is_empty() {
        return Err(GenError::EmptyPartitionInstance);
    }
    if e.contains(&0) {
        return Err(GenError::NonPositiveEntry);
    }
    Ok(e.iter().sum())
}

/// FNE(II)/FNE(III) hardness instance: smalls `2e_j`, two larges `Σe + 1`,
/// volume `2Σe + 1`. Every FNE(II) has an exactly covered bin iff `e` splits
/// into two equal halves.
pub fn gen_thm4_reduction(e: &[Size]) -> Result<Instance, GenError> {
    let total = check_entries(e)?;
    let mut sizes: Vec<Size> = e.iter().map(|&x| 2 * x).collect();
    sizes.extend([total + 1, total + 1]);
    Ok(Instance::new(sizes, 2 * total + 1)?)
}

/// SNE hardness instance: sizes `e_j`, volume `Σe / 2`. Requires an even total
/// and every `e_j < Σe / 2`.
pub fn gen_thm6_reduction(e: &[Size]) -> Result<Instance, GenError> {
    let total = check_entries(e)?;
    if total % 2 == 1 {
        return Err(GenError::OddTotal(total));
    }
    Ok(Instance::new(e.to_vec(), total / 2)?)
}

/// M-SNE hardness instance: smalls `2e_j`, one large `Σe - 1`, volume
/// `2Σe - 1`.
pub fn gen_thm8_reduction(e: &[Size]) -> Result<Instance, GenError> {
    let total = check_entries(e)?;
    if total < 2 {
        return Err(GenError::TotalTooSmall);
    }
    let mut sizes: Vec<Size> = e.iter().map(|&x| 2 * x).collect();
    sizes.push(total - 1);
    Ok(Instance::new(sizes, 2 * total - 1)?)
}

/// Whether `e` splits into two halves of equal total (brute force over
/// subset sums).
pub fn has_half_split(e: &[Size]) -> bool {
    let total: Size = e.iter().sum();
    if total % 2 == 1 {
        return false;
    }
    let half = (total / 2) as usize;
    let mut reach = vec![false; half + 1];
    reach[0] = true;
    for &x in e {
        let x = x as usize;
        for t in (x..=half).rev() {
            reach[t] |= reach[t - x];
        }
    }
    reach[half]
}

/// Seeded random instance: `b` uniform in `max_size+1 ..= 2·max_size`, sizes
/// uniform in `1 ..= max_size`.
pub fn gen_random(n: usize, max_size: Size, seed: u64) -> Result<Instance, GenError> {
    if n == 0 || max_size == 0 {
        return Err(GenError::BadRandomParams);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = rng.random_range(max_size + 1..=2 * max_size);
    let sizes = (0..n).map(|_| rng.random_range(1..=max_size)).collect();
    Ok(Instance::new(sizes, b)?)
}

/// Uniformly random labelling into at most `max_bins` bins. The result may be
/// unreasonable; see [`crate::model::canonicalize`].
pub fn random_partition(n: usize, max_bins: usize, rng: &mut impl Rng) -> Partition {
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..max_bins.max(1))).collect();
    Partition::from_labels(&labels)
}
