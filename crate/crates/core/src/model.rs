//! Instances, partitions, payoffs and the structural predicates of the game.
//!
//! Item indices are 0-based everywhere in this crate. Sizes and sums are exact
//! integers; payoffs are exact rationals.

use num_rational::Ratio;
use thiserror::Error;

/// Item sizes, bin volume and all bin totals.
pub type Size = u64;

/// Exact payoff received by one agent.
pub type Payoff = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("instance has no items")]
    NoItems,
    #[error("bin volume must be positive")]
    ZeroVolume,
    #[error("item {index} has size 0; sizes must be positive")]
    ZeroSize { index: usize },
    #[error("item {index} has size {size}, which is not below the bin volume {bin_volume}")]
    ItemTooLarge {
        index: usize,
        size: Size,
        bin_volume: Size,
    },
    #[error("item {item} is out of range for an instance with {n} items")]
    ItemOutOfRange { item: usize, n: usize },
    #[error("item {item} appears more than once")]
    DuplicateItem { item: usize },
    #[error("item {item} is not assigned to any bin")]
    MissingItem { item: usize },
    #[error("bin {bin} is empty")]
    EmptyBin { bin: usize },
    #[error("bin index {bin} is out of range for a partition with {bins} bins")]
    BinOutOfRange { bin: usize, bins: usize },
    #[error("partition is not reasonable: {uncovered} bins are uncovered")]
    NotReasonable { uncovered: usize },
    #[error("partition is not rational: bin {bin} is covered but not minimal covered")]
    NotRational { bin: usize },
}

/// Item sizes `a_1..a_n` and the common bin volume `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    sizes: Vec<Size>,
    bin_volume: Size,
}

impl Instance {
    /// Builds an instance, enforcing `n >= 1` and `1 <= a_j < b` for every item.
    pub fn new(sizes: Vec<Size>, bin_volume: Size) -> Result<Self, ModelError> {
        if sizes.is_empty() {
            return Err(ModelError::NoItems);
        }
        if bin_volume == 0 {
            return Err(ModelError::ZeroVolume);
        }
        for (index, &size) in sizes.iter().enumerate() {
            if size == 0 {
                return Err(ModelError::ZeroSize { index });
            }
            if size >= bin_volume {
                return Err(ModelError::ItemTooLarge {
                    index,
                    size,
                    bin_volume,
                });
            }
        }
        Ok(Self { sizes, bin_volume })
    }

    pub fn sizes(&self) -> &[Size] {
        &self.sizes
    }

    pub fn size(&self, item: usize) -> Size {
        self.sizes[item]
    }

    pub fn bin_volume(&self) -> Size {
        self.bin_volume
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    /// Always false; instances carry at least one item.
    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn total_size(&self) -> Size {
        self.sizes.iter().sum()
    }

    pub fn sum_of(&self, items: &[usize]) -> Size {
        items.iter().map(|&j| self.sizes[j]).sum()
    }

    pub fn min_size_of(&self, items: &[usize]) -> Option<Size> {
        items.iter().map(|&j| self.sizes[j]).min()
    }

    /// `s(B) >= b`.
    pub fn is_covered(&self, items: &[usize]) -> bool {
        self.sum_of(items) >= self.bin_volume
    }

    /// `b <= s(B) < b + a_min(B)`. The empty set is never covered.
    pub fn is_minimal_covered(&self, items: &[usize]) -> bool {
        match self.min_size_of(items) {
            Some(min) => {
                let s = self.sum_of(items);
                s >= self.bin_volume && s < self.bin_volume + min
            }
            None => false,
        }
    }

    /// `s(B) = b`.
    pub fn is_exactly_covered(&self, items: &[usize]) -> bool {
        !items.is_empty() && self.sum_of(items) == self.bin_volume
    }

    /// Item indices sorted by non-increasing size, ties by lower index first.
    pub fn decreasing_order(&self, items: &[usize]) -> Vec<usize> {
        let mut order = items.to_vec();
        order.sort_by(|&x, &y| self.sizes[y].cmp(&self.sizes[x]).then(x.cmp(&y)));
        order
    }
}

/// A set partition of the items into non-empty bins.
///
/// Items inside each bin are kept sorted ascending. Bin order is significant
/// (deviation witnesses refer to bins by position) but two partitions with the
/// same bins in a different order describe the same coalition structure; use
/// [`Partition::normalized`] to compare them as sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    bins: Vec<Vec<usize>>,
    labels: Vec<usize>,
}

impl Partition {
    /// Validates that `bins` is an exact partition of `0..n` with no empty bin.
    pub fn new(bins: Vec<Vec<usize>>, n: usize) -> Result<Self, ModelError> {
        let mut labels = vec![usize::MAX; n];
        for (b, bin) in bins.iter().enumerate() {
            if bin.is_empty() {
                return Err(ModelError::EmptyBin { bin: b });
            }
            for &item in bin {
                if item >= n {
                    return Err(ModelError::ItemOutOfRange { item, n });
                }
                if labels[item] != usize::MAX {
                    return Err(ModelError::DuplicateItem { item });
                }
                labels[item] = b;
            }
        }
        if let Some(item) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(ModelError::MissingItem { item });
        }
        let bins = bins
            .into_iter()
            .map(|mut bin| {
                bin.sort_unstable();
                bin
            })
            .collect();
        Ok(Self { bins, labels })
    }

    pub fn for_instance(bins: Vec<Vec<usize>>, inst: &Instance) -> Result<Self, ModelError> {
        Self::new(bins, inst.len())
    }

    /// Builds a partition from bins already known to cover `0..n` exactly.
    /// Empty bins are dropped.
    pub(crate) fn from_bins(bins: Vec<Vec<usize>>, n: usize) -> Self {
        let bins: Vec<Vec<usize>> = bins.into_iter().filter(|b| !b.is_empty()).collect();
        let p = Self::new(bins, n);
        debug_assert!(p.is_ok(), "internal partition invariant broken: {p:?}");
        p.expect("internal partition invariant")
    }

    /// Builds a partition from a per-item bin label vector (restricted growth
    /// strings and any other labelling). Labels need not be contiguous.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut ids: Vec<usize> = labels.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut bins = vec![Vec::new(); ids.len()];
        for (item, label) in labels.iter().enumerate() {
            let b = ids.binary_search(label).expect("label present");
            bins[b].push(item);
        }
        Self::from_bins(bins, labels.len())
    }

    /// The grand coalition `{N}`.
    pub fn grand_coalition(n: usize) -> Self {
        Self::from_bins(vec![(0..n).collect()], n)
    }

    pub fn bins(&self) -> &[Vec<usize>] {
        &self.bins
    }

    pub fn bin(&self, i: usize) -> Result<&[usize], ModelError> {
        self.bins
            .get(i)
            .map(Vec::as_slice)
            .ok_or(ModelError::BinOutOfRange {
                bin: i,
                bins: self.bins.len(),
            })
    }

    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn num_items(&self) -> usize {
        self.labels.len()
    }

    /// Index of the bin holding `item` (`B_{j,π}`).
    pub fn bin_of(&self, item: usize) -> usize {
        self.labels[item]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Same bins ordered by their smallest item.
    pub fn normalized(&self) -> Self {
        let mut bins = self.bins.clone();
        bins.sort_unstable_by_key(|b| b[0]);
        Self::from_bins(bins, self.num_items())
    }

    pub fn into_bins(self) -> Vec<Vec<usize>> {
        self.bins
    }
}

/// `s(B_i)`.
pub fn bin_size(partition: &Partition, i: usize, inst: &Instance) -> Result<Size, ModelError> {
    partition.bin(i).map(|bin| inst.sum_of(bin))
}

/// `a_j / s(B_{j,π})` when the bin of `j` is covered, zero otherwise.
pub fn payoff(item: usize, partition: &Partition, inst: &Instance) -> Result<Payoff, ModelError> {
    if item >= inst.len() || item >= partition.num_items() {
        return Err(ModelError::ItemOutOfRange {
            item,
            n: inst.len(),
        });
    }
    let s = inst.sum_of(&partition.bins[partition.bin_of(item)]);
    if s >= inst.bin_volume() {
        Ok(Ratio::new(inst.size(item), s))
    } else {
        Ok(Ratio::from_integer(0))
    }
}

/// Number of covered bins.
pub fn social_welfare(partition: &Partition, inst: &Instance) -> usize {
    partition.bins.iter().filter(|b| inst.is_covered(b)).count()
}

pub fn uncovered_bins(partition: &Partition, inst: &Instance) -> Vec<usize> {
    (0..partition.num_bins())
        .filter(|&i| !inst.is_covered(&partition.bins[i]))
        .collect()
}

/// At most one uncovered bin.
pub fn is_reasonable(partition: &Partition, inst: &Instance) -> bool {
    uncovered_bins(partition, inst).len() <= 1
}

/// Reasonable, and every covered bin is minimal covered.
pub fn is_rational(partition: &Partition, inst: &Instance) -> bool {
    check_rational(partition, inst).is_ok()
}

/// Returns the unique uncovered bin (`B_m`), if any.
pub fn check_reasonable(partition: &Partition, inst: &Instance) -> Result<Option<usize>, ModelError> {
    let unc = uncovered_bins(partition, inst);
    match unc.len() {
        0 => Ok(None),
        1 => Ok(Some(unc[0])),
        k => Err(ModelError::NotReasonable { uncovered: k }),
    }
}

/// Returns the unique uncovered bin, failing on the first structural defect.
pub fn check_rational(partition: &Partition, inst: &Instance) -> Result<Option<usize>, ModelError> {
    let last = check_reasonable(partition, inst)?;
    for (i, bin) in partition.bins.iter().enumerate() {
        if inst.is_covered(bin) && !inst.is_minimal_covered(bin) {
            return Err(ModelError::NotRational { bin: i });
        }
    }
    Ok(last)
}

/// Merges every uncovered bin into one. Welfare and all payoffs are unchanged
/// and the result is reasonable. The merged bin takes the position of the
/// first uncovered bin.
pub fn canonicalize(partition: &Partition, inst: &Instance) -> Partition {
    let unc = uncovered_bins(partition, inst);
    if unc.len() <= 1 {
        return partition.clone();
    }
    let mut merged = Vec::new();
    let mut bins = Vec::with_capacity(partition.num_bins() - unc.len() + 1);
    for (i, bin) in partition.bins.iter().enumerate() {
        if i == unc[0] {
            bins.push(Vec::new());
        }
        if unc.contains(&i) {
            merged.extend_from_slice(bin);
        } else {
            bins.push(bin.clone());
        }
    }
    bins[unc[0]] = merged;
    Partition::from_bins(bins, partition.num_items())
}

/// Repeatedly removes the smallest item (lowest index on ties) while the bin
/// stays covered. Returns the removed items; the bin ends minimal covered if
/// it started covered.
pub fn shrink_to_minimal(bin: &mut Vec<usize>, inst: &Instance) -> Vec<usize> {
    let mut removed = Vec::new();
    let mut total = inst.sum_of(bin);
    while let Some(pos) = smallest_position(bin, inst) {
        let a = inst.size(bin[pos]);
        if total < inst.bin_volume() + a {
            break;
        }
        total -= a;
        removed.push(bin.remove(pos));
    }
    removed
}

/// Position of the smallest item in `items`, lowest index on ties.
pub(crate) fn smallest_position(items: &[usize], inst: &Instance) -> Option<usize> {
    items
        .iter()
        .enumerate()
        .min_by(|(_, &x), (_, &y)| inst.size(x).cmp(&inst.size(y)).then(x.cmp(&y)))
        .map(|(pos, _)| pos)
}

/// Position of the largest item in `items`, lowest index on ties.
pub(crate) fn largest_position(items: &[usize], inst: &Instance) -> Option<usize> {
    items
        .iter()
        .enumerate()
        .min_by(|(_, &x), (_, &y)| inst.size(y).cmp(&inst.size(x)).then(x.cmp(&y)))
        .map(|(pos, _)| pos)
}

/// Turns any partition into a rational one without lowering welfare: uncovered
/// bins are pooled with the surplus shrunk out of covered bins, and the pool is
/// re-filled first-fit decreasing.
pub fn rationalize(partition: &Partition, inst: &Instance) -> Partition {
    let mut pool = Vec::new();
    let mut bins = Vec::new();
    for bin in partition.bins() {
        let mut bin = bin.clone();
        if inst.is_covered(&bin) {
            pool.extend(shrink_to_minimal(&mut bin, inst));
            bins.push(bin);
        } else {
            pool.extend(bin);
        }
    }
    bins.extend(crate::dynamics::ffd_items(&pool, inst));
    Partition::from_bins(bins, inst.len())
}
