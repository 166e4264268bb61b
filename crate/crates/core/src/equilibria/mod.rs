//! Verifiers for the six equilibrium concepts.
//!
//! Every verifier returns a [`Verdict`]. A failing verdict carries a witness:
//! either the structural defect (the partition is not reasonable, or a covered
//! bin is not minimal covered) or a concrete deviation. When several
//! deviations exist the smallest by `(mover, target bin, fired set)` is
//! reported, fired sets compared as sorted index lists; group deviations are
//! ordered by `(source bin, group)`.

mod subset_sum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{check_reasonable, uncovered_bins, Instance, ModelError, Partition, Size};

pub use subset_sum::{min_subset_at_least, subset_sums, SumTable};
pub(crate) use subset_sum::{lex_min, Listed, StratifiedSums, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Ne,
    Fne1,
    Fne2,
    Fne3,
    Msne,
    Sne,
}

impl EquilibriumKind {
    pub const ALL: [EquilibriumKind; 6] = [
        EquilibriumKind::Ne,
        EquilibriumKind::Fne1,
        EquilibriumKind::Fne2,
        EquilibriumKind::Fne3,
        EquilibriumKind::Msne,
        EquilibriumKind::Sne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquilibriumKind::Ne => "ne",
            EquilibriumKind::Fne1 => "fne1",
            EquilibriumKind::Fne2 => "fne2",
            EquilibriumKind::Fne3 => "fne3",
            EquilibriumKind::Msne => "msne",
            EquilibriumKind::Sne => "sne",
        }
    }

    /// Direct arrows of the implication graph between concepts.
    ///
    /// SNE does not imply NE: an uncovered agent always gains by joining a
    /// covered bin, but a blocking coalition must open a bin of its own, so
    /// `{{2,3},{3}}` with `b = 4` is an SNE and not an NE.
    pub fn implied(self) -> &'static [EquilibriumKind] {
        use EquilibriumKind::*;
        match self {
            Sne => &[Fne3, Msne],
            Fne3 => &[Fne2],
            Fne2 => &[Fne1],
            Msne => &[Fne1],
            Fne1 | Ne => &[],
        }
    }

    /// Whether `self` implies `other` through the graph (reflexive, transitive).
    pub fn implies(self, other: EquilibriumKind) -> bool {
        self == other || self.implied().iter().any(|k| k.implies(other))
    }
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EquilibriumKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EquilibriumKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || s.eq_ignore_ascii_case(&k.name().replace("msne", "m-sne")))
            .ok_or_else(|| format!("unknown equilibrium kind `{s}` (expected ne, fne1, fne2, fne3, msne or sne)"))
    }
}

/// Where a deviating agent or group ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinTarget {
    Existing(usize),
    New,
}

impl Serialize for BinTarget {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BinTarget::Existing(i) => s.serialize_u64(*i as u64),
            BinTarget::New => s.serialize_str("new"),
        }
    }
}

impl<'de> Deserialize<'de> for BinTarget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Index(i) => Ok(BinTarget::Existing(i)),
            Raw::Word(w) if w == "new" => Ok(BinTarget::New),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("bad bin target `{w}`"))),
        }
    }
}

/// An improving deviation. Single-agent moves set `mover`; group moves
/// (M-SNE migrations, SNE blocking coalitions) leave it empty and list the
/// group in `migrating_group`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Deviation {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mover: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source_bin: Option<usize>,
    pub target_bin: BinTarget,
    #[serde(default)]
    pub fired_set: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub migrating_group: Vec<usize>,
}

impl Deviation {
    fn single(mover: usize, source: usize, target: usize, fired: Vec<usize>) -> Self {
        Self {
            mover: Some(mover),
            source_bin: Some(source),
            target_bin: BinTarget::Existing(target),
            fired_set: fired,
            migrating_group: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Violation {
    /// More than one bin is uncovered.
    NotReasonable { uncovered_bins: Vec<usize> },
    /// A covered bin that is not minimal covered.
    NotMinimal { bin: usize },
    Deviation(Deviation),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Violation>,
}

impl Verdict {
    pub fn holds() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    pub fn fails(witness: Violation) -> Self {
        Self {
            holds: false,
            witness: Some(witness),
        }
    }

    pub fn deviation(&self) -> Option<&Deviation> {
        match &self.witness {
            Some(Violation::Deviation(d)) => Some(d),
            _ => None,
        }
    }
}

/// Condition (1) shared by FNE(I)–(III) and M-SNE. Yields the uncovered bin.
pub(crate) fn rationality(partition: &Partition, inst: &Instance) -> Result<Option<usize>, Violation> {
    let unc = uncovered_bins(partition, inst);
    if unc.len() > 1 {
        return Err(Violation::NotReasonable { uncovered_bins: unc });
    }
    for (i, bin) in partition.bins().iter().enumerate() {
        if inst.is_covered(bin) && !inst.is_minimal_covered(bin) {
            return Err(Violation::NotMinimal { bin: i });
        }
    }
    Ok(unc.first().copied())
}

fn bin_sums(partition: &Partition, inst: &Instance) -> Vec<Size> {
    partition.bins().iter().map(|b| inst.sum_of(b)).collect()
}

/// `δ(B)`: the bin total when covered, unbounded otherwise.
fn delta(sum: Size, inst: &Instance) -> Size {
    if sum >= inst.bin_volume() {
        sum
    } else {
        Size::MAX
    }
}

/// Totals of a retained set `T` such that `T ∪ {j}` is minimal covered and
/// strictly below `cap`.
struct JoinWindow {
    b: Size,
    item: Size,
    cap: Size,
}

impl Window for JoinWindow {
    fn lo(&self) -> Size {
        self.b - self.item
    }

    fn upper(&self, min: Size) -> Size {
        self.cap.min(self.b + self.item.min(min)) - self.item
    }
}

/// Totals of a group `E` such that `B_m ∪ E` is minimal covered and the
/// source keeps more than `s(B_m)`.
struct MigrateWindow {
    b: Size,
    last_sum: Size,
    last_min: Size,
    source_sum: Size,
}

impl Window for MigrateWindow {
    fn lo(&self) -> Size {
        self.b - self.last_sum
    }

    fn upper(&self, min: Size) -> Size {
        let minimal = self.b + self.last_min.min(min) - self.last_sum;
        minimal.min(self.source_sum.saturating_sub(self.last_sum))
    }
}

/// No agent strictly gains by moving alone to another existing bin.
pub fn verify_ne(partition: &Partition, inst: &Instance) -> Result<Verdict, ModelError> {
    check_reasonable(partition, inst)?;
    let sums = bin_sums(partition, inst);
    let b = inst.bin_volume();
    for j in 0..inst.len() {
        let src = partition.bin_of(j);
        let current = delta(sums[src], inst);
        for (i, &s) in sums.iter().enumerate() {
            if i == src {
                continue;
            }
            let joined = s + inst.size(j);
            if joined >= b && joined < current {
                return Ok(Verdict::fails(Violation::Deviation(Deviation::single(j, src, i, vec![]))));
            }
        }
    }
    Ok(Verdict::holds())
}

/// Rational, and no covered agent profits from joining the uncovered bin when
/// the result is minimal covered.
pub fn verify_fne1(partition: &Partition, inst: &Instance) -> Verdict {
    let last = match rationality(partition, inst) {
        Ok(Some(last)) => last,
        Ok(None) => return Verdict::holds(),
        Err(v) => return Verdict::fails(v),
    };
    let sums = bin_sums(partition, inst);
    let b = inst.bin_volume();
    let tail = &partition.bins()[last];
    let last_min = inst.min_size_of(tail).expect("bins are non-empty");
    for j in 0..inst.len() {
        let src = partition.bin_of(j);
        if src == last {
            continue;
        }
        let a = inst.size(j);
        let joined = sums[last] + a;
        if joined >= b && joined < b + a.min(last_min) && joined < sums[src] {
            return Verdict::fails(Violation::Deviation(Deviation::single(j, src, last, vec![])));
        }
    }
    Verdict::holds()
}

/// FNE(I) with the migrating agent allowed to fire part of the uncovered bin.
pub fn verify_fne2(partition: &Partition, inst: &Instance) -> Verdict {
    let last = match rationality(partition, inst) {
        Ok(Some(last)) => last,
        Ok(None) => return Verdict::holds(),
        Err(v) => return Verdict::fails(v),
    };
    let sums = bin_sums(partition, inst);
    let pool = &partition.bins()[last];
    let strat = StratifiedSums::new(pool, inst);
    for j in 0..inst.len() {
        let src = partition.bin_of(j);
        if src == last {
            continue;
        }
        let window = JoinWindow {
            b: inst.bin_volume(),
            item: inst.size(j),
            cap: sums[src],
        };
        if strat.any(&window) {
            let fired = lex_min(pool, inst, &window, Listed::Rejected).expect("feasible window");
            return Verdict::fails(Violation::Deviation(Deviation::single(j, src, last, fired)));
        }
    }
    Verdict::holds()
}

/// Any agent may join any other bin, firing part of it, provided the new bin
/// is minimal covered and every member is strictly better off.
pub fn verify_fne3(partition: &Partition, inst: &Instance) -> Verdict {
    if let Err(v) = rationality(partition, inst) {
        return Verdict::fails(v);
    }
    let sums = bin_sums(partition, inst);
    let strats: Vec<StratifiedSums> = partition
        .bins()
        .iter()
        .map(|bin| StratifiedSums::new(bin, inst))
        .collect();
    for j in 0..inst.len() {
        let src = partition.bin_of(j);
        for (i, strat) in strats.iter().enumerate() {
            if i == src {
                continue;
            }
            let window = JoinWindow {
                b: inst.bin_volume(),
                item: inst.size(j),
                cap: delta(sums[i], inst).min(delta(sums[src], inst)),
            };
            if strat.any(&window) {
                let fired = lex_min(&partition.bins()[i], inst, &window, Listed::Rejected)
                    .expect("feasible window");
                return Verdict::fails(Violation::Deviation(Deviation::single(j, src, i, fired)));
            }
        }
    }
    Verdict::holds()
}

/// Rational, and no group leaving one covered bin for the uncovered bin makes
/// the latter minimal covered while leaving more than `s(B_m)` behind.
pub fn verify_msne(partition: &Partition, inst: &Instance) -> Verdict {
    let last = match rationality(partition, inst) {
        Ok(Some(last)) => last,
        Ok(None) => return Verdict::holds(),
        Err(v) => return Verdict::fails(v),
    };
    let sums = bin_sums(partition, inst);
    let last_min = inst
        .min_size_of(&partition.bins()[last])
        .expect("bins are non-empty");
    for (i, bin) in partition.bins().iter().enumerate() {
        if i == last {
            continue;
        }
        let window = MigrateWindow {
            b: inst.bin_volume(),
            last_sum: sums[last],
            last_min,
            source_sum: sums[i],
        };
        if StratifiedSums::new(bin, inst).any(&window) {
            let group = lex_min(bin, inst, &window, Listed::Chosen).expect("feasible window");
            return Verdict::fails(Violation::Deviation(Deviation {
                mover: None,
                source_bin: Some(i),
                target_bin: BinTarget::Existing(last),
                fired_set: Vec::new(),
                migrating_group: group,
            }));
        }
    }
    Verdict::holds()
}

/// No coalition can open a covered bin that strictly benefits all its members.
/// Checked through the suffix-minimum characterisation: with covered bins
/// sorted by total, each must be a minimum covering subset of itself plus
/// everything ranked after it (the uncovered bin included).
pub fn verify_sne(partition: &Partition, inst: &Instance) -> Result<Verdict, ModelError> {
    let last = check_reasonable(partition, inst)?;
    let sums = bin_sums(partition, inst);
    let mut ranked: Vec<usize> = (0..partition.num_bins()).filter(|&i| Some(i) != last).collect();
    ranked.sort_by_key(|&i| (sums[i], i));
    let mut suffix: Vec<usize> = last
        .map(|l| partition.bins()[l].clone())
        .unwrap_or_default();
    let mut blocking = None;
    // build suffixes from the largest bin down; keep the lowest-ranked failure
    for &k in ranked.iter().rev() {
        suffix.extend_from_slice(&partition.bins()[k]);
        let (best, coalition) =
            min_subset_at_least(&suffix, inst.bin_volume(), inst).expect("bin k itself covers b");
        if best < sums[k] {
            blocking = Some(coalition);
        }
    }
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

pub fn verify(kind: EquilibriumKind, partition: &Partition, inst: &Instance) -> Result<Verdict, ModelError> {
    Ok(match kind {
        EquilibriumKind::Ne => verify_ne(partition, inst)?,
        EquilibriumKind::Fne1 => verify_fne1(partition, inst),
        EquilibriumKind::Fne2 => verify_fne2(partition, inst),
        EquilibriumKind::Fne3 => verify_fne3(partition, inst),
        EquilibriumKind::Msne => verify_msne(partition, inst),
        EquilibriumKind::Sne => verify_sne(partition, inst)?,
    })
}
