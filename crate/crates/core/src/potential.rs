//! The vector-valued potential over reasonable partitions.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::{check_reasonable, Instance, ModelError, Partition, Size};

/// Covered-bin totals sorted non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PotentialVector(Vec<Size>);

impl PotentialVector {
    pub fn from_sizes(mut values: Vec<Size>) -> Self {
        values.sort_unstable();
        Self(values)
    }

    pub fn values(&self) -> &[Size] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ≺ other`: the first differing position within the common prefix
    /// holds a smaller value. Vectors agreeing on the whole common prefix are
    /// incomparable, whatever their lengths.
    pub fn lex_less(&self, other: &Self) -> bool {
        lex_less(self, other)
    }
}

pub fn lex_less(v: &PotentialVector, w: &PotentialVector) -> bool {
    v.0.iter()
        .zip(&w.0)
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x < y)
}

/// Partial order matching [`lex_less`]; `None` for distinct vectors that agree
/// on their common prefix.
impl PartialOrd for PotentialVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            Some(Ordering::Equal)
        } else if lex_less(self, other) {
            Some(Ordering::Less)
        } else if lex_less(other, self) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

/// Sizes of every covered bin, sorted. The uncovered bin is excluded.
pub fn potential(partition: &Partition, inst: &Instance) -> Result<PotentialVector, ModelError> {
    check_reasonable(partition, inst)?;
    Ok(covered_sizes(partition.bins(), inst))
}

pub(crate) fn covered_sizes(bins: &[Vec<usize>], inst: &Instance) -> PotentialVector {
    PotentialVector::from_sizes(
        bins.iter()
            .map(|b| inst.sum_of(b))
            .filter(|&s| s >= inst.bin_volume())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(v: &[Size]) -> PotentialVector {
        PotentialVector(v.to_vec())
    }

    #[test]
    fn sorted_covered_sizes() {
        // covered bins 8, 6, 6 plus an uncovered bin of 3
        let inst = Instance::new(vec![4, 4, 3, 3, 5, 1, 3], 6).unwrap();
        let p = Partition::new(vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6]], 7).unwrap();
        assert_eq!(potential(&p, &inst).unwrap(), pv(&[6, 6, 8]));

        let inst = Instance::new(vec![3, 3], 6).unwrap();
        assert_eq!(potential(&Partition::grand_coalition(2), &inst).unwrap(), pv(&[6]));

        let inst = Instance::new(vec![1, 2], 6).unwrap();
        assert!(potential(&Partition::grand_coalition(2), &inst).unwrap().is_empty());
    }

    #[test]
    fn rejects_unreasonable() {
        let inst = Instance::new(vec![1, 2], 6).unwrap();
        let p = Partition::new(vec![vec![0], vec![1]], 2).unwrap();
        assert_eq!(potential(&p, &inst), Err(ModelError::NotReasonable { uncovered: 2 }));
    }

    #[test]
    fn lex_examples() {
        assert!(lex_less(&pv(&[6, 6, 8]), &pv(&[6, 7, 7])));
        assert!(!lex_less(&pv(&[6, 6, 8]), &pv(&[6, 6, 8])));
        assert!(!lex_less(&pv(&[5]), &pv(&[5, 9])));
        assert!(!lex_less(&pv(&[5, 9]), &pv(&[5])));
        assert_eq!(pv(&[5]).partial_cmp(&pv(&[5, 9])), None);
        assert!(pv(&[1, 9]) < pv(&[2]));
    }

    fn vec_strategy() -> impl Strategy<Value = PotentialVector> {
        prop::collection::vec(0u64..4, 0..5).prop_map(PotentialVector::from_sizes)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn lex_less_is_strict_partial_order(u in vec_strategy(), v in vec_strategy(), w in vec_strategy()) {
            prop_assert!(!lex_less(&u, &u));
            if lex_less(&u, &v) {
                prop_assert!(!lex_less(&v, &u));
                if lex_less(&v, &w) {
                    prop_assert!(lex_less(&u, &w));
                }
            }
        }
    }
}
