//! Exhaustive ground truth for small instances: partition enumeration,
//! optimal welfare, equilibrium sets and per-instance PoA/PoS.

pub mod exhaustive;

use std::collections::BTreeMap;

use num_rational::Ratio;
use thiserror::Error;

use crate::equilibria::EquilibriumKind;
use crate::model::{is_rational, social_welfare, Instance, ModelError, Partition, Size};

pub use exhaustive::exhaustive_verify;

/// Default largest `n` the oracle enumerates (Bell(12) ≈ 4.2M partitions).
pub const DEFAULT_CAP: usize = 12;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "SBC_ORACLE_CAP";

/// Example partitions kept per equilibrium kind in a report.
pub const REPORT_EXAMPLES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {n} items, above the enumeration cap of {cap}; the oracle is desk-scale only (set {CAP_ENV} to raise it)")]
    OverCap { n: usize, cap: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Cap from `SBC_ORACLE_CAP`, falling back to [`DEFAULT_CAP`].
pub fn cap_from_env() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restrict {
    All,
    Reasonable,
    Rational,
}

fn check_cap(inst: &Instance, cap: usize) -> Result<(), OracleError> {
    if inst.len() > cap {
        Err(OracleError::OverCap { n: inst.len(), cap })
    } else {
        Ok(())
    }
}

/// Calls `visit` once per set partition of the items, in restricted-growth
/// string order, keeping those that pass `restrict`. Branches that already
/// force two uncovered bins are pruned for the restricted modes.
pub fn visit_partitions(
    inst: &Instance,
    restrict: Restrict,
    cap: usize,
    mut visit: impl FnMut(&Partition),
) -> Result<(), OracleError> {
    check_cap(inst, cap)?;
    let n = inst.len();
    let mut suffix = vec![0; n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] + inst.size(j);
    }
    let mut labels = vec![0usize; n];
    let mut sums: Vec<Size> = Vec::with_capacity(n);
    fn walk(
        pos: usize,
        inst: &Instance,
        restrict: Restrict,
        suffix: &[Size],
        labels: &mut [usize],
        sums: &mut Vec<Size>,
        visit: &mut dyn FnMut(&Partition),
    ) {
        let b = inst.bin_volume();
        if restrict != Restrict::All {
            let doomed = sums.iter().filter(|&&s| s + suffix[pos] < b).count();
            if doomed >= 2 {
                return;
            }
        }
        if pos == labels.len() {
            let p = Partition::from_labels(labels);
            let keep = match restrict {
                Restrict::All => true,
                Restrict::Reasonable => sums.iter().filter(|&&s| s < b).count() <= 1,
                Restrict::Rational => is_rational(&p, inst),
            };
            if keep {
                visit(&p);
            }
            return;
        }
        let a = inst.size(pos);
        for label in 0..=sums.len() {
            labels[pos] = label;
            if label == sums.len() {
                sums.push(a);
                walk(pos + 1, inst, restrict, suffix, labels, sums, visit);
                sums.pop();
            } else {
                sums[label] += a;
                walk(pos + 1, inst, restrict, suffix, labels, sums, visit);
                sums[label] -= a;
            }
        }
    }
    walk(0, inst, restrict, &suffix, &mut labels, &mut sums, &mut visit);
    Ok(())
}

pub fn enumerate_partitions(inst: &Instance, restrict: Restrict, cap: usize) -> Result<Vec<Partition>, OracleError> {
    let mut out = Vec::new();
    visit_partitions(inst, restrict, cap, |p| out.push(p.clone()))?;
    Ok(out)
}

/// Maximum number of covered bins. Every partition can be merged into a
/// reasonable one of equal welfare, so only those are searched.
pub fn optimal_welfare(inst: &Instance, cap: usize) -> Result<usize, OracleError> {
    if inst.total_size() < inst.bin_volume() {
        return Ok(0);
    }
    let mut best = 0;
    visit_partitions(inst, Restrict::Reasonable, cap, |p| best = best.max(social_welfare(p, inst)))?;
    Ok(best)
}

/// All partitions passing the exhaustive verifier of `kind`.
pub fn enumerate_equilibria(
    inst: &Instance,
    kind: EquilibriumKind,
    cap: usize,
) -> Result<Vec<Partition>, OracleError> {
    let mut out = Vec::new();
    let mut failure = None;
    visit_partitions(inst, Restrict::Reasonable, cap, |p| {
        if failure.is_some() {
            return;
        }
        match exhaustive_verify(kind, p, inst) {
            Ok(v) if v.holds => out.push(p.clone()),
            Ok(_) => {}
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindSummary {
    pub kind: EquilibriumKind,
    pub count: usize,
    pub min_welfare: Option<usize>,
    pub max_welfare: Option<usize>,
    pub examples: Vec<Partition>,
    /// Worst equilibrium welfare over the optimum.
    pub poa: Option<Ratio<u64>>,
    /// Best equilibrium welfare over the optimum.
    pub pos: Option<Ratio<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceReport {
    pub opt_welfare: usize,
    pub kinds: Vec<KindSummary>,
}

impl InstanceReport {
    pub fn kind(&self, kind: EquilibriumKind) -> Option<&KindSummary> {
        self.kinds.iter().find(|k| k.kind == kind)
    }
}

/// One enumeration pass over reasonable partitions, judging each with the
/// exhaustive verifiers of every requested kind.
pub fn report(inst: &Instance, kinds: &[EquilibriumKind], cap: usize) -> Result<InstanceReport, OracleError> {
    let mut opt = 0;
    let mut acc: BTreeMap<EquilibriumKind, KindSummary> = kinds
        .iter()
        .map(|&kind| {
            (
                kind,
                KindSummary {
                    kind,
                    count: 0,
                    min_welfare: None,
                    max_welfare: None,
                    examples: Vec::new(),
                    poa: None,
                    pos: None,
                },
            )
        })
        .collect();
    let mut failure = None;
    visit_partitions(inst, Restrict::Reasonable, cap, |p| {
        let w = social_welfare(p, inst);
        opt = opt.max(w);
        for summary in acc.values_mut() {
            match exhaustive_verify(summary.kind, p, inst) {
                Ok(v) if v.holds => {
                    summary.count += 1;
                    summary.min_welfare = Some(summary.min_welfare.map_or(w, |m| m.min(w)));
                    summary.max_welfare = Some(summary.max_welfare.map_or(w, |m| m.max(w)));
                    if summary.examples.len() < REPORT_EXAMPLES {
                        summary.examples.push(p.clone());
                    }
                }
                Ok(_) => {}
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let ratio = |w: Option<usize>| match (w, opt) {
        (Some(w), opt) if opt > 0 => Some(Ratio::new(w as u64, opt as u64)),
        _ => None,
    };
    let kinds = kinds
        .iter()
        .map(|k| {
            let mut s = acc.remove(k).expect("seeded");
            s.poa = ratio(s.min_welfare);
            s.pos = ratio(s.max_welfare);
            s
        })
        .collect();
    Ok(InstanceReport {
        opt_welfare: opt,
        kinds,
    })
}
