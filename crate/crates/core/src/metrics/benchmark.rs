//! Label-correspondence-free accuracy and pair-counting precision.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::scalar::Scalar;
use crate::seed;

/// Number of document pairs drawn in sampled mode by default.
pub const DEFAULT_PAIR_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassAccuracy<G, T> {
    pub per_class: BTreeMap<G, T>,
    pub mean: T,
    pub weighted_mean: T,
}

/// For every ground-truth class, the largest share of its documents that
/// lands in a single predicted topic; averaged plainly and by class size.
///
/// Merging topics is never penalized: a single predicted topic scores 1 for
/// every class.
pub fn class_accuracy<G, P, T>(gt: &[G], pred: &[P]) -> Result<ClassAccuracy<G, T>, MetricsError>
where
    G: Ord + Clone,
    P: Eq + Hash,
    T: Scalar,
{
    check_aligned(gt.len(), pred.len())?;
    if gt.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut by_class: BTreeMap<&G, HashMap<&P, usize>> = BTreeMap::new();
    for (g, p) in gt.iter().zip(pred) {
        *by_class.entry(g).or_default().entry(p).or_insert(0) += 1;
    }
    let mut per_class = BTreeMap::new();
    let mut best_total = 0usize;
    for (class, topics) in by_class {
        let size: usize = topics.values().sum();
        let best = topics.values().copied().max().unwrap_or(0);
        best_total += best;
        per_class.insert(class.clone(), T::of(best as f64 / size as f64));
    }
    let mean = per_class.values().copied().sum::<T>() / T::of_usize(per_class.len());
    let weighted_mean = T::of(best_total as f64 / gt.len() as f64);
    Ok(ClassAccuracy { per_class, mean, weighted_mean })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    fn tally(&mut self, same_gt: bool, same_pred: bool) {
        match (same_gt, same_pred) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum PairMode {
    /// Draw `n_pairs` unordered pairs of distinct documents with replacement.
    Sampled { n_pairs: usize, seed: u64 },
    /// Enumerate every unordered pair.
    Exact,
}

impl Default for PairMode {
    fn default() -> Self {
        PairMode::Sampled { n_pairs: DEFAULT_PAIR_SAMPLES, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairScores<T> {
    pub f1: T,
    pub fmi: T,
    pub counts: PairCounts,
    /// F1 was set to 0 because its denominator vanished.
    pub f1_undefined: bool,
    /// FMI was set to 0 because `TP+FP` or `TP+FN` vanished.
    pub fmi_undefined: bool,
}

pub fn pair_counts<G: Eq, P: Eq>(gt: &[G], pred: &[P], mode: PairMode) -> Result<PairCounts, MetricsError> {
    check_aligned(gt.len(), pred.len())?;
    let n = gt.len();
    if n < 2 {
        return Err(MetricsError::TooFewDocuments { needed: 2, got: n });
    }
    let mut counts = PairCounts::default();
    match mode {
        PairMode::Exact => {
            for i in 0..n {
                for j in i + 1..n {
                    counts.tally(gt[i] == gt[j], pred[i] == pred[j]);
                }
            }
        }
        PairMode::Sampled { n_pairs, seed } => {
            let mut rng = seed::rng(seed);
            for _ in 0..n_pairs {
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                counts.tally(gt[i] == gt[j], pred[i] == pred[j]);
            }
        }
    }
    Ok(counts)
}

/// `F1 = TP / (TP + (FP+FN)/2)`, `FMI = TP / sqrt((TP+FP)(TP+FN))`.
pub fn scores_from_counts<T: Scalar>(counts: PairCounts) -> PairScores<T> {
    let tp = counts.tp as f64;
    let f1_den = tp + 0.5 * (counts.fp + counts.fn_) as f64;
    let fmi_den = ((tp + counts.fp as f64) * (tp + counts.fn_ as f64)).sqrt();
    let f1_undefined = f1_den == 0.0;
    let fmi_undefined = fmi_den == 0.0;
    PairScores {
        f1: if f1_undefined { T::zero() } else { T::of(tp / f1_den) },
        fmi: if fmi_undefined { T::zero() } else { T::of(tp / fmi_den) },
        counts,
        f1_undefined,
        fmi_undefined,
    }
}

pub fn pairwise_f1_fmi<G: Eq, P: Eq, T: Scalar>(gt: &[G], pred: &[P], mode: PairMode) -> Result<PairScores<T>, MetricsError> {
    Ok(scores_from_counts(pair_counts(gt, pred, mode)?))
}

pub(super) fn check_aligned(a: usize, b: usize) -> Result<(), MetricsError> {
    if a != b {
        return Err(MetricsError::Misaligned { gt: a, pred: b });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_hand_trace() {
        let acc: ClassAccuracy<&str, f64> = class_accuracy(&["A", "A", "B", "B"], &[1, 1, 1, 2]).unwrap();
        assert_eq!(acc.per_class["A"], 1.0);
        assert_eq!(acc.per_class["B"], 0.5);
        assert_eq!(acc.mean, 0.75);
        assert_eq!(acc.weighted_mean, 0.75);
    }

    #[test]
    fn accuracy_ignores_renaming_and_merges() {
        let acc: ClassAccuracy<&str, f64> = class_accuracy(&["A", "A", "B", "C"], &[7, 7, 3, 5]).unwrap();
        assert_eq!(acc.mean, 1.0);
        let merged: ClassAccuracy<&str, f32> = class_accuracy(&["A", "B", "B", "C"], &[0, 0, 0, 0]).unwrap();
        assert!(merged.per_class.values().all(|&v| v == 1.0));
        assert!(class_accuracy::<&str, usize, f64>(&[], &[]).is_err());
        assert!(class_accuracy::<&str, usize, f64>(&["A"], &[0, 1]).is_err());
    }

    #[test]
    fn weighted_accuracy_uses_class_sizes() {
        // A: 3 docs, best 2 -> 2/3; B: 1 doc -> 1.
        let acc: ClassAccuracy<&str, f64> = class_accuracy(&["A", "A", "A", "B"], &[0, 0, 1, 1]).unwrap();
        assert!((acc.mean - (2.0 / 3.0 + 1.0) / 2.0).abs() < 1e-15);
        assert_eq!(acc.weighted_mean, 0.75);
    }

    #[test]
    fn exact_pairs_identical_partitions() {
        let s: PairScores<f64> = pairwise_f1_fmi(&["A", "A", "B", "B"], &[0, 0, 1, 1], PairMode::Exact).unwrap();
        assert_eq!(s.counts, PairCounts { tp: 2, tn: 4, fp: 0, fn_: 0 });
        assert_eq!((s.f1, s.fmi), (1.0, 1.0));
    }

    #[test]
    fn exact_pairs_single_cluster() {
        let s: PairScores<f64> = pairwise_f1_fmi(&["A", "A", "B", "B"], &[1, 1, 1, 1], PairMode::Exact).unwrap();
        assert_eq!(s.counts, PairCounts { tp: 2, tn: 0, fp: 4, fn_: 0 });
        assert_eq!(s.f1, 0.5);
        assert!((s.fmi - 2.0 / 12f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_denominators_give_zero() {
        let s: PairScores<f64> = pairwise_f1_fmi(&["A", "B", "C"], &[0, 1, 2], PairMode::Exact).unwrap();
        assert_eq!(s.counts.tp, 0);
        assert!(s.fmi_undefined && s.f1_undefined);
        assert_eq!((s.f1, s.fmi), (0.0, 0.0));
        assert!(pairwise_f1_fmi::<_, _, f64>(&["A"], &[0], PairMode::Exact).is_err());
    }

    #[test]
    fn sampled_draws_requested_pairs() {
        let gt: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let c = pair_counts(&gt, &gt, PairMode::Sampled { n_pairs: 500, seed: 3 }).unwrap();
        assert_eq!(c.total(), 500);
        assert_eq!(c.fp + c.fn_, 0);
        assert_eq!(c, pair_counts(&gt, &gt, PairMode::Sampled { n_pairs: 500, seed: 3 }).unwrap());
    }
}
