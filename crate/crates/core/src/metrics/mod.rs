//! Benchmark, cluster and topic metrics, and the run impact score.

pub mod benchmark;
pub mod cluster;
pub mod topic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use benchmark::{class_accuracy, pair_counts, pairwise_f1_fmi, ClassAccuracy, PairCounts, PairMode, PairScores};
pub use cluster::{homogeneity_completeness_v, silhouette, HomogeneityCompleteness, SparseVector};
pub use topic::{topic_distances, TopicDistanceSummary, TopicDistances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no documents to evaluate")]
    Empty,
    #[error("need at least {needed} documents, got {got}")]
    TooFewDocuments { needed: usize, got: usize },
    #[error("label vectors differ in length ({gt} vs {pred})")]
    Misaligned { gt: usize, pred: usize },
    #[error("silhouette undefined: fewer than two clusters")]
    SilhouetteUndefined,
    #[error("metric {0} undefined for the baseline run")]
    BaselineUndefined(&'static str),
}

/// Number of scalar metrics entering the impact score.
pub const M: usize = 8;

/// Column names, in vector order.
pub const METRIC_NAMES: [&str; M] = [
    "accuracy_mean",
    "accuracy_weighted",
    "f1",
    "fmi",
    "homogeneity",
    "completeness",
    "v_measure",
    "silhouette_rescaled",
];

/// The eight scalar run metrics, each in [0, 1].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsVector<T = f64> {
    pub accuracy_mean: T,
    pub accuracy_weighted: T,
    pub f1: T,
    pub fmi: T,
    pub homogeneity: T,
    pub completeness: T,
    pub v_measure: T,
    /// `(silhouette + 1) / 2`.
    pub silhouette_rescaled: T,
}

impl<T: Scalar> MetricsVector<T> {
    pub fn to_array(&self) -> [T; M] {
        [
            self.accuracy_mean,
            self.accuracy_weighted,
            self.f1,
            self.fmi,
            self.homogeneity,
            self.completeness,
            self.v_measure,
            self.silhouette_rescaled,
        ]
    }

    pub fn from_array(v: [T; M]) -> Self {
        Self {
            accuracy_mean: v[0],
            accuracy_weighted: v[1],
            f1: v[2],
            fmi: v[3],
            homogeneity: v[4],
            completeness: v[5],
            v_measure: v[6],
            silhouette_rescaled: v[7],
        }
    }
}

/// Normalized ℓ1 distance between two metric vectors: `Σ|b_i - r_i| / M`.
pub fn impact_score<T: Scalar>(baseline: &MetricsVector<T>, run: &MetricsVector<T>) -> T {
    let b = baseline.to_array();
    let r = run.to_array();
    b.iter().zip(r.iter()).map(|(&x, &y)| (x - y).abs()).sum::<T>() / T::of_usize(M)
}

/// Map a raw silhouette in [-1, 1] to [0, 1].
pub fn rescale_silhouette<T: Scalar>(s: T) -> T {
    (s + T::one()) / T::of(2.0)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub pair_mode: PairMode,
    pub silhouette_max_sample: usize,
    pub silhouette_seed: u64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            pair_mode: PairMode::default(),
            silhouette_max_sample: cluster::DEFAULT_SILHOUETTE_SAMPLE,
            silhouette_seed: 0,
        }
    }
}

/// Metric vector whose entries may have failed to compute.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialMetrics<T> {
    pub values: [Option<T>; M],
    /// Human-readable notes on undefined or failed metrics.
    pub notes: Vec<String>,
}

impl<T: Scalar> PartialMetrics<T> {
    /// Fill failed entries from `baseline` so they contribute nothing to the
    /// impact score. Returns the names of the imputed metrics.
    pub fn impute(&self, baseline: &MetricsVector<T>) -> (MetricsVector<T>, Vec<String>) {
        let base = baseline.to_array();
        let mut out = base;
        let mut imputed = Vec::new();
        for i in 0..M {
            match self.values[i] {
                Some(v) => out[i] = v,
                None => imputed.push(METRIC_NAMES[i].to_string()),
            }
        }
        (MetricsVector::from_array(out), imputed)
    }

    /// Every metric must be defined; used for the baseline itself.
    pub fn complete(&self) -> Result<MetricsVector<T>, MetricsError> {
        let mut out = [T::zero(); M];
        for i in 0..M {
            out[i] = self.values[i].ok_or(MetricsError::BaselineUndefined(METRIC_NAMES[i]))?;
        }
        Ok(MetricsVector::from_array(out))
    }
}

/// Score a run.
///
/// `gt` and `pred` are aligned over the documents that have a reference
/// label; `features` and `feature_topics` cover every document of the run.
pub fn evaluate<G, T>(
    gt: &[G],
    pred: &[usize],
    features: &[SparseVector<'_, T>],
    feature_topics: &[usize],
    settings: &EvalSettings,
) -> PartialMetrics<T>
where
    G: Ord + Clone + std::hash::Hash,
    T: Scalar,
{
    let mut values: [Option<T>; M] = [None; M];
    let mut notes = Vec::new();

    match class_accuracy::<G, usize, T>(gt, pred) {
        Ok(acc) => {
            values[0] = Some(acc.mean);
            values[1] = Some(acc.weighted_mean);
        }
        Err(e) => notes.push(format!("accuracy: {e}")),
    }
    match pairwise_f1_fmi::<G, usize, T>(gt, pred, settings.pair_mode) {
        Ok(s) => {
            if s.f1_undefined {
                notes.push("f1: zero denominator, set to 0".into());
            }
            if s.fmi_undefined {
                notes.push("fmi: zero denominator, set to 0".into());
            }
            values[2] = Some(s.f1);
            values[3] = Some(s.fmi);
        }
        Err(e) => notes.push(format!("pairwise: {e}")),
    }
    match homogeneity_completeness_v::<G, usize, T>(gt, pred) {
        Ok(h) => {
            values[4] = Some(h.homogeneity);
            values[5] = Some(h.completeness);
            values[6] = Some(h.v_measure);
        }
        Err(e) => notes.push(format!("homogeneity: {e}")),
    }
    match silhouette(features, feature_topics, settings.silhouette_max_sample, settings.silhouette_seed) {
        Ok(s) => values[7] = Some(rescale_silhouette(s)),
        Err(e) => notes.push(format!("silhouette: {e}")),
    }
    PartialMetrics { values, notes }
}
