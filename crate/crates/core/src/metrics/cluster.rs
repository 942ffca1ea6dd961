//! Entropy-based cluster agreement and the silhouette coefficient.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use rand::seq::index::sample;

use super::benchmark::check_aligned;
use super::MetricsError;
use crate::scalar::Scalar;
use crate::seed;

/// Default cap on documents used for the silhouette coefficient.
pub const DEFAULT_SILHOUETTE_SAMPLE: usize = 2_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomogeneityCompleteness<T> {
    pub homogeneity: T,
    pub completeness: T,
    pub v_measure: T,
}

/// Counts are summed in sorted order so the result does not depend on how
/// the labels are named.
fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    let mut counts: Vec<usize> = counts.collect();
    counts.sort_unstable();
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Homogeneity `1 - H(gt|pred)/H(gt)`, completeness `1 - H(pred|gt)/H(pred)`
/// and their harmonic mean, from the empirical joint distribution (natural
/// log). Each ratio is taken as 1 when its normalizing entropy is zero.
pub fn homogeneity_completeness_v<G, P, T>(gt: &[G], pred: &[P]) -> Result<HomogeneityCompleteness<T>, MetricsError>
where
    G: Eq + Hash,
    P: Eq + Hash,
    T: Scalar,
{
    check_aligned(gt.len(), pred.len())?;
    if gt.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = gt.len() as f64;
    let mut joint: HashMap<(&G, &P), usize> = HashMap::new();
    let mut gt_counts: HashMap<&G, usize> = HashMap::new();
    let mut pred_counts: HashMap<&P, usize> = HashMap::new();
    for (g, p) in gt.iter().zip(pred) {
        *joint.entry((g, p)).or_insert(0) += 1;
        *gt_counts.entry(g).or_insert(0) += 1;
        *pred_counts.entry(p).or_insert(0) += 1;
    }
    let h_gt = entropy(gt_counts.values().copied(), n);
    let h_pred = entropy(pred_counts.values().copied(), n);
    // H(gt|pred) = H(gt,pred) - H(pred)
    let h_joint = entropy(joint.values().copied(), n);
    let h_gt_given_pred = (h_joint - h_pred).max(0.0);
    let h_pred_given_gt = (h_joint - h_gt).max(0.0);

    let homogeneity = if h_gt == 0.0 { 1.0 } else { 1.0 - h_gt_given_pred / h_gt };
    let completeness = if h_pred == 0.0 { 1.0 } else { 1.0 - h_pred_given_gt / h_pred };
    let v = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    Ok(HomogeneityCompleteness { homogeneity: T::of(homogeneity), completeness: T::of(completeness), v_measure: T::of(v) })
}

/// Borrowed sparse vector with sorted indices.
#[derive(Clone, Copy, Debug)]
pub struct SparseVector<'a, T> {
    pub indices: &'a [usize],
    pub values: &'a [T],
}

impl<T: Scalar> SparseVector<'_, T> {
    fn dot(&self, other: &Self) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i].as_f64() * other.values[j].as_f64();
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.as_f64().powi(2)).sum::<f64>().sqrt()
    }
}

/// Mean silhouette `(b - a) / max(a, b)` under cosine distance.
///
/// When there are more than `max_sample` documents, a uniform subsample of
/// that size (chosen with `seed`, independent of the labels) is scored
/// against itself. Members of singleton clusters score 0.
pub fn silhouette<T: Scalar>(
    features: &[SparseVector<'_, T>],
    labels: &[usize],
    max_sample: usize,
    seed: u64,
) -> Result<T, MetricsError> {
    check_aligned(features.len(), labels.len())?;
    let n = features.len();
    let chosen: Vec<usize> = if n > max_sample {
        let mut idx = sample(&mut seed::rng(seed), n, max_sample).into_vec();
        idx.sort_unstable();
        idx
    } else {
        (0..n).collect()
    };
    let mut cluster_ids: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in &chosen {
        let next = cluster_ids.len();
        cluster_ids.entry(labels[i]).or_insert(next);
    }
    if cluster_ids.len() < 2 {
        return Err(MetricsError::SilhouetteUndefined);
    }
    let m = chosen.len();
    let c = cluster_ids.len();
    let cluster: Vec<usize> = chosen.iter().map(|&i| cluster_ids[&labels[i]]).collect();
    let mut size = vec![0usize; c];
    for &k in &cluster {
        size[k] += 1;
    }
    let norms: Vec<f64> = chosen.iter().map(|&i| features[i].norm()).collect();

    // sums[i * c + k] = total distance from sampled doc i to cluster k.
    let mut sums = vec![0.0f64; m * c];
    for a in 0..m {
        for b in a + 1..m {
            let denom = norms[a] * norms[b];
            let sim = if denom > 0.0 { features[chosen[a]].dot(&features[chosen[b]]) / denom } else { 0.0 };
            let d = (1.0 - sim).max(0.0);
            sums[a * c + cluster[b]] += d;
            sums[b * c + cluster[a]] += d;
        }
    }

    let mut total = 0.0;
    for i in 0..m {
        let own = cluster[i];
        if size[own] <= 1 {
            continue;
        }
        let a = sums[i * c + own] / (size[own] - 1) as f64;
        let b = (0..c)
            .filter(|&k| k != own && size[k] > 0)
            .map(|k| sums[i * c + k] / size[k] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(T::of(total / m as f64))
}
