//! Pairwise divergence and similarity between topic-term distributions.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Additive smoothing applied before KL so that zero entries stay finite.
pub const KL_EPSILON: f64 = 1e-12;

/// K×K matrices over the rows of phi.
#[derive(Clone, Debug, PartialEq)]
pub struct TopicDistances<T = f64> {
    /// `KL(phi_i || phi_j)`, natural log, asymmetric.
    pub kl: Array2<T>,
    /// `1 - JSD(phi_i, phi_j)` with base-2 JSD, in [0, 1].
    pub js: Array2<T>,
    pub cosine: Array2<T>,
}

/// Mean off-diagonal entries of each matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TopicDistanceSummary {
    pub mean_kl: f64,
    pub mean_js: f64,
    pub mean_cosine: f64,
}

fn smoothed(p: ArrayView1<'_, f64>) -> Vec<f64> {
    let total = p.sum() + KL_EPSILON * p.len() as f64;
    p.iter().map(|&x| (x + KL_EPSILON) / total).collect()
}

pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a / b).ln())
        .sum::<f64>()
        .max(0.0)
}

/// Jensen-Shannon divergence in bits.
pub fn js_divergence(p: &[f64], q: &[f64]) -> f64 {
    let half_kl = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &y)| x * (2.0 * x / (x + y)).log2())
            .sum::<f64>()
    };
    (0.5 * half_kl(p, q) + 0.5 * half_kl(q, p)).clamp(0.0, 1.0)
}

pub fn cosine_similarity(p: &[f64], q: &[f64]) -> f64 {
    let dot: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
    let np = p.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nq = q.iter().map(|a| a * a).sum::<f64>().sqrt();
    if np == 0.0 || nq == 0.0 {
        0.0
    } else {
        (dot / (np * nq)).clamp(0.0, 1.0)
    }
}

pub fn topic_distances<T: Scalar>(phi: &Array2<T>) -> TopicDistances<T> {
    let k = phi.nrows();
    let rows: Vec<Vec<f64>> = phi.rows().into_iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect();
    let smooth: Vec<Vec<f64>> = rows.iter().map(|r| smoothed(ArrayView1::from(r.as_slice()))).collect();
    let mut kl = Array2::zeros((k, k));
    let mut js = Array2::zeros((k, k));
    let mut cosine = Array2::zeros((k, k));
    for i in 0..k {
        js[[i, i]] = T::one();
        cosine[[i, i]] = T::one();
        for j in 0..k {
            if i != j {
                kl[[i, j]] = T::of(kl_divergence(&smooth[i], &smooth[j]));
            }
        }
        for j in i + 1..k {
            let s = T::of(1.0 - js_divergence(&rows[i], &rows[j]));
            js[[i, j]] = s;
            js[[j, i]] = s;
            let c = T::of(cosine_similarity(&rows[i], &rows[j]));
            cosine[[i, j]] = c;
            cosine[[j, i]] = c;
        }
    }
    TopicDistances { kl, js, cosine }
}

impl<T: Scalar> TopicDistances<T> {
    pub fn summary(&self) -> TopicDistanceSummary {
        let k = self.kl.nrows();
        if k < 2 {
            return TopicDistanceSummary::default();
        }
        let off = |m: &Array2<T>| {
            let total: f64 = m.indexed_iter().filter(|((i, j), _)| i != j).map(|(_, v)| v.as_f64()).sum();
            total / (k * (k - 1)) as f64
        };
        TopicDistanceSummary { mean_kl: off(&self.kl), mean_js: off(&self.js), mean_cosine: off(&self.cosine) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identical_rows() {
        let d = topic_distances::<f64>(&array![[0.3, 0.7], [0.3, 0.7]]);
        assert!(d.kl[[0, 1]].abs() < 1e-12);
        assert!((d.js[[0, 1]] - 1.0).abs() < 1e-12);
        assert!((d.cosine[[0, 1]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_rows() {
        let d = topic_distances::<f64>(&array![[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5]]);
        assert!(d.js[[0, 1]].abs() < 1e-12);
        assert_eq!(d.cosine[[0, 1]], 0.0);
        assert!(d.kl[[0, 1]] > 20.0);
    }

    #[test]
    fn kl_worked_example() {
        let d = topic_distances::<f64>(&array![[0.5, 0.5], [0.9, 0.1]]);
        let expected = 0.5 * (0.5f64 / 0.9).ln() + 0.5 * (0.5f64 / 0.1).ln();
        assert!((expected - 0.5108).abs() < 1e-4);
        assert!((d.kl[[0, 1]] - expected).abs() < 1e-9);
        assert_ne!(d.kl[[0, 1]], d.kl[[1, 0]]);
        assert_eq!(d.kl[[0, 0]], 0.0);
        assert_eq!(d.js[[0, 1]], d.js[[1, 0]]);
    }

    #[test]
    fn summary_means() {
        let d = topic_distances(&array![[0.5f32, 0.5], [0.5, 0.5]]);
        let s = d.summary();
        assert!((s.mean_js - 1.0).abs() < 1e-6);
        assert!((s.mean_cosine - 1.0).abs() < 1e-6);
    }
}
