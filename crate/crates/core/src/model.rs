//! LDA by collapsed Gibbs sampling, hard topic assignment and top-k
//! summaries.

use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::DocumentTermMatrix;
use crate::scalar::{argmax, Scalar};
use crate::seed::{self, digest_of};

pub const DEFAULT_ITERATIONS: usize = 500;
/// Number of topics when no ground-truth labels are available.
pub const DEFAULT_TOPICS: usize = 10;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("document-term matrix is empty")]
    EmptyMatrix,
    #[error("{k} topics requested for {n} documents")]
    TooManyTopics { k: usize, n: usize },
    #[error("invalid LDA config: {0}")]
    Config(String),
    #[error("topic {topic} out of range for {k} topics")]
    TopicOutOfRange { topic: usize, k: usize },
    #[error("cannot access model file {path}: {message}")]
    File { path: PathBuf, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// Symmetric priors `alpha = beta = 1/k`, 500 sweeps.
    pub fn new(k: usize, seed: u64) -> Self {
        let prior = 1.0 / k.max(1) as f64;
        Self { k, alpha: prior, beta: prior, iterations: DEFAULT_ITERATIONS, seed }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::Config(m));
        if self.k < 1 {
            return bad("k must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1".into());
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        digest_of(self)
    }
}

/// LDA settings as written in a plan; unset priors default to `1/k` for
/// whatever `k` a run ends up using.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdaSettings {
    /// Number of topics; derived from the label count when unset.
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub iterations: usize,
    /// Sampler seed; the harness derives one from the master seed when unset.
    pub seed: Option<u64>,
}

impl Default for LdaSettings {
    fn default() -> Self {
        Self { k: None, alpha: None, beta: None, iterations: DEFAULT_ITERATIONS, seed: None }
    }
}

impl LdaSettings {
    pub fn resolve(&self, k: usize) -> LdaConfig {
        let base = LdaConfig::new(k, self.seed.unwrap_or(0));
        LdaConfig {
            alpha: self.alpha.unwrap_or(base.alpha),
            beta: self.beta.unwrap_or(base.beta),
            iterations: self.iterations,
            ..base
        }
    }
}

/// Posterior estimates of a trained model.
///
/// `theta` is documents × topics, `phi` topics × terms; every row of both is
/// a probability distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct TopicModel<T = f64> {
    pub doc_ids: Vec<String>,
    pub terms: Vec<String>,
    pub theta: Array2<T>,
    pub phi: Array2<T>,
    pub config: LdaConfig,
}

impl<T: Scalar> TopicModel<T> {
    pub fn n_topics(&self) -> usize {
        self.theta.ncols()
    }

    pub fn n_docs(&self) -> usize {
        self.theta.nrows()
    }
}

/// Hard assignment of each model document to one topic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub doc_ids: Vec<String>,
    pub topic_of: Vec<usize>,
    pub n_topics: usize,
}

impl Assignment {
    pub fn len(&self) -> usize {
        self.topic_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topic_of.is_empty()
    }

    /// Number of documents assigned to each topic.
    pub fn topic_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_topics];
        for &t in &self.topic_of {
            sizes[t] += 1;
        }
        sizes
    }

    pub fn members(&self, topic: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.topic_of[i] == topic).collect()
    }
}

/// Sum in four interleaved lanes; fixed order, so still deterministic.
fn lane_sum(xs: &[f64]) -> f64 {
    let mut lanes = [0.0f64; 4];
    let chunks = xs.chunks_exact(4);
    let tail: f64 = chunks.remainder().iter().sum();
    for c in chunks {
        for j in 0..4 {
            lanes[j] += c[j];
        }
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
}

/// Train LDA with a seeded collapsed Gibbs sampler over the integer counts.
///
/// Documents are visited in lexicographic id order, tokens within a
/// document in column order, so the result depends only on the matrix
/// contents and the config, not on row order. Estimates come from the final
/// sampler state: `theta[d,t] ∝ n_dt + alpha`, `phi[t,w] ∝ n_tw + beta`.
pub fn train_lda<T: Scalar>(dtm: &DocumentTermMatrix<T>, config: &LdaConfig) -> Result<TopicModel<T>, ModelError> {
    config.validate()?;
    let n = dtm.n_docs();
    if n == 0 || dtm.n_terms() == 0 {
        return Err(ModelError::EmptyMatrix);
    }
    if config.k > n {
        return Err(ModelError::TooManyTopics { k: config.k, n });
    }
    let k = config.k;
    let v = dtm.n_terms();
    let (alpha, beta) = (config.alpha, config.beta);
    let v_beta = v as f64 * beta;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dtm.rows()[a].cmp(&dtm.rows()[b]));

    let words: Vec<Vec<u32>> = (0..n)
        .map(|d| {
            let row = dtm.row(d);
            row.columns
                .iter()
                .zip(row.counts)
                .flat_map(|(&c, &count)| std::iter::repeat_n(c as u32, count as usize))
                .collect()
        })
        .collect();

    // Counts are kept as f64 (exact for integers) so the inner loop needs
    // no conversions.
    let mut rng = seed::rng(config.seed);
    let mut doc_topic = vec![0.0f64; n * k];
    let mut word_topic = vec![0.0f64; v * k];
    let mut topic_total = vec![0.0f64; k];
    let mut z: Vec<Vec<u32>> = words.iter().map(|w| vec![0; w.len()]).collect();

    for &d in &order {
        for (i, &w) in words[d].iter().enumerate() {
            let t = rng.random_range(0..k);
            z[d][i] = t as u32;
            doc_topic[d * k + t] += 1.0;
            word_topic[w as usize * k + t] += 1.0;
            topic_total[t] += 1.0;
        }
    }

    let mut weight = vec![0.0f64; k];
    // 1 / (n_t + V*beta), refreshed only for the two topics a move touches.
    let mut inv_total: Vec<f64> = topic_total.iter().map(|&c| 1.0 / (c + v_beta)).collect();
    for _ in 0..config.iterations {
        for &d in &order {
            let dt = &mut doc_topic[d * k..(d + 1) * k];
            for (i, &w) in words[d].iter().enumerate() {
                let wt = &mut word_topic[w as usize * k..(w as usize + 1) * k];
                let old = z[d][i] as usize;
                dt[old] -= 1.0;
                wt[old] -= 1.0;
                topic_total[old] -= 1.0;
                inv_total[old] = 1.0 / (topic_total[old] + v_beta);

                for (((p, &a), &b), &inv) in weight.iter_mut().zip(dt.iter()).zip(wt.iter()).zip(&inv_total) {
                    *p = (a + alpha) * (b + beta) * inv;
                }
                let mut u = rng.random::<f64>() * lane_sum(&weight);
                let mut new = k - 1;
                for (t, &p) in weight.iter().enumerate() {
                    u -= p;
                    if u < 0.0 {
                        new = t;
                        break;
                    }
                }

                z[d][i] = new as u32;
                dt[new] += 1.0;
                wt[new] += 1.0;
                topic_total[new] += 1.0;
                inv_total[new] = 1.0 / (topic_total[new] + v_beta);
            }
        }
    }

    let mut theta = Array2::<T>::zeros((n, k));
    for d in 0..n {
        let row: Vec<f64> = (0..k).map(|t| doc_topic[d * k + t] + alpha).collect();
        let total: f64 = row.iter().sum();
        for t in 0..k {
            theta[[d, t]] = T::of(row[t] / total);
        }
    }
    let mut phi = Array2::<T>::zeros((k, v));
    for t in 0..k {
        let total = topic_total[t] + v_beta;
        for w in 0..v {
            phi[[t, w]] = T::of((word_topic[w * k + t] + beta) / total);
        }
    }

    Ok(TopicModel {
        doc_ids: dtm.rows().to_vec(),
        terms: dtm.vocab().terms().to_vec(),
        theta,
        phi,
        config: config.clone(),
    })
}

/// Argmax of each theta row, lowest topic index on ties.
pub fn assign_topics<T: Scalar>(model: &TopicModel<T>) -> Assignment {
    let topic_of = model
        .theta
        .rows()
        .into_iter()
        .map(|row| argmax(&row.to_vec()).unwrap_or(0))
        .collect();
    Assignment { doc_ids: model.doc_ids.clone(), topic_of, n_topics: model.n_topics() }
}

fn ranked<T: Scalar>(values: impl Iterator<Item = T>, n: usize) -> Vec<(usize, T)> {
    let mut items: Vec<(usize, T)> = values.enumerate().collect();
    // Stable sort: equal values keep index order.
    items.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
    items.truncate(n);
    items
}

/// The `n` most probable terms of `topic`, descending; ties in term order
/// (terms are stored sorted, so lexicographic).
pub fn top_terms<T: Scalar>(model: &TopicModel<T>, topic: usize, n: usize) -> Result<Vec<(String, T)>, ModelError> {
    if topic >= model.n_topics() {
        return Err(ModelError::TopicOutOfRange { topic, k: model.n_topics() });
    }
    Ok(ranked(model.phi.row(topic).iter().copied(), n)
        .into_iter()
        .map(|(w, p)| (model.terms[w].clone(), p))
        .collect())
}

/// The `n` documents with the highest membership in `topic`; ties in
/// document order.
pub fn top_documents<T: Scalar>(model: &TopicModel<T>, topic: usize, n: usize) -> Result<Vec<(String, T)>, ModelError> {
    if topic >= model.n_topics() {
        return Err(ModelError::TopicOutOfRange { topic, k: model.n_topics() });
    }
    Ok(ranked(model.theta.column(topic).iter().copied(), n)
        .into_iter()
        .map(|(d, p)| (model.doc_ids[d].clone(), p))
        .collect())
}

/// Round to six significant digits.
fn six_digits(x: f64) -> f64 {
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// On-disk form of a [`TopicModel`]: nonzero entries as `(row, col, value)`
/// triplets at six significant digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub config: LdaConfig,
    pub config_digest: String,
    pub doc_ids: Vec<String>,
    pub terms: Vec<String>,
    pub n_topics: usize,
    pub theta: Vec<(u32, u32, f64)>,
    pub phi: Vec<(u32, u32, f64)>,
}

fn triplets<T: Scalar>(m: &Array2<T>) -> Vec<(u32, u32, f64)> {
    m.indexed_iter()
        .filter(|(_, v)| **v != T::zero())
        .map(|((r, c), v)| (r as u32, c as u32, six_digits(v.as_f64())))
        .collect()
}

fn dense<T: Scalar>(shape: (usize, usize), entries: &[(u32, u32, f64)]) -> Array2<T> {
    let mut m = Array2::zeros(shape);
    for &(r, c, v) in entries {
        m[[r as usize, c as usize]] = T::of(v);
    }
    m
}

impl ModelFile {
    pub fn from_model<T: Scalar>(model: &TopicModel<T>, config_digest: &str) -> Self {
        Self {
            config: model.config.clone(),
            config_digest: config_digest.to_string(),
            doc_ids: model.doc_ids.clone(),
            terms: model.terms.clone(),
            n_topics: model.n_topics(),
            theta: triplets(&model.theta),
            phi: triplets(&model.phi),
        }
    }

    pub fn to_model<T: Scalar>(&self) -> TopicModel<T> {
        TopicModel {
            doc_ids: self.doc_ids.clone(),
            terms: self.terms.clone(),
            theta: dense((self.doc_ids.len(), self.n_topics), &self.theta),
            phi: dense((self.n_topics, self.terms.len()), &self.phi),
            config: self.config.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), ModelError> {
        let err = |m: String| ModelError::File { path: path.to_path_buf(), message: m };
        let text = serde_json::to_string(self).map_err(|e| err(e.to_string()))?;
        fs::write(path, text).map_err(|e| err(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, ModelError> {
        let err = |m: String| ModelError::File { path: path.to_path_buf(), message: m };
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))
    }
}
