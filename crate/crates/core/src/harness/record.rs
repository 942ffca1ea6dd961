//! Persisted per-run output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::actions::{ActionSpec, ActionStage};
use crate::metrics::{MetricsVector, TopicDistanceSummary};

/// Membership probabilities at or below this are not stored.
pub const MIN_STORED_PROBABILITY: f64 = 0.001;
/// Length of the per-topic document and term lists.
pub const TOP_N: usize = 100;

/// What produced a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RunAction {
    /// Serialized as the string `"baseline"`.
    Baseline(BaselineTag),
    Action(ActionSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineTag {
    Baseline,
}

impl RunAction {
    pub fn baseline() -> Self {
        RunAction::Baseline(BaselineTag::Baseline)
    }

    pub fn is_baseline(&self) -> bool {
        matches!(self, RunAction::Baseline(_))
    }

    /// Action kind slug, or `"baseline"`.
    pub fn kind(&self) -> &'static str {
        match self {
            RunAction::Baseline(_) => "baseline",
            RunAction::Action(a) => a.kind.slug(),
        }
    }

    pub fn stage(&self) -> Option<ActionStage> {
        match self {
            RunAction::Baseline(_) => None,
            RunAction::Action(a) => Some(a.stage()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "state", content = "reason")]
pub enum RunStatus {
    Ok,
    /// The action had nothing to act on (e.g. splitting a one-document topic).
    Degenerate(String),
    Failed(String),
}

impl RunStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RunStatus::Ok)
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Degenerate(_) => "degenerate",
            RunStatus::Failed(_) => "failed",
        }
    }
}

/// One `(document, topic, probability)` membership entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DocTopicProb {
    pub doc: String,
    pub topic: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub id: String,
    pub p: f64,
}

/// Reference-class makeup of one predicted topic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassShare {
    pub label: String,
    pub count: usize,
    /// Mean membership probability in the topic over these documents.
    pub mean_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicComposition {
    pub topic: usize,
    pub size: usize,
    /// Ordered by count descending, then label.
    pub classes: Vec<ClassShare>,
}

/// Posterior of the corpus-wide top terms in every topic.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TermTopicTable {
    /// Ranked by phi summed over topics, descending.
    pub terms: Vec<String>,
    /// `phi[i][t]` is the probability of `terms[i]` in topic `t`.
    pub phi: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub action: RunAction,
    /// `None` for the baseline.
    pub stage: Option<ActionStage>,
    /// Hash over every effective configuration of the run.
    pub config_digest: String,
    pub status: RunStatus,
    pub metrics: Option<MetricsVector>,
    /// Impact score against the baseline; present exactly when status is ok.
    pub s_r: Option<f64>,
    /// Metrics that were undefined for this run and copied from the baseline.
    pub imputed_metrics: Vec<String>,
    pub notes: Vec<String>,
    pub topic_distances: Option<TopicDistanceSummary>,
    pub n_docs: usize,
    pub n_terms: usize,
    pub n_topics: usize,
    pub n_evaluated: usize,
    pub topic_sizes: Vec<usize>,
    pub doc_topic_probs: Vec<DocTopicProb>,
    pub top_docs: Vec<Vec<Ranked>>,
    pub top_terms: Vec<Vec<Ranked>>,
    pub composition: Vec<TopicComposition>,
    pub term_topic: TermTopicTable,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl RunRecord {
    /// A record for a run that produced no model.
    pub fn unscored(run_id: String, action: RunAction, config_digest: String, status: RunStatus) -> Self {
        Self {
            run_id,
            stage: action.stage(),
            action,
            config_digest,
            status,
            metrics: None,
            s_r: None,
            imputed_metrics: Vec::new(),
            notes: Vec::new(),
            topic_distances: None,
            n_docs: 0,
            n_terms: 0,
            n_topics: 0,
            n_evaluated: 0,
            topic_sizes: Vec::new(),
            doc_topic_probs: Vec::new(),
            top_docs: Vec::new(),
            top_terms: Vec::new(),
            composition: Vec::new(),
            term_topic: TermTopicTable::default(),
            details: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.action.kind()
    }
}
