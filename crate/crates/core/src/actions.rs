//! Simulated user actions: what they are, how a sweep samples them and how
//! each one is applied at its pipeline stage.
//!
//! Preparation actions rebuild the document-term matrix and retrain; model
//! actions retrain on the baseline matrix; assessment actions (split, merge)
//! rewrite the baseline model and assignment without retraining.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use ndarray::Array2;
use rand::seq::{index::sample, IndexedRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::model::{assign_topics, train_lda, Assignment, LdaConfig, LdaSettings, TopicModel};
use crate::preprocess::{self, tokenize, DocumentTermMatrix, PreprocessConfig, StopList};
use crate::scalar::{normalize, Scalar};
use crate::seed;

pub const RARE_THRESHOLDS: [f64; 5] = [0.0001, 0.01, 0.025, 0.05, 0.10];
pub const UBIQUITOUS_THRESHOLDS: [f64; 6] = [0.99, 0.95, 0.90, 0.75, 0.60, 0.50];
pub const DOCUMENT_FRACTIONS: [f64; 5] = [0.05, 0.20, 0.25, 0.40, 0.50];
pub const MAX_TOPIC_COUNT: usize = 100;
pub const MAX_MERGE: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("invalid action parameters: {0}")]
    InvalidParams(String),
    #[error("merge needs 2 to {MAX_MERGE} distinct topics: {0}")]
    InvalidMerge(String),
    #[error("action plans need a corpus of at least 8 documents, got {0}")]
    CorpusTooSmall(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionStage {
    Preparation,
    Model,
    Assessment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopListEdit {
    /// Add frequent corpus terms to the list.
    Add,
    /// Take terms off the default list.
    Remove,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionKind {
    ToggleStopRemoval,
    PerturbStopList { edit: StopListEdit, count: usize, pool: usize },
    ToggleStemming,
    RemoveRareTerms { threshold: f64 },
    RemoveUbiquitousTerms { threshold: f64 },
    RemoveDocuments { fraction: f64 },
    SetNumTopics { k: usize },
    SplitTopic { topic: usize },
    MergeTopics { topics: Vec<usize> },
}

impl ActionKind {
    pub fn stage(&self) -> ActionStage {
        match self {
            ActionKind::ToggleStopRemoval
            | ActionKind::PerturbStopList { .. }
            | ActionKind::ToggleStemming
            | ActionKind::RemoveRareTerms { .. }
            | ActionKind::RemoveUbiquitousTerms { .. }
            | ActionKind::RemoveDocuments { .. } => ActionStage::Preparation,
            ActionKind::SetNumTopics { .. } => ActionStage::Model,
            ActionKind::SplitTopic { .. } | ActionKind::MergeTopics { .. } => ActionStage::Assessment,
        }
    }

    /// Short identifier used in run ids and for grouping.
    pub fn slug(&self) -> &'static str {
        match self {
            ActionKind::ToggleStopRemoval => "toggle-stop-removal",
            ActionKind::PerturbStopList { .. } => "perturb-stop-list",
            ActionKind::ToggleStemming => "toggle-stemming",
            ActionKind::RemoveRareTerms { .. } => "remove-rare-terms",
            ActionKind::RemoveUbiquitousTerms { .. } => "remove-ubiquitous-terms",
            ActionKind::RemoveDocuments { .. } => "remove-documents",
            ActionKind::SetNumTopics { .. } => "set-num-topics",
            ActionKind::SplitTopic { .. } => "split-topic",
            ActionKind::MergeTopics { .. } => "merge-topics",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionSpec {
    #[serde(flatten)]
    pub kind: ActionKind,
    pub seed: u64,
}

fn in_set(value: f64, set: &[f64]) -> bool {
    set.iter().any(|&s| s == value)
}

impl ActionSpec {
    pub fn stage(&self) -> ActionStage {
        self.kind.stage()
    }

    /// Check parameters against the allowed grids. `n_docs` bounds the
    /// topic count.
    pub fn validate(&self, n_docs: usize) -> Result<(), ActionError> {
        let bad = |m: String| Err(ActionError::InvalidParams(m));
        match &self.kind {
            ActionKind::RemoveRareTerms { threshold } if !in_set(*threshold, &RARE_THRESHOLDS) => {
                bad(format!("rare threshold {threshold} not in {RARE_THRESHOLDS:?}"))
            }
            ActionKind::RemoveUbiquitousTerms { threshold } if !in_set(*threshold, &UBIQUITOUS_THRESHOLDS) => {
                bad(format!("ubiquitous threshold {threshold} not in {UBIQUITOUS_THRESHOLDS:?}"))
            }
            ActionKind::RemoveDocuments { fraction } if !in_set(*fraction, &DOCUMENT_FRACTIONS) => {
                bad(format!("document fraction {fraction} not in {DOCUMENT_FRACTIONS:?}"))
            }
            ActionKind::SetNumTopics { k } if !(2..=max_topic_count(n_docs)).contains(k) => {
                bad(format!("k = {k} outside [2, {}]", max_topic_count(n_docs)))
            }
            ActionKind::PerturbStopList { count, .. } if *count == 0 => bad("stop-list edit of zero terms".into()),
            ActionKind::PerturbStopList { pool, .. } if *pool == 0 => bad("empty stop-list candidate pool".into()),
            ActionKind::MergeTopics { topics } => check_merge_ids(topics, usize::MAX).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// Largest topic count a model action may request: a quarter of the corpus
/// (rounded up), at most 100.
pub fn max_topic_count(n_docs: usize) -> usize {
    n_docs.div_ceil(4).min(MAX_TOPIC_COUNT)
}

/// How many actions of each kind a sweep samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanParams {
    pub stoplist_draws: usize,
    /// Terms per stop-list edit are drawn from `1..=stoplist_max_count`.
    pub stoplist_max_count: usize,
    /// Added stop terms come from this many highest-df corpus terms.
    pub stoplist_candidate_pool: usize,
    pub toggle_stop_removal: bool,
    pub toggle_stemming: bool,
    pub rare_thresholds: Vec<f64>,
    pub ubiquitous_thresholds: Vec<f64>,
    pub document_fractions: Vec<f64>,
    pub topic_count_draws: usize,
    pub max_splits: usize,
    pub merge_sizes: Vec<usize>,
    pub merge_repetitions: usize,
}

impl Default for PlanParams {
    fn default() -> Self {
        Self {
            stoplist_draws: 30,
            stoplist_max_count: 50,
            stoplist_candidate_pool: 200,
            toggle_stop_removal: true,
            toggle_stemming: true,
            rare_thresholds: RARE_THRESHOLDS.to_vec(),
            ubiquitous_thresholds: UBIQUITOUS_THRESHOLDS.to_vec(),
            document_fractions: DOCUMENT_FRACTIONS.to_vec(),
            topic_count_draws: 30,
            max_splits: 30,
            merge_sizes: (2..=MAX_MERGE).collect(),
            merge_repetitions: 1,
        }
    }
}

impl PlanParams {
    /// A plan with no actions at all.
    pub fn none() -> Self {
        Self {
            stoplist_draws: 0,
            toggle_stop_removal: false,
            toggle_stemming: false,
            rare_thresholds: vec![],
            ubiquitous_thresholds: vec![],
            document_fractions: vec![],
            topic_count_draws: 0,
            max_splits: 0,
            merge_sizes: vec![],
            merge_repetitions: 0,
            ..Self::default()
        }
    }
}

/// Sample the ordered list of actions for a sweep. Each action's own seed
/// is derived from the master seed and its position in the plan.
pub fn sample_action_plan(
    n_docs: usize,
    k_baseline: usize,
    master_seed: u64,
    params: &PlanParams,
) -> Result<Vec<ActionSpec>, ActionError> {
    if n_docs < 8 {
        return Err(ActionError::CorpusTooSmall(n_docs));
    }
    let mut rng = seed::rng(seed::derive(master_seed, u64::MAX));
    let mut kinds = Vec::new();

    for _ in 0..params.stoplist_draws {
        let edit = if rng.random_bool(0.5) { StopListEdit::Add } else { StopListEdit::Remove };
        let count = rng.random_range(1..=params.stoplist_max_count.max(1));
        kinds.push(ActionKind::PerturbStopList { edit, count, pool: params.stoplist_candidate_pool });
    }
    if params.toggle_stop_removal {
        kinds.push(ActionKind::ToggleStopRemoval);
    }
    if params.toggle_stemming {
        kinds.push(ActionKind::ToggleStemming);
    }
    kinds.extend(params.rare_thresholds.iter().map(|&threshold| ActionKind::RemoveRareTerms { threshold }));
    kinds.extend(params.ubiquitous_thresholds.iter().map(|&threshold| ActionKind::RemoveUbiquitousTerms { threshold }));
    kinds.extend(params.document_fractions.iter().map(|&fraction| ActionKind::RemoveDocuments { fraction }));

    let k_max = max_topic_count(n_docs);
    for _ in 0..params.topic_count_draws {
        kinds.push(ActionKind::SetNumTopics { k: rng.random_range(2..=k_max) });
    }

    let n_splits = params.max_splits.min(k_baseline);
    for topic in sample(&mut rng, k_baseline, n_splits) {
        kinds.push(ActionKind::SplitTopic { topic });
    }

    for &size in &params.merge_sizes {
        if size < 2 || size > k_baseline.min(MAX_MERGE) {
            continue;
        }
        for _ in 0..params.merge_repetitions {
            let mut topics = sample(&mut rng, k_baseline, size).into_vec();
            topics.sort_unstable();
            kinds.push(ActionKind::MergeTopics { topics });
        }
    }

    let plan: Vec<ActionSpec> = kinds
        .into_iter()
        .enumerate()
        .map(|(i, kind)| ActionSpec { kind, seed: seed::derive(master_seed, i as u64 + 1) })
        .collect();
    for action in &plan {
        action.validate(n_docs)?;
    }
    Ok(plan)
}

/// Everything a sweep computes once and shares with every run.
#[derive(Clone, Debug)]
pub struct BaselineArtifacts {
    pub corpus: Arc<Corpus>,
    pub preprocess: PreprocessConfig,
    pub stoplist: StopList,
    pub lda_settings: LdaSettings,
    pub lda: LdaConfig,
    pub dtm: Arc<DocumentTermMatrix>,
    pub model: Arc<TopicModel>,
    pub assignment: Arc<Assignment>,
}

impl BaselineArtifacts {
    /// Run the default pipeline.
    pub fn build(
        corpus: Arc<Corpus>,
        preprocess: PreprocessConfig,
        stoplist: StopList,
        lda_settings: LdaSettings,
        k: usize,
    ) -> Result<Self, String> {
        let dtm = preprocess::prepare(&corpus, &preprocess, &stoplist).map_err(|e| format!("preparation: {e}"))?;
        let lda = lda_settings.resolve(k);
        let model = train_lda(&dtm, &lda).map_err(|e| format!("model: {e}"))?;
        let assignment = assign_topics(&model);
        Ok(Self {
            corpus,
            preprocess,
            stoplist,
            lda_settings,
            lda,
            dtm: Arc::new(dtm),
            model: Arc::new(model),
            assignment: Arc::new(assignment),
        })
    }
}

/// Outputs of one action run.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub corpus: Arc<Corpus>,
    pub preprocess: PreprocessConfig,
    pub lda: LdaConfig,
    pub dtm: Arc<DocumentTermMatrix>,
    pub model: Arc<TopicModel>,
    pub assignment: Arc<Assignment>,
    /// Resolved random choices (e.g. which stop terms were edited).
    pub details: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug)]
pub enum ActionOutcome {
    Completed(Box<RunArtifacts>),
    /// The action had nothing to act on; recorded, not scored.
    Degenerate(String),
    /// The rerun pipeline broke; recorded, the sweep continues.
    Failed(String),
}

/// Apply one action to the baseline, re-running only the affected stages.
pub fn apply_action(baseline: &BaselineArtifacts, action: &ActionSpec) -> ActionOutcome {
    if let Err(e) = action.validate(baseline.corpus.len()) {
        return ActionOutcome::Failed(e.to_string());
    }
    let mut details = BTreeMap::new();
    let mut config = baseline.preprocess.clone();
    let mut corpus = Arc::clone(&baseline.corpus);
    match &action.kind {
        ActionKind::ToggleStopRemoval => config.remove_stop_terms = !config.remove_stop_terms,
        ActionKind::ToggleStemming => config.stem = !config.stem,
        ActionKind::RemoveRareTerms { threshold } => config.rare_df_threshold = Some(*threshold),
        ActionKind::RemoveUbiquitousTerms { threshold } => config.ubiquitous_df_threshold = Some(*threshold),
        ActionKind::PerturbStopList { edit, count, pool } => {
            let terms = perturb_stop_list(baseline, &mut config, *edit, *count, *pool, action.seed);
            details.insert("stop_terms".into(), serde_json::json!(terms));
        }
        ActionKind::RemoveDocuments { fraction } => {
            let kept = baseline.corpus.remove_fraction(*fraction, action.seed);
            details.insert("documents_removed".into(), serde_json::json!(baseline.corpus.len() - kept.len()));
            corpus = Arc::new(kept);
        }
        ActionKind::SetNumTopics { k } => {
            let lda = baseline.lda_settings.resolve(*k);
            return retrain(corpus, config, Arc::clone(&baseline.dtm), lda, details);
        }
        ActionKind::SplitTopic { topic } => {
            return match split_topic(&baseline.model, &baseline.assignment, &baseline.dtm, *topic, action.seed, &TwoMeansCosine) {
                Ok(SplitResult::Split { model, assignment }) => ActionOutcome::Completed(Box::new(RunArtifacts {
                    corpus,
                    preprocess: config,
                    lda: baseline.lda.clone(),
                    dtm: Arc::clone(&baseline.dtm),
                    model: Arc::new(model),
                    assignment: Arc::new(assignment),
                    details,
                })),
                Ok(SplitResult::Degenerate(reason)) => ActionOutcome::Degenerate(reason),
                Err(e) => ActionOutcome::Failed(e.to_string()),
            };
        }
        ActionKind::MergeTopics { topics } => {
            return match merge_topics(&baseline.model, &baseline.assignment, topics) {
                Ok((model, assignment)) => ActionOutcome::Completed(Box::new(RunArtifacts {
                    corpus,
                    preprocess: config,
                    lda: baseline.lda.clone(),
                    dtm: Arc::clone(&baseline.dtm),
                    model: Arc::new(model),
                    assignment: Arc::new(assignment),
                    details,
                })),
                Err(e) => ActionOutcome::Failed(e.to_string()),
            };
        }
    }
    let dtm = match preprocess::prepare(&corpus, &config, &baseline.stoplist) {
        Ok(dtm) => dtm,
        Err(e) => return ActionOutcome::Failed(format!("preparation: {e}")),
    };
    retrain(corpus, config, Arc::new(dtm), baseline.lda.clone(), details)
}

fn retrain(
    corpus: Arc<Corpus>,
    config: PreprocessConfig,
    dtm: Arc<DocumentTermMatrix>,
    lda: LdaConfig,
    details: BTreeMap<String, serde_json::Value>,
) -> ActionOutcome {
    match train_lda(&dtm, &lda) {
        Ok(model) => {
            let assignment = assign_topics(&model);
            ActionOutcome::Completed(Box::new(RunArtifacts {
                corpus,
                preprocess: config,
                lda,
                dtm,
                model: Arc::new(model),
                assignment: Arc::new(assignment),
                details,
            }))
        }
        Err(e) => ActionOutcome::Failed(format!("model: {e}")),
    }
}

/// The `pool` highest-document-frequency corpus tokens that are not already
/// stop terms; ties broken lexicographically.
pub fn frequent_non_stop_terms(corpus: &Corpus, config: &PreprocessConfig, stoplist: &StopList, pool: usize) -> Vec<String> {
    let stop = stoplist.effective(config);
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in corpus.documents() {
        let unique: BTreeSet<String> = tokenize(&doc.text, config.min_token_length, config.drop_numeric_tokens)
            .into_iter()
            .filter(|t| !stop.contains(t))
            .collect();
        for t in unique {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = df.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.into_iter().take(pool).map(|(t, _)| t).collect()
}

fn perturb_stop_list(
    baseline: &BaselineArtifacts,
    config: &mut PreprocessConfig,
    edit: StopListEdit,
    count: usize,
    pool: usize,
    seed: u64,
) -> Vec<String> {
    let mut rng = seed::rng(seed);
    let candidates: Vec<String> = match edit {
        StopListEdit::Add => frequent_non_stop_terms(&baseline.corpus, config, &baseline.stoplist, pool),
        StopListEdit::Remove => baseline.stoplist.terms.iter().cloned().collect(),
    };
    let mut chosen: Vec<String> = candidates.choose_multiple(&mut rng, count.min(candidates.len())).cloned().collect();
    chosen.sort();
    match edit {
        StopListEdit::Add => {
            config.stop_removals.retain(|t| !chosen.contains(t));
            config.stop_additions.extend(chosen.iter().cloned());
        }
        StopListEdit::Remove => {
            config.stop_additions.retain(|t| !chosen.contains(t));
            config.stop_removals.extend(chosen.iter().cloned());
        }
    }
    chosen
}

/// Divides a set of documents into two groups given their topic rows.
pub trait SplitStrategy {
    /// Returns `0` or `1` per row.
    fn bipartition(&self, rows: &[Vec<f64>], seed: u64) -> Vec<u8>;
}

/// Seeded 2-means under cosine distance.
#[derive(Clone, Copy, Debug, Default)]
pub struct TwoMeansCosine;

fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        1.0
    } else {
        1.0 - dot / (na * nb)
    }
}

impl SplitStrategy for TwoMeansCosine {
    fn bipartition(&self, rows: &[Vec<f64>], seed: u64) -> Vec<u8> {
        let n = rows.len();
        let mut rng = seed::rng(seed);
        let init = sample(&mut rng, n, 2);
        let mut centroids = [rows[init.index(0)].clone(), rows[init.index(1)].clone()];
        let mut labels = vec![0u8; n];
        for _ in 0..100 {
            let next: Vec<u8> = rows
                .iter()
                .map(|r| u8::from(cosine_distance(r, &centroids[1]) < cosine_distance(r, &centroids[0])))
                .collect();
            let changed = next != labels;
            labels = next;
            for (g, centroid) in centroids.iter_mut().enumerate() {
                let members: Vec<&Vec<f64>> = rows.iter().zip(&labels).filter(|(_, &l)| l as usize == g).map(|(r, _)| r).collect();
                if members.is_empty() {
                    continue;
                }
                for (j, c) in centroid.iter_mut().enumerate() {
                    *c = members.iter().map(|r| r[j]).sum::<f64>() / members.len() as f64;
                }
            }
            if !changed {
                break;
            }
        }
        labels
    }
}

pub enum SplitResult<T> {
    Split { model: TopicModel<T>, assignment: Assignment },
    Degenerate(String),
}

/// Split `topic` in two. Its member documents are bipartitioned on their
/// theta rows; the second group moves to a new topic appended at index K,
/// taking each member's full mass for `topic` with it. The topic's phi row
/// is shared between the two children in proportion to the term counts of
/// each group's documents, then each child is renormalized.
pub fn split_topic<T: Scalar>(
    model: &TopicModel<T>,
    assignment: &Assignment,
    dtm: &DocumentTermMatrix<T>,
    topic: usize,
    seed: u64,
    strategy: &dyn SplitStrategy,
) -> Result<SplitResult<T>, ActionError> {
    let k = model.n_topics();
    if topic >= k {
        return Err(ActionError::InvalidParams(format!("topic {topic} out of range for {k} topics")));
    }
    if dtm.rows() != model.doc_ids.as_slice() {
        return Err(ActionError::InvalidParams("matrix rows do not match model documents".into()));
    }
    let members = assignment.members(topic);
    if members.len() < 2 {
        return Ok(SplitResult::Degenerate(format!("topic {topic} has {} document(s)", members.len())));
    }
    let rows: Vec<Vec<f64>> = members.iter().map(|&d| model.theta.row(d).iter().map(|v| v.as_f64()).collect()).collect();
    let groups = strategy.bipartition(&rows, seed);
    let second: usize = groups.iter().filter(|&&g| g == 1).count();
    if second == 0 || second == members.len() {
        return Ok(SplitResult::Degenerate(format!("topic {topic} could not be divided")));
    }

    let n = model.n_docs();
    let mut theta = Array2::<T>::zeros((n, k + 1));
    theta.slice_mut(ndarray::s![.., ..k]).assign(&model.theta);
    let mut topic_of = assignment.topic_of.clone();
    for (&d, &g) in members.iter().zip(&groups) {
        if g == 1 {
            theta[[d, k]] = theta[[d, topic]];
            theta[[d, topic]] = T::zero();
            topic_of[d] = k;
        }
    }

    let v = model.terms.len();
    let mut counts = [vec![0.0f64; v], vec![0.0f64; v]];
    for (&d, &g) in members.iter().zip(&groups) {
        let row = dtm.row(d);
        for (&c, &cnt) in row.columns.iter().zip(row.counts) {
            counts[g as usize][c] += f64::from(cnt);
        }
    }
    let doc_share = (members.len() - second) as f64 / members.len() as f64;
    let mut children = [vec![T::zero(); v], vec![T::zero(); v]];
    for w in 0..v {
        let total = counts[0][w] + counts[1][w];
        let share = if total > 0.0 { counts[0][w] / total } else { doc_share };
        let p = model.phi[[topic, w]];
        children[0][w] = p * T::of(share);
        children[1][w] = p * T::of(1.0 - share);
    }
    for child in children.iter_mut() {
        normalize(child);
    }
    let mut phi = Array2::<T>::zeros((k + 1, v));
    phi.slice_mut(ndarray::s![..k, ..]).assign(&model.phi);
    for w in 0..v {
        phi[[topic, w]] = children[0][w];
        phi[[k, w]] = children[1][w];
    }

    Ok(SplitResult::Split {
        model: TopicModel { doc_ids: model.doc_ids.clone(), terms: model.terms.clone(), theta, phi, config: model.config.clone() },
        assignment: Assignment { doc_ids: assignment.doc_ids.clone(), topic_of, n_topics: k + 1 },
    })
}

fn check_merge_ids(topics: &[usize], k: usize) -> Result<Vec<usize>, ActionError> {
    let distinct: BTreeSet<usize> = topics.iter().copied().collect();
    if distinct.len() != topics.len() {
        return Err(ActionError::InvalidMerge(format!("duplicate ids in {topics:?}")));
    }
    if !(2..=MAX_MERGE).contains(&topics.len()) {
        return Err(ActionError::InvalidMerge(format!("{} ids given", topics.len())));
    }
    if let Some(&bad) = distinct.iter().find(|&&t| t >= k) {
        return Err(ActionError::InvalidMerge(format!("topic {bad} out of range for {k} topics")));
    }
    Ok(distinct.into_iter().collect())
}

/// Merge topics into the lowest of their ids. Theta columns are summed;
/// phi rows are averaged with weights equal to each topic's assigned
/// document count (equal weights when all are empty) and renormalized.
/// Documents of any merged topic are reassigned to the merged topic; the
/// remaining topics keep their order.
pub fn merge_topics<T: Scalar>(
    model: &TopicModel<T>,
    assignment: &Assignment,
    topics: &[usize],
) -> Result<(TopicModel<T>, Assignment), ActionError> {
    let k = model.n_topics();
    let ids = check_merge_ids(topics, k)?;
    let target = ids[0];
    let merged: BTreeSet<usize> = ids.iter().copied().collect();
    // Old topic index -> new index.
    let mut new_index = vec![0usize; k];
    let mut next = 0;
    for (t, slot) in new_index.iter_mut().enumerate() {
        if merged.contains(&t) && t != target {
            continue;
        }
        *slot = next;
        next += 1;
    }
    for &t in &ids {
        new_index[t] = new_index[target];
    }
    let k_new = next;

    let n = model.n_docs();
    let mut theta = Array2::<T>::zeros((n, k_new));
    for d in 0..n {
        for t in 0..k {
            theta[[d, new_index[t]]] = theta[[d, new_index[t]]] + model.theta[[d, t]];
        }
    }

    let sizes = assignment.topic_sizes();
    let total_size: usize = ids.iter().map(|&t| sizes[t]).sum();
    let weight = |t: usize| -> T {
        if total_size == 0 {
            T::one()
        } else {
            T::of_usize(sizes[t])
        }
    };
    let v = model.terms.len();
    let mut phi = Array2::<T>::zeros((k_new, v));
    for t in 0..k {
        if merged.contains(&t) {
            continue;
        }
        phi.row_mut(new_index[t]).assign(&model.phi.row(t));
    }
    let mut row = vec![T::zero(); v];
    for &t in &ids {
        let w = weight(t);
        for (j, r) in row.iter_mut().enumerate() {
            *r = *r + w * model.phi[[t, j]];
        }
    }
    normalize(&mut row);
    for (j, r) in row.into_iter().enumerate() {
        phi[[new_index[target], j]] = r;
    }

    let topic_of = assignment.topic_of.iter().map(|&t| new_index[t]).collect();
    Ok((
        TopicModel { doc_ids: model.doc_ids.clone(), terms: model.terms.clone(), theta, phi, config: model.config.clone() },
        Assignment { doc_ids: assignment.doc_ids.clone(), topic_of, n_topics: k_new },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::preprocess::prepare;
    use ndarray::array;

    #[test]
    fn stage_mapping() {
        assert_eq!(ActionKind::ToggleStemming.stage(), ActionStage::Preparation);
        assert_eq!(ActionKind::RemoveDocuments { fraction: 0.05 }.stage(), ActionStage::Preparation);
        assert_eq!(ActionKind::SetNumTopics { k: 3 }.stage(), ActionStage::Model);
        assert_eq!(ActionKind::SplitTopic { topic: 0 }.stage(), ActionStage::Assessment);
        assert_eq!(ActionKind::MergeTopics { topics: vec![0, 1] }.stage(), ActionStage::Assessment);
    }

    #[test]
    fn topic_count_domain() {
        assert_eq!(max_topic_count(9_160), 100);
        assert_eq!(max_topic_count(100), 25);
        assert_eq!(max_topic_count(8), 2);
        assert_eq!(max_topic_count(101), 26);
    }

    #[test]
    fn parameter_grids_are_enforced() {
        let ok = ActionSpec { kind: ActionKind::RemoveRareTerms { threshold: 0.025 }, seed: 0 };
        assert!(ok.validate(100).is_ok());
        let bad = ActionSpec { kind: ActionKind::RemoveRareTerms { threshold: 0.3 }, seed: 0 };
        assert!(bad.validate(100).is_err());
        let bad = ActionSpec { kind: ActionKind::SetNumTopics { k: 26 }, seed: 0 };
        assert!(bad.validate(100).is_err());
        let bad = ActionSpec { kind: ActionKind::MergeTopics { topics: vec![1, 1] }, seed: 0 };
        assert!(bad.validate(100).is_err());
        let bad = ActionSpec { kind: ActionKind::MergeTopics { topics: (0..11).collect() }, seed: 0 };
        assert!(bad.validate(100).is_err());
    }

    #[test]
    fn plan_composition() {
        let plan = sample_action_plan(100, 20, 5, &PlanParams::default()).unwrap();
        let count = |slug: &str| plan.iter().filter(|a| a.kind.slug() == slug).count();
        assert_eq!(count("perturb-stop-list"), 30);
        assert_eq!(count("toggle-stop-removal"), 1);
        assert_eq!(count("toggle-stemming"), 1);
        assert_eq!(count("remove-rare-terms"), 5);
        assert_eq!(count("remove-ubiquitous-terms"), 6);
        assert_eq!(count("remove-documents"), 5);
        assert_eq!(count("set-num-topics"), 30);
        assert_eq!(count("split-topic"), 20);
        assert_eq!(count("merge-topics"), 9);
        for a in &plan {
            if let ActionKind::SetNumTopics { k } = a.kind {
                assert!((2..=25).contains(&k));
            }
            if let ActionKind::PerturbStopList { count, .. } = a.kind {
                assert!((1..=50).contains(&count));
            }
        }
        let sizes: Vec<usize> = plan
            .iter()
            .filter_map(|a| match &a.kind {
                ActionKind::MergeTopics { topics } => Some(topics.len()),
                _ => None,
            })
            .collect();
        assert_eq!(sizes, (2..=10).collect::<Vec<_>>());
        assert_eq!(plan, sample_action_plan(100, 20, 5, &PlanParams::default()).unwrap());
        assert_ne!(plan, sample_action_plan(100, 20, 6, &PlanParams::default()).unwrap());
    }

    #[test]
    fn plan_respects_small_k_and_small_corpora() {
        let plan = sample_action_plan(50, 3, 1, &PlanParams::default()).unwrap();
        assert_eq!(plan.iter().filter(|a| a.kind.slug() == "split-topic").count(), 3);
        assert_eq!(plan.iter().filter(|a| a.kind.slug() == "merge-topics").count(), 2);
        assert!(matches!(sample_action_plan(7, 3, 1, &PlanParams::default()), Err(ActionError::CorpusTooSmall(7))));
        assert!(sample_action_plan(50, 3, 1, &PlanParams::none()).unwrap().is_empty());
    }

    fn toy_model() -> (TopicModel, Assignment, DocumentTermMatrix) {
        let docs = vec![
            Document::new("d0", "apple banana apple", vec![]),
            Document::new("d1", "apple banana banana", vec![]),
            Document::new("d2", "cherry grape cherry", vec![]),
            Document::new("d3", "grape grape cherry", vec![]),
            Document::new("d4", "melon lemon melon", vec![]),
        ];
        let corpus = Corpus::new(docs).unwrap();
        let cfg = PreprocessConfig { stem: false, ..Default::default() };
        let dtm = prepare(&corpus, &cfg, &StopList::english()).unwrap();
        // Topic 0 holds d0..d3 with two distinct profiles; topic 1 holds d4.
        let theta = array![
            [0.5, 0.05, 0.45],
            [0.55, 0.05, 0.4],
            [0.5, 0.45, 0.05],
            [0.55, 0.4, 0.05],
            [0.1, 0.8, 0.1],
        ];
        let v = dtm.n_terms();
        let phi = Array2::from_elem((3, v), 1.0 / v as f64);
        let model = TopicModel { doc_ids: dtm.rows().to_vec(), terms: dtm.vocab().terms().to_vec(), theta, phi, config: LdaConfig::new(3, 0) };
        let assignment = assign_topics(&model);
        (model, assignment, dtm)
    }

    #[test]
    fn split_then_merge_restores() {
        let (model, assignment, dtm) = toy_model();
        assert_eq!(assignment.topic_of, [0, 0, 0, 0, 1]);
        let SplitResult::Split { model: m2, assignment: a2 } = split_topic(&model, &assignment, &dtm, 0, 3, &TwoMeansCosine).unwrap() else {
            panic!("expected a split");
        };
        assert_eq!(m2.n_topics(), 4);
        assert_eq!(a2.n_topics, 4);
        for row in m2.theta.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
        for row in m2.phi.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
        // Documents 0,1 (theta profile with mass on topic 2) separate from 2,3.
        assert_eq!(a2.topic_of[0], a2.topic_of[1]);
        assert_eq!(a2.topic_of[2], a2.topic_of[3]);
        assert_ne!(a2.topic_of[0], a2.topic_of[2]);

        let (m3, a3) = merge_topics(&m2, &a2, &[0, 3]).unwrap();
        assert_eq!(a3, assignment);
        assert_eq!(m3.theta, model.theta);
    }

    #[test]
    fn split_phi_follows_group_terms() {
        let (model, assignment, dtm) = toy_model();
        let SplitResult::Split { model: m2, assignment: a2 } = split_topic(&model, &assignment, &dtm, 0, 3, &TwoMeansCosine).unwrap() else {
            panic!("expected a split");
        };
        let moved = a2.topic_of[0];
        let kept = if moved == 0 { 3 } else { 0 };
        let apple = dtm.vocab().index_of("apple").unwrap();
        let grape = dtm.vocab().index_of("grape").unwrap();
        assert!(m2.phi[[moved, apple]] > 0.0);
        assert_eq!(m2.phi[[moved, grape]], 0.0);
        assert_eq!(m2.phi[[kept, apple]], 0.0);
    }

    #[test]
    fn split_of_small_topic_is_degenerate() {
        let (model, assignment, dtm) = toy_model();
        assert!(matches!(split_topic(&model, &assignment, &dtm, 1, 0, &TwoMeansCosine).unwrap(), SplitResult::Degenerate(_)));
        assert!(matches!(split_topic(&model, &assignment, &dtm, 2, 0, &TwoMeansCosine).unwrap(), SplitResult::Degenerate(_)));
        assert!(split_topic(&model, &assignment, &dtm, 7, 0, &TwoMeansCosine).is_err());
    }

    #[test]
    fn merge_sums_columns() {
        let (model, assignment, _) = toy_model();
        let (m, a) = merge_topics(&model, &assignment, &[1, 2]).unwrap();
        assert_eq!(m.n_topics(), 2);
        assert!((m.theta[[0, 1]] - 0.5).abs() < 1e-12);
        assert_eq!(a.topic_of, [0, 0, 0, 0, 1]);

        let (all, a_all) = merge_topics(&model, &assignment, &[0, 1, 2]).unwrap();
        assert_eq!(all.n_topics(), 1);
        assert!(a_all.topic_of.iter().all(|&t| t == 0));
        for row in all.theta.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }

        assert!(matches!(merge_topics(&model, &assignment, &[1, 1]), Err(ActionError::InvalidMerge(_))));
        assert!(merge_topics(&model, &assignment, &[0, 5]).is_err());
        assert!(merge_topics(&model, &assignment, &[0]).is_err());
    }

    #[test]
    fn merge_of_empty_topics_keeps_assignment() {
        let (mut model, _, _) = toy_model();
        model.theta = array![[0.6, 0.2, 0.2], [0.6, 0.2, 0.2], [0.6, 0.2, 0.2], [0.6, 0.2, 0.2], [0.6, 0.2, 0.2]];
        let assignment = assign_topics(&model);
        let (m, a) = merge_topics(&model, &assignment, &[1, 2]).unwrap();
        assert_eq!(a.topic_sizes(), [5, 0]);
        assert_eq!(a.topic_of, assignment.topic_of);
        for row in m.phi.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }
}
