//! Baseline and sweep orchestration, run records and their persistence.
//!
//! A sweep directory holds:
//!
//! - `plan.toml`: the resolved plan
//! - `baseline.json`: the baseline [`RunRecord`]
//! - `runs/<run_id>.json`: one record per action
//! - `metrics.csv`: one row per run, baseline first (see [`CSV_COLUMNS`])
//! - `report/`: written by the report module

mod plan;
mod record;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::actions::{apply_action, sample_action_plan, ActionOutcome, ActionSpec, ActionStage, BaselineArtifacts};
use crate::corpus::{load_corpus, Corpus, CorpusError, CorpusFormat};
use crate::metrics::{evaluate, impact_score, topic_distances, EvalSettings, MetricsError, MetricsVector, SparseVector, METRIC_NAMES};
use crate::model::{top_documents, top_terms, Assignment, LdaConfig, TopicModel, DEFAULT_TOPICS};
use crate::preprocess::{DocumentTermMatrix, PreprocessConfig};
use crate::seed::digest_of;

pub use plan::{GtMode, SimulationPlan, OUTPUT_DIR_ENV};
pub use record::{
    BaselineTag, ClassShare, DocTopicProb, Ranked, RunAction, RunRecord, RunStatus, TermTopicTable, TopicComposition,
    MIN_STORED_PROBABILITY, TOP_N,
};

/// Label given to documents without a reference class in topic
/// compositions.
pub const UNLABELLED: &str = "(unlabelled)";

/// Columns of `metrics.csv`, in order.
pub const CSV_COLUMNS: [&str; 15] = [
    "run_id",
    "kind",
    "stage",
    "status",
    METRIC_NAMES[0],
    METRIC_NAMES[1],
    METRIC_NAMES[2],
    METRIC_NAMES[3],
    METRIC_NAMES[4],
    METRIC_NAMES[5],
    METRIC_NAMES[6],
    METRIC_NAMES[7],
    "s_r",
    "imputed_metrics",
    "notes",
];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("baseline {stage} stage failed: {message}")]
    Baseline { stage: &'static str, message: String },
    #[error("corpus has no labels; use gt_mode = \"baseline_as_gt\"")]
    NoLabels,
    #[error("baseline metrics: {0}")]
    BaselineMetrics(MetricsError),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("not a sweep directory: {0}")]
    NotASweep(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// Reference label per document id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub mode: GtMode,
    pub labels: BTreeMap<String, String>,
}

impl GroundTruth {
    /// Single-labelled documents of the corpus.
    pub fn from_labels(corpus: &Corpus) -> Self {
        let labels = corpus
            .documents()
            .iter()
            .filter_map(|d| d.single_label().map(|l| (d.id.clone(), l.to_string())))
            .collect();
        Self { mode: GtMode::Labels, labels }
    }

    /// The topic of each document in `assignment`, as `topic-<id>`.
    pub fn from_assignment(assignment: &Assignment) -> Self {
        let labels = assignment
            .doc_ids
            .iter()
            .zip(&assignment.topic_of)
            .map(|(d, t)| (d.clone(), format!("topic-{t}")))
            .collect();
        Self { mode: GtMode::BaselineAsGt, labels }
    }

    pub fn get(&self, doc: &str) -> Option<&str> {
        self.labels.get(doc).map(String::as_str)
    }

    pub fn class_count(&self) -> usize {
        self.labels.values().collect::<std::collections::BTreeSet<_>>().len()
    }
}

/// The baseline run: its record, the artifacts actions start from and the
/// reference labels every run is scored against.
#[derive(Clone, Debug)]
pub struct Baseline {
    pub record: RunRecord,
    pub artifacts: BaselineArtifacts,
    pub gt: GroundTruth,
    pub evaluation: EvalSettings,
}

impl Baseline {
    pub fn metrics(&self) -> &MetricsVector {
        self.record.metrics.as_ref().expect("baseline record is scored")
    }
}

#[derive(Serialize)]
struct DigestInput<'a> {
    preprocess: &'a PreprocessConfig,
    stop_list_version: &'a str,
    lda: &'a LdaConfig,
    evaluation: &'a EvalSettings,
    gt_mode: GtMode,
    action: Option<&'a ActionSpec>,
}

/// Digest of every effective setting of a run. Assessment actions reuse the
/// baseline pipeline, so they share its digest; preparation and model
/// actions fold the action itself in.
pub fn config_digest(baseline: &Baseline, action: Option<&ActionSpec>, preprocess: &PreprocessConfig, lda: &LdaConfig) -> String {
    let action = action.filter(|a| a.stage() != ActionStage::Assessment);
    let (preprocess, lda) = if action.is_some() {
        (preprocess, lda)
    } else {
        (&baseline.artifacts.preprocess, &baseline.artifacts.lda)
    };
    digest_of(&DigestInput {
        preprocess,
        stop_list_version: &baseline.artifacts.stoplist.version,
        lda,
        evaluation: &baseline.evaluation,
        gt_mode: baseline.gt.mode,
        action,
    })
}

/// Topic count used when the plan does not fix one.
pub fn default_topic_count(corpus: &Corpus, plan: &SimulationPlan) -> usize {
    if let Some(k) = plan.lda.k {
        return k;
    }
    match GroundTruth::from_labels(corpus).class_count() {
        0 => DEFAULT_TOPICS,
        n => n,
    }
}

/// Everything a scored record is computed from.
pub struct ScoreInputs<'a> {
    pub dtm: &'a DocumentTermMatrix,
    pub model: &'a TopicModel,
    pub assignment: &'a Assignment,
}

/// Build an ok record: metrics, impact against `baseline` (zero when this is
/// the baseline itself) and the stored model summaries.
#[allow(clippy::too_many_arguments)]
pub fn scored_record(
    run_id: String,
    action: RunAction,
    config_digest: String,
    inputs: &ScoreInputs<'_>,
    gt: &GroundTruth,
    evaluation: &EvalSettings,
    baseline: Option<&MetricsVector>,
    details: BTreeMap<String, serde_json::Value>,
) -> Result<RunRecord, MetricsError> {
    let ScoreInputs { dtm, model, assignment } = *inputs;
    debug_assert_eq!(dtm.rows(), model.doc_ids.as_slice());

    let rows: Vec<_> = (0..dtm.n_docs()).map(|i| dtm.row(i)).collect();
    let features: Vec<SparseVector<'_, f64>> =
        rows.iter().map(|r| SparseVector { indices: r.columns, values: r.weights }).collect();
    let mut gt_labels = Vec::new();
    let mut pred = Vec::new();
    for (doc, &t) in assignment.doc_ids.iter().zip(&assignment.topic_of) {
        if let Some(label) = gt.get(doc) {
            gt_labels.push(label);
            pred.push(t);
        }
    }
    let partial = evaluate(&gt_labels, &pred, &features, &assignment.topic_of, evaluation);

    let (metrics, imputed, s_r) = match baseline {
        None => {
            let m = partial.complete()?;
            (m, Vec::new(), 0.0)
        }
        Some(b) => {
            let (m, imputed) = partial.impute(b);
            let s = impact_score(b, &m);
            (m, imputed, s)
        }
    };

    let k = model.n_topics();
    let mut doc_topic_probs = Vec::new();
    for (d, row) in model.theta.rows().into_iter().enumerate() {
        for (t, &p) in row.iter().enumerate() {
            if p > MIN_STORED_PROBABILITY {
                doc_topic_probs.push(DocTopicProb { doc: model.doc_ids[d].clone(), topic: t, p });
            }
        }
    }
    let ranked = |items: Vec<(String, f64)>| items.into_iter().map(|(id, p)| Ranked { id, p }).collect::<Vec<_>>();
    let top_docs = (0..k).map(|t| ranked(top_documents(model, t, TOP_N).expect("topic in range"))).collect();
    let top_terms_ = (0..k).map(|t| ranked(top_terms(model, t, TOP_N).expect("topic in range"))).collect();

    Ok(RunRecord {
        run_id,
        stage: action.stage(),
        action,
        config_digest,
        status: RunStatus::Ok,
        metrics: Some(metrics),
        s_r: Some(s_r),
        imputed_metrics: imputed,
        notes: partial.notes,
        topic_distances: Some(topic_distances(&model.phi).summary()),
        n_docs: model.n_docs(),
        n_terms: model.terms.len(),
        n_topics: k,
        n_evaluated: gt_labels.len(),
        topic_sizes: assignment.topic_sizes(),
        doc_topic_probs,
        top_docs,
        top_terms: top_terms_,
        composition: composition(model, assignment, gt),
        term_topic: term_topic_table(model, TOP_N),
        details,
    })
}

fn composition(model: &TopicModel, assignment: &Assignment, gt: &GroundTruth) -> Vec<TopicComposition> {
    let mut per_topic: Vec<BTreeMap<&str, (usize, f64)>> = vec![BTreeMap::new(); assignment.n_topics];
    for (d, (doc, &t)) in assignment.doc_ids.iter().zip(&assignment.topic_of).enumerate() {
        let label = gt.get(doc).unwrap_or(UNLABELLED);
        let entry = per_topic[t].entry(label).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += model.theta[[d, t]];
    }
    per_topic
        .into_iter()
        .enumerate()
        .map(|(topic, classes)| {
            let mut classes: Vec<ClassShare> = classes
                .into_iter()
                .map(|(label, (count, total))| ClassShare {
                    label: label.to_string(),
                    count,
                    mean_probability: total / count as f64,
                })
                .collect();
            classes.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
            TopicComposition { topic, size: classes.iter().map(|c| c.count).sum(), classes }
        })
        .collect()
}

/// Terms ranked by phi summed over topics (ties in term order), with their
/// per-topic posteriors.
fn term_topic_table(model: &TopicModel, n: usize) -> TermTopicTable {
    let totals: Vec<f64> = model.phi.columns().into_iter().map(|c| c.sum()).collect();
    let mut order: Vec<usize> = (0..totals.len()).collect();
    order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]).then(a.cmp(&b)));
    order.truncate(n);
    TermTopicTable {
        terms: order.iter().map(|&w| model.terms[w].clone()).collect(),
        phi: order.iter().map(|&w| model.phi.column(w).to_vec()).collect(),
    }
}

/// Load the plan's corpus, run the default pipeline and score it.
pub fn run_baseline(plan: &SimulationPlan) -> Result<Baseline, HarnessError> {
    plan.validate()?;
    let corpus = load_corpus(&plan.corpus, CorpusFormat::JsonLines)?;
    baseline_from_corpus(Arc::new(corpus), plan)
}

/// As [`run_baseline`] with the corpus already in memory.
pub fn baseline_from_corpus(corpus: Arc<Corpus>, plan: &SimulationPlan) -> Result<Baseline, HarnessError> {
    if plan.gt_mode == GtMode::Labels && GroundTruth::from_labels(&corpus).labels.is_empty() {
        return Err(HarnessError::NoLabels);
    }
    let k = default_topic_count(&corpus, plan);
    let artifacts = BaselineArtifacts::build(corpus, plan.preprocess.clone(), plan.stoplist()?, plan.effective_lda(), k)
        .map_err(|message| HarnessError::Baseline { stage: pipeline_stage(&message), message })?;
    let gt = match plan.gt_mode {
        GtMode::Labels => GroundTruth::from_labels(&artifacts.corpus),
        GtMode::BaselineAsGt => GroundTruth::from_assignment(&artifacts.assignment),
    };
    let mut baseline = Baseline {
        record: RunRecord::unscored(String::new(), RunAction::baseline(), String::new(), RunStatus::Ok),
        artifacts,
        gt,
        evaluation: plan.evaluation.clone(),
    };
    let digest = config_digest(&baseline, None, &plan.preprocess, &baseline.artifacts.lda);
    let inputs = ScoreInputs {
        dtm: &baseline.artifacts.dtm,
        model: &baseline.artifacts.model,
        assignment: &baseline.artifacts.assignment,
    };
    baseline.record = scored_record(
        baseline_run_id(),
        RunAction::baseline(),
        digest,
        &inputs,
        &baseline.gt,
        &baseline.evaluation,
        None,
        BTreeMap::new(),
    )
    .map_err(HarnessError::BaselineMetrics)?;
    Ok(baseline)
}

fn pipeline_stage(message: &str) -> &'static str {
    if message.starts_with("model") {
        "model"
    } else {
        "preparation"
    }
}

pub fn baseline_run_id() -> String {
    "000-baseline".to_string()
}

/// `<ordinal>-<kind>`, ordinal counted from 1 and zero-padded to three
/// digits.
pub fn run_id(ordinal: usize, action: &ActionSpec) -> String {
    format!("{ordinal:03}-{}", action.kind.slug())
}

/// Apply and score one action.
pub fn run_action(baseline: &Baseline, ordinal: usize, action: &ActionSpec) -> RunRecord {
    let id = run_id(ordinal, action);
    let tag = RunAction::Action(action.clone());
    match apply_action(&baseline.artifacts, action) {
        ActionOutcome::Completed(run) => {
            let digest = config_digest(baseline, Some(action), &run.preprocess, &run.lda);
            let inputs = ScoreInputs { dtm: &run.dtm, model: &run.model, assignment: &run.assignment };
            scored_record(
                id.clone(),
                tag.clone(),
                digest.clone(),
                &inputs,
                &baseline.gt,
                &baseline.evaluation,
                Some(baseline.metrics()),
                run.details.clone(),
            )
            .unwrap_or_else(|e| RunRecord::unscored(id, tag, digest, RunStatus::Failed(format!("metrics: {e}"))))
        }
        ActionOutcome::Degenerate(reason) => {
            let digest = config_digest(baseline, Some(action), &baseline.artifacts.preprocess, &baseline.artifacts.lda);
            RunRecord::unscored(id, tag, digest, RunStatus::Degenerate(reason))
        }
        ActionOutcome::Failed(reason) => {
            let digest = config_digest(baseline, Some(action), &baseline.artifacts.preprocess, &baseline.artifacts.lda);
            RunRecord::unscored(id, tag, digest, RunStatus::Failed(reason))
        }
    }
}

/// Sample the plan's actions and run each against `baseline`, using
/// `jobs` worker threads (all cores when `None`). Records come back in plan
/// order whatever the scheduling.
pub fn run_actions(plan: &SimulationPlan, baseline: &Baseline, jobs: Option<usize>) -> Result<Vec<RunRecord>, HarnessError> {
    let k = baseline.artifacts.model.n_topics();
    let actions = sample_action_plan(baseline.artifacts.corpus.len(), k, plan.master_seed, &plan.actions)
        .map_err(|e| HarnessError::Plan(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Plan(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        actions
            .par_iter()
            .enumerate()
            .map(|(i, action)| run_action(baseline, i + 1, action))
            .collect()
    }))
}

/// Results of a full sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub baseline: RunRecord,
    pub runs: Vec<RunRecord>,
}

impl Sweep {
    /// Baseline followed by the action runs.
    pub fn records(&self) -> impl Iterator<Item = &RunRecord> {
        std::iter::once(&self.baseline).chain(&self.runs)
    }
}

/// Run the action sweep for `plan` on top of `baseline` and write the sweep
/// directory.
pub fn run_sweep(plan: &SimulationPlan, baseline: &Baseline, jobs: Option<usize>) -> Result<Sweep, HarnessError> {
    let runs = run_actions(plan, baseline, jobs)?;
    let sweep = Sweep { baseline: baseline.record.clone(), runs };
    write_sweep(&plan.output_dir, plan, &sweep)?;
    Ok(sweep)
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| HarnessError::Format { path: path.to_path_buf(), message: e.to_string() })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn read_json<S: serde::de::DeserializeOwned>(path: &Path) -> Result<S, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Format { path: path.to_path_buf(), message: e.to_string() })
}

/// Write the plan copy and the baseline record.
pub fn write_baseline(dir: &Path, plan: &SimulationPlan, baseline: &RunRecord) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let plan_path = dir.join("plan.toml");
    fs::write(&plan_path, plan.to_toml()).map_err(io_err(&plan_path))?;
    write_json(&dir.join("baseline.json"), baseline)
}

pub fn write_sweep(dir: &Path, plan: &SimulationPlan, sweep: &Sweep) -> Result<(), HarnessError> {
    write_baseline(dir, plan, &sweep.baseline)?;
    let runs = dir.join("runs");
    if runs.exists() {
        fs::remove_dir_all(&runs).map_err(io_err(&runs))?;
    }
    fs::create_dir_all(&runs).map_err(io_err(&runs))?;
    for record in &sweep.runs {
        write_json(&runs.join(format!("{}.json", record.run_id)), record)?;
    }
    let csv_path = dir.join("metrics.csv");
    fs::write(&csv_path, metrics_csv(sweep.records())).map_err(io_err(&csv_path))
}

/// Read a sweep directory written by [`write_sweep`]. Runs are returned in
/// run id order.
pub fn load_sweep(dir: &Path) -> Result<Sweep, HarnessError> {
    let baseline_path = dir.join("baseline.json");
    if !baseline_path.is_file() {
        return Err(HarnessError::NotASweep(dir.to_path_buf()));
    }
    let baseline = read_json(&baseline_path)?;
    let runs_dir = dir.join("runs");
    let mut paths = Vec::new();
    if runs_dir.is_dir() {
        for entry in fs::read_dir(&runs_dir).map_err(io_err(&runs_dir))? {
            let path = entry.map_err(io_err(&runs_dir))?.path();
            if path.extension().is_some_and(|e| e == "json") {
                paths.push(path);
            }
        }
    }
    paths.sort();
    let runs = paths.iter().map(|p| read_json(p)).collect::<Result<_, _>>()?;
    Ok(Sweep { baseline, runs })
}

fn number(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// The sweep table, columns as in [`CSV_COLUMNS`]. Floats use the shortest
/// representation that round-trips; absent values are empty; list columns
/// are `;`-separated.
pub fn metrics_csv<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in records {
        let metrics = r.metrics.map(|m| m.to_array());
        let mut row = vec![
            r.run_id.clone(),
            r.kind().to_string(),
            r.stage.map(stage_name).unwrap_or("baseline").to_string(),
            r.status.label().to_string(),
        ];
        row.extend((0..METRIC_NAMES.len()).map(|i| number(metrics.map(|m| m[i]))));
        row.push(number(r.s_r));
        row.push(r.imputed_metrics.join(";"));
        let reason = match &r.status {
            RunStatus::Ok => String::new(),
            RunStatus::Degenerate(s) | RunStatus::Failed(s) => s.clone(),
        };
        let mut notes = r.notes.clone();
        if !reason.is_empty() {
            notes.insert(0, reason);
        }
        row.push(notes.join(";"));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn stage_name(stage: ActionStage) -> &'static str {
    match stage {
        ActionStage::Preparation => "preparation",
        ActionStage::Model => "model",
        ActionStage::Assessment => "assessment",
    }
}

/// Ok records by impact, largest first; equal scores in run id order.
/// Records without a score are left out.
pub fn rank_actions(records: &[RunRecord]) -> Vec<RunRecord> {
    let mut ok: Vec<RunRecord> = records.iter().filter(|r| r.s_r.is_some()).cloned().collect();
    ok.sort_by(|a, b| {
        let (x, y) = (a.s_r.unwrap_or(0.0), b.s_r.unwrap_or(0.0));
        y.total_cmp(&x).then_with(|| a.run_id.cmp(&b.run_id))
    });
    ok
}
