//! Baseline and sweep contracts on small synthetic corpora.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use topicsim::actions::{ActionStage, PlanParams};
use topicsim::corpus::{write_corpus, Corpus, Document};
use topicsim::harness::*;
use topicsim::metrics::{impact_score, PairMode};

fn small_plan(dir: &std::path::Path) -> SimulationPlan {
    let mut plan = SimulationPlan::new(dir.join("corpus.jsonl"), dir.join("out"));
    plan.lda.iterations = 40;
    plan.master_seed = 11;
    plan.evaluation.pair_mode = PairMode::Exact;
    plan.actions = PlanParams {
        stoplist_draws: 3,
        stoplist_max_count: 5,
        topic_count_draws: 3,
        rare_thresholds: vec![0.01, 0.10],
        ubiquitous_thresholds: vec![0.99, 0.5],
        document_fractions: vec![0.2],
        max_splits: 2,
        merge_sizes: vec![2, 3],
        ..PlanParams::default()
    };
    plan
}

fn corpus() -> Corpus {
    common::synthetic_corpus(&common::SyntheticSpec::reuters_like(120, 4), 2)
}

#[test]
fn baseline_repeats_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let plan = small_plan(dir.path());
    let c = Arc::new(corpus());
    let a = baseline_from_corpus(c.clone(), &plan).unwrap();
    let b = baseline_from_corpus(c, &plan).unwrap();
    assert_eq!(a.record, b.record);
    assert_eq!(a.record.n_topics, 4, "k follows the class count");
    assert_eq!(impact_score(a.metrics(), b.metrics()), 0.0);
}

#[test]
fn missing_corpus_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let plan = small_plan(dir.path());
    assert!(matches!(run_baseline(&plan), Err(HarnessError::Corpus(_))));
}

#[test]
fn unlabelled_corpus_needs_baseline_mode() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = small_plan(dir.path());
    let docs = corpus().documents().iter().map(|d| Document::new(d.id.clone(), d.text.clone(), vec![])).collect();
    let c = Arc::new(Corpus::new(docs).unwrap());
    assert!(matches!(baseline_from_corpus(c.clone(), &plan), Err(HarnessError::NoLabels)));
    plan.gt_mode = GtMode::BaselineAsGt;
    plan.lda.k = Some(3);
    let b = baseline_from_corpus(c, &plan).unwrap();
    let m = b.metrics();
    assert_eq!((m.accuracy_mean, m.f1, m.v_measure), (1.0, 1.0, 1.0));
}

#[test]
fn sweep_records_follow_their_contracts() {
    let dir = tempfile::tempdir().unwrap();
    let plan = small_plan(dir.path());
    write_corpus(&corpus(), &plan.corpus).unwrap();
    let baseline = run_baseline(&plan).unwrap();
    let sweep = run_sweep(&plan, &baseline, Some(1)).unwrap();
    assert_eq!(sweep.runs.len(), 3 + 2 + 2 + 2 + 1 + 3 + 2 + 2);

    for r in &sweep.runs {
        assert_eq!(r.s_r.is_some(), r.status.is_ok(), "{}", r.run_id);
        let changes_config = matches!(r.stage, Some(ActionStage::Preparation | ActionStage::Model));
        assert_eq!(r.config_digest != sweep.baseline.config_digest, changes_config, "{}", r.run_id);
        let mut per_doc: BTreeMap<&str, f64> = BTreeMap::new();
        for p in &r.doc_topic_probs {
            assert!(p.p > MIN_STORED_PROBABILITY);
            *per_doc.entry(&p.doc).or_default() += p.p;
        }
        assert!(per_doc.values().all(|&s| s <= 1.0 + 1e-6));
        if r.status.is_ok() {
            assert!(r.top_terms.iter().all(|t| t.len() <= TOP_N));
            assert_eq!(r.top_docs.len(), r.n_topics);
        }
    }

    // The directory holds everything needed to reload the sweep.
    let loaded = load_sweep(&plan.output_dir).unwrap();
    assert_eq!(loaded, sweep);
    let csv = std::fs::read_to_string(plan.output_dir.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 1 + sweep.runs.len());
    assert_eq!(csv, metrics_csv(sweep.records()));
    let reloaded = SimulationPlan::from_toml(&std::fs::read_to_string(plan.output_dir.join("plan.toml")).unwrap()).unwrap();
    assert_eq!(reloaded, plan);

    let ranked = rank_actions(&sweep.runs);
    assert!(ranked.windows(2).all(|w| w[0].s_r >= w[1].s_r));
}

#[test]
fn empty_action_plan_gives_baseline_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = small_plan(dir.path());
    plan.actions = PlanParams::none();
    let baseline = baseline_from_corpus(Arc::new(corpus()), &plan).unwrap();
    let sweep = run_sweep(&plan, &baseline, None).unwrap();
    assert!(sweep.runs.is_empty());
    assert_eq!(std::fs::read_to_string(plan.output_dir.join("metrics.csv")).unwrap().lines().count(), 2);
}

#[test]
fn emptying_the_vocabulary_fails_the_run_not_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = small_plan(dir.path());
    plan.actions = PlanParams { ubiquitous_thresholds: vec![0.5], rare_thresholds: vec![0.01], ..PlanParams::none() };
    plan.evaluation.silhouette_max_sample = 12;
    let mut docs: Vec<Document> = (0..12)
        .map(|i| Document::new(format!("d{i}"), "alpha beta gamma delta", vec![format!("c{}", i % 2)]))
        .collect();
    // Every term sits in more than half of the documents, so the 50%
    // ubiquity cut removes the whole vocabulary.
    for (i, d) in docs.iter_mut().enumerate() {
        if i < 7 {
            d.text.push_str(" oil crude barrel");
        }
        if i >= 5 {
            d.text.push_str(" wheat grain harvest");
        }
    }
    let baseline = baseline_from_corpus(Arc::new(Corpus::new(docs).unwrap()), &plan).unwrap();
    let sweep = run_sweep(&plan, &baseline, None).unwrap();
    let failed: Vec<_> = sweep.runs.iter().filter(|r| matches!(r.status, RunStatus::Failed(_))).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].kind(), "remove-ubiquitous-terms");
    assert!(failed[0].metrics.is_none() && failed[0].s_r.is_none());
    assert!(sweep.runs.iter().any(|r| r.status.is_ok()));
}
