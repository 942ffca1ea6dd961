//! Invariants checked over generated inputs.

mod common;

use proptest::prelude::*;
use topicsim::corpus::{load_corpus, write_corpus, Corpus, CorpusFormat, Document};
use topicsim::metrics::{
    class_accuracy, evaluate, impact_score, topic_distances, EvalSettings, MetricsVector, PairMode, SparseVector,
};
use topicsim::model::{assign_topics, train_lda, LdaConfig};
use topicsim::preprocess::{prepare, DocumentTermMatrix, PreprocessConfig, StopList};

fn text_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["oil", "price", "the", "and", "wheat", "grain", "bank", "rate", "2024", "x"]), 0..30)
        .prop_map(|w| w.join(" "))
}

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    prop::collection::vec((text_strategy(), prop::option::of("[a-c]")), 1..25).prop_map(|docs| {
        Corpus::new(
            docs.into_iter()
                .enumerate()
                .map(|(i, (t, l))| Document::new(format!("d{i}"), t, l.into_iter().collect()))
                .collect(),
        )
        .unwrap()
    })
}

fn prep(corpus: &Corpus, config: &PreprocessConfig) -> Option<DocumentTermMatrix> {
    prepare(corpus, config, &StopList::english()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corpus_round_trip(corpus in corpus_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        write_corpus(&corpus, &path).unwrap();
        let back = load_corpus(&path, CorpusFormat::JsonLines).unwrap();
        prop_assert_eq!(&back, &corpus);
        let again = dir.path().join("d.jsonl");
        write_corpus(&back, &again).unwrap();
        prop_assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn preparation_is_deterministic(corpus in corpus_strategy()) {
        let cfg = PreprocessConfig::default();
        prop_assert_eq!(prep(&corpus, &cfg), prep(&corpus, &cfg));
    }

    #[test]
    fn thresholds_only_shrink_the_vocabulary(corpus in corpus_strategy(), r in 0usize..4, u in 0usize..4) {
        let rare = [0.0, 0.05, 0.2, 0.4][r];
        let ubiq = [1.0, 0.9, 0.75, 0.5][u];
        let base = prep(&corpus, &PreprocessConfig::default()).map(|d| d.n_terms()).unwrap_or(0);
        let cfg = PreprocessConfig { rare_df_threshold: Some(rare), ubiquitous_df_threshold: Some(ubiq), ..Default::default() };
        let filtered = prep(&corpus, &cfg).map(|d| d.n_terms()).unwrap_or(0);
        prop_assert!(filtered <= base);
        let stricter = PreprocessConfig { rare_df_threshold: Some(rare + 0.05), ..cfg };
        let tighter = prep(&corpus, &stricter).map(|d| d.n_terms()).unwrap_or(0);
        prop_assert!(tighter <= filtered);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lda_rows_are_distributions_and_runs_repeat(seed in 0u64..1000, k in 1usize..4) {
        let corpus = common::synthetic_corpus(&common::SyntheticSpec::reuters_like(30, 3), seed);
        let dtm: DocumentTermMatrix = prep(&corpus, &PreprocessConfig::default()).unwrap();
        let config = LdaConfig { iterations: 20, ..LdaConfig::new(k, seed) };
        let a = train_lda(&dtm, &config).unwrap();
        for row in a.theta.rows().into_iter().chain(a.phi.rows()) {
            prop_assert!((row.sum() - 1.0).abs() < 1e-9);
            prop_assert!(row.iter().all(|&p| p > 0.0));
        }
        prop_assert_eq!(&a, &train_lda(&dtm, &config).unwrap());
    }

    #[test]
    fn lda_ignores_corpus_order(seed in 0u64..1000) {
        let corpus = common::synthetic_corpus(&common::SyntheticSpec::reuters_like(25, 3), seed);
        let mut reversed: Vec<Document> = corpus.documents().to_vec();
        reversed.reverse();
        let reversed = Corpus::new(reversed).unwrap();
        let config = LdaConfig { iterations: 15, ..LdaConfig::new(3, seed) };
        let a = train_lda(&prep(&corpus, &PreprocessConfig::default()).unwrap(), &config).unwrap();
        let b = train_lda(&prep(&reversed, &PreprocessConfig::default()).unwrap(), &config).unwrap();
        prop_assert_eq!(&a.phi, &b.phi);
        for (i, id) in a.doc_ids.iter().enumerate() {
            let j = b.doc_ids.iter().position(|x| x == id).unwrap();
            prop_assert_eq!(a.theta.row(i), b.theta.row(j));
        }
    }
}

fn partition(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..k, n)
}

fn vector() -> impl Strategy<Value = MetricsVector> {
    prop::array::uniform8(0.0..=1.0f64).prop_map(MetricsVector::from_array)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn impact_is_a_bounded_symmetric_distance(a in vector(), b in vector()) {
        let ab = impact_score(&a, &b);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab, impact_score(&b, &a));
        prop_assert_eq!(impact_score(&a, &a), 0.0);
    }

    #[test]
    fn topic_distance_properties(rows in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 6), 2..5)) {
        let k = rows.len();
        let mut phi = ndarray::Array2::<f64>::zeros((k, 6));
        for (i, r) in rows.iter().enumerate() {
            let s: f64 = r.iter().sum::<f64>() + 1e-9;
            for (j, v) in r.iter().enumerate() {
                phi[[i, j]] = (v + 1e-9 / 6.0) / s;
            }
        }
        let d = topic_distances(&phi);
        for i in 0..k {
            prop_assert!(d.kl[[i, i]].abs() < 1e-12);
            for j in 0..k {
                prop_assert!(d.kl[[i, j]] >= 0.0);
                prop_assert_eq!(d.js[[i, j]], d.js[[j, i]]);
                prop_assert_eq!(d.cosine[[i, j]], d.cosine[[j, i]]);
                prop_assert!((0.0..=1.0).contains(&d.js[[i, j]]));
            }
        }
    }

    #[test]
    fn merges_never_cost_accuracy(gt in partition(40, 4), pred in partition(40, 6)) {
        // Each class lands wholly in one topic (two classes share each).
        let coarse: Vec<usize> = gt.iter().map(|&g| g % 2).collect();
        let acc = class_accuracy::<usize, usize, f64>(&gt, &coarse).unwrap();
        prop_assert_eq!(acc.mean, 1.0);
        let fine = class_accuracy::<usize, usize, f64>(&gt, &pred).unwrap();
        prop_assert!(fine.mean <= 1.0 && fine.weighted_mean <= 1.0);
    }

    #[test]
    fn metrics_bounded(gt in partition(30, 3), pred in partition(30, 4), vals in prop::collection::vec(0.1..1.0f64, 30)) {
        let idx: Vec<Vec<usize>> = (0..30).map(|i| vec![i % 5, 5 + i % 3]).collect();
        let val: Vec<Vec<f64>> = vals.iter().map(|&v| vec![v, 1.0 - v]).collect();
        let feats: Vec<_> = (0..30).map(|i| SparseVector { indices: &idx[i], values: &val[i] }).collect();
        let settings = EvalSettings { pair_mode: PairMode::Exact, ..Default::default() };
        let p = evaluate(&gt, &pred, &feats, &pred, &settings);
        for v in p.values.iter().flatten() {
            prop_assert!((0.0..=1.0).contains(v));
        }
    }
}

#[test]
fn assignment_is_argmax() {
    let corpus = common::synthetic_corpus(&common::SyntheticSpec::reuters_like(20, 2), 5);
    let dtm: DocumentTermMatrix = prep(&corpus, &PreprocessConfig::default()).unwrap();
    let model = train_lda(&dtm, &LdaConfig { iterations: 10, ..LdaConfig::new(2, 1) }).unwrap();
    let a = assign_topics(&model);
    for (d, &t) in a.topic_of.iter().enumerate() {
        let row = model.theta.row(d);
        assert!(row.iter().all(|&p| p <= row[t]));
    }
}
