//! Data preparation: raw text to a weighted document-term matrix.
//!
//! Tokens are lowercase 1-grams; short and purely numeric tokens are dropped,
//! stop terms removed and the survivors Porter-stemmed, in that order.
//! Rare/ubiquitous filtering works on document-frequency fractions.

mod porter;
mod tokenize;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::scalar::Scalar;
use crate::seed::digest_of;

pub use porter::stem;
pub use tokenize::{apply_stop_filter, stem_tokens, tokenize};

const ENGLISH_STOP_WORDS: &str = include_str!("../../data/english_stop_words.txt");
const ENGLISH_STOP_WORDS_VERSION: &str = "english-classic-179/v1";

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("invalid preprocessing config: {0}")]
    Config(String),
    #[error("cannot read stop list {path}: {source}")]
    StopList {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("every document is empty after filtering")]
    AllDocumentsEmpty,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Tf,
    #[default]
    Tfidf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub remove_stop_terms: bool,
    pub stop_additions: Vec<String>,
    pub stop_removals: Vec<String>,
    pub stem: bool,
    pub min_token_length: usize,
    pub drop_numeric_tokens: bool,
    pub rare_df_threshold: Option<f64>,
    pub ubiquitous_df_threshold: Option<f64>,
    pub weighting: Weighting,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            remove_stop_terms: true,
            stop_additions: Vec::new(),
            stop_removals: Vec::new(),
            stem: true,
            min_token_length: 3,
            drop_numeric_tokens: true,
            rare_df_threshold: None,
            ubiquitous_df_threshold: None,
            weighting: Weighting::Tfidf,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<(), PreprocessError> {
        let bad = |m: String| Err(PreprocessError::Config(m));
        if self.min_token_length < 1 {
            return bad("min_token_length must be at least 1".into());
        }
        for (name, t) in [("rare_df_threshold", self.rare_df_threshold), ("ubiquitous_df_threshold", self.ubiquitous_df_threshold)] {
            if let Some(t) = t {
                if !(0.0..=1.0).contains(&t) {
                    return bad(format!("{name} {t} outside [0, 1]"));
                }
            }
        }
        if let (Some(r), Some(u)) = (self.rare_df_threshold, self.ubiquitous_df_threshold) {
            if r >= u {
                return bad(format!("rare threshold {r} must be below ubiquitous threshold {u}"));
            }
        }
        let removals: BTreeSet<&String> = self.stop_removals.iter().collect();
        if let Some(t) = self.stop_additions.iter().find(|t| removals.contains(t)) {
            return bad(format!("{t:?} is both added to and removed from the stop list"));
        }
        Ok(())
    }
}

/// A versioned base stop list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopList {
    pub version: String,
    pub terms: BTreeSet<String>,
}

impl StopList {
    /// The built-in classic English list (179 terms).
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOP_WORDS_VERSION, ENGLISH_STOP_WORDS)
    }

    /// One term per line; blank lines and `#` comments are ignored.
    pub fn from_file(path: &Path) -> Result<Self, PreprocessError> {
        let text = fs::read_to_string(path)
            .map_err(|source| PreprocessError::StopList { path: path.to_path_buf(), source })?;
        let version = format!("file:{}", digest_of(&text));
        Ok(Self::parse(&version, &text))
    }

    fn parse(version: &str, text: &str) -> Self {
        let terms = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { version: version.to_string(), terms }
    }

    /// `(base ∪ additions) \ removals` when stop removal is on, else empty.
    pub fn effective(&self, config: &PreprocessConfig) -> BTreeSet<String> {
        if !config.remove_stop_terms {
            return BTreeSet::new();
        }
        let mut terms = self.terms.clone();
        terms.extend(config.stop_additions.iter().map(|t| t.to_lowercase()));
        for t in &config.stop_removals {
            terms.remove(&t.to_lowercase());
        }
        terms
    }
}

/// Full token pipeline for one text.
pub fn process_text(text: &str, config: &PreprocessConfig, stoplist: &BTreeSet<String>) -> Vec<String> {
    let tokens = tokenize(text, config.min_token_length, config.drop_numeric_tokens);
    let tokens = apply_stop_filter(tokens, stoplist);
    if config.stem {
        stem_tokens(tokens)
    } else {
        tokens
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_frequency: Vec<usize>,
    index: HashMap<String, usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct VocabularyRepr {
    terms: Vec<String>,
    doc_frequency: Vec<usize>,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(r: VocabularyRepr) -> Self {
        Self::from_sorted(r.terms, r.doc_frequency)
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        Self { terms: v.terms, doc_frequency: v.doc_frequency }
    }
}

impl Vocabulary {
    fn from_sorted(terms: Vec<String>, doc_frequency: Vec<usize>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Self { terms, doc_frequency, index }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_frequency(&self, column: usize) -> usize {
        self.doc_frequency[column]
    }
}

/// Build the vocabulary from per-document token lists. A term is dropped
/// when the fraction of documents containing it is below the rare threshold
/// or above the ubiquitous threshold. Terms are sorted lexicographically.
pub fn build_vocabulary(token_lists: &[Vec<String>], config: &PreprocessConfig) -> Result<Vocabulary, PreprocessError> {
    let n = token_lists.len() as f64;
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in token_lists {
        let unique: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let (terms, freqs): (Vec<String>, Vec<usize>) = df
        .into_iter()
        .filter(|&(_, count)| {
            let frac = count as f64 / n;
            config.rare_df_threshold.is_none_or(|r| frac >= r) && config.ubiquitous_df_threshold.is_none_or(|u| frac <= u)
        })
        .map(|(t, c)| (t.to_string(), c))
        .unzip();
    if terms.is_empty() {
        return Err(PreprocessError::EmptyVocabulary);
    }
    Ok(Vocabulary::from_sorted(terms, freqs))
}

/// Sparse document-term matrix in compressed-row form.
///
/// `counts` and `weights` share one sparsity pattern. Documents left without
/// any in-vocabulary token are listed in `dropped_docs` instead of getting a
/// row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DocumentTermMatrix<T = f64> {
    rows: Vec<String>,
    vocab: Vocabulary,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    counts: Vec<u32>,
    weights: Vec<T>,
    dropped_docs: Vec<String>,
    /// Digest of the effective configuration that produced this matrix.
    provenance: String,
}

/// One row of a [`DocumentTermMatrix`].
#[derive(Clone, Copy, Debug)]
pub struct Row<'a, T> {
    pub columns: &'a [usize],
    pub counts: &'a [u32],
    pub weights: &'a [T],
}

impl<T: Scalar> DocumentTermMatrix<T> {
    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dropped_docs(&self) -> &[String] {
        &self.dropped_docs
    }

    pub fn row(&self, i: usize) -> Row<'_, T> {
        let span = self.indptr[i]..self.indptr[i + 1];
        Row {
            columns: &self.indices[span.clone()],
            counts: &self.counts[span.clone()],
            weights: &self.weights[span],
        }
    }

    pub fn row_total(&self, i: usize) -> u64 {
        self.row(i).counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Identity of the matrix: its contents plus the configuration that
    /// produced it.
    pub fn digest(&self) -> String {
        digest_of(&(&self.provenance, &self.rows, self.vocab.terms(), &self.indptr, &self.indices, &self.counts))
    }

    /// Keep only the rows at the given positions, in the given order.
    pub fn select_rows(&self, positions: &[usize]) -> Self {
        let mut out = Self {
            rows: Vec::with_capacity(positions.len()),
            vocab: self.vocab.clone(),
            indptr: vec![0],
            indices: Vec::new(),
            counts: Vec::new(),
            weights: Vec::new(),
            dropped_docs: self.dropped_docs.clone(),
            provenance: self.provenance.clone(),
        };
        for &p in positions {
            let row = self.row(p);
            out.rows.push(self.rows[p].clone());
            out.indices.extend_from_slice(row.columns);
            out.counts.extend_from_slice(row.counts);
            out.weights.extend_from_slice(row.weights);
            out.indptr.push(out.indices.len());
        }
        out
    }
}

/// `ln((1 + n) / (1 + df)) + 1`.
pub fn idf(n_docs: usize, doc_frequency: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + doc_frequency as f64)).ln() + 1.0
}

/// Count tokens against `vocab` and weight them. `token_lists` is aligned
/// with the corpus order.
pub fn vectorize<T: Scalar>(
    corpus: &Corpus,
    token_lists: &[Vec<String>],
    vocab: &Vocabulary,
    config: &PreprocessConfig,
    provenance: String,
) -> Result<DocumentTermMatrix<T>, PreprocessError> {
    if vocab.is_empty() {
        return Err(PreprocessError::EmptyVocabulary);
    }
    let n = corpus.len();
    let idfs: Vec<f64> = (0..vocab.len()).map(|c| idf(n, vocab.doc_frequency(c))).collect();
    let mut m = DocumentTermMatrix {
        rows: Vec::new(),
        vocab: vocab.clone(),
        indptr: vec![0],
        indices: Vec::new(),
        counts: Vec::new(),
        weights: Vec::new(),
        dropped_docs: Vec::new(),
        provenance,
    };
    for (doc, tokens) in corpus.documents().iter().zip(token_lists) {
        let mut row: BTreeMap<usize, u32> = BTreeMap::new();
        for t in tokens {
            if let Some(c) = vocab.index_of(t) {
                *row.entry(c).or_insert(0) += 1;
            }
        }
        if row.is_empty() {
            m.dropped_docs.push(doc.id.clone());
            continue;
        }
        for (c, count) in row {
            let w = match config.weighting {
                Weighting::Tf => f64::from(count),
                Weighting::Tfidf => f64::from(count) * idfs[c],
            };
            m.indices.push(c);
            m.counts.push(count);
            m.weights.push(T::of(w));
        }
        m.indptr.push(m.indices.len());
        m.rows.push(doc.id.clone());
    }
    if m.rows.is_empty() {
        return Err(PreprocessError::AllDocumentsEmpty);
    }
    Ok(m)
}

/// Everything needed to rebuild a matrix deterministically.
#[derive(Serialize)]
struct Provenance<'a> {
    config: &'a PreprocessConfig,
    stop_list_version: &'a str,
    effective_stop_list: &'a BTreeSet<String>,
    idf: &'static str,
}

/// Run the whole preparation stage.
pub fn prepare<T: Scalar>(
    corpus: &Corpus,
    config: &PreprocessConfig,
    base_stoplist: &StopList,
) -> Result<DocumentTermMatrix<T>, PreprocessError> {
    config.validate()?;
    let stoplist = base_stoplist.effective(config);
    let token_lists: Vec<Vec<String>> = corpus
        .documents()
        .par_iter()
        .map(|d| process_text(&d.text, config, &stoplist))
        .collect();
    let vocab = build_vocabulary(&token_lists, config)?;
    let provenance = digest_of(&Provenance {
        config,
        stop_list_version: &base_stoplist.version,
        effective_stop_list: &stoplist,
        idf: "ln((1+n)/(1+df))+1",
    });
    vectorize(corpus, &token_lists, &vocab, config, provenance)
}
