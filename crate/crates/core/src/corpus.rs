//! Document corpora: loading, validation and subsetting.
//!
//! The on-disk format is JSON Lines, one document per line:
//!
//! ```text
//! {"id": "14826", "text": "ASIAN EXPORTERS FEAR DAMAGE ...", "labels": ["trade"]}
//! ```
//!
//! File order is preserved and defines tie-breaking order everywhere
//! downstream.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: unreadable record: {message}")]
    Record { line: usize, message: String },
    #[error("line {line}: empty document id")]
    EmptyId { line: usize },
    #[error("line {line}: duplicate document id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("empty corpus")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub labels: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, labels: Vec<String>) -> Self {
        Self { id: id.into(), text: text.into(), labels }
    }

    /// The label when the document carries exactly one.
    pub fn single_label(&self) -> Option<&str> {
        match self.labels.as_slice() {
            [only] => Some(only.as_str()),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    #[default]
    JsonLines,
}

/// An ordered, id-unique collection of documents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    label_set: BTreeSet<String>,
}

impl Corpus {
    /// Build a corpus, rejecting empty or duplicate ids. An empty document
    /// list is allowed here; only loading from a file treats it as an error.
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            if doc.id.is_empty() {
                return Err(CorpusError::EmptyId { line: i + 1 });
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId { line: i + 1, id: doc.id.clone() });
            }
        }
        Ok(Self::from_valid(documents))
    }

    fn from_valid(documents: Vec<Document>) -> Self {
        let label_set = documents.iter().flat_map(|d| d.labels.iter().cloned()).collect();
        Self { documents, label_set }
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn label_set(&self) -> &BTreeSet<String> {
        &self.label_set
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.id.as_str())
    }

    pub fn has_labels(&self) -> bool {
        !self.label_set.is_empty()
    }

    /// Documents for which `keep` holds, in corpus order.
    pub fn retain(&self, mut keep: impl FnMut(&Document) -> bool) -> Corpus {
        Self::from_valid(self.documents.iter().filter(|d| keep(d)).cloned().collect())
    }

    /// Remove `fraction` of the documents, chosen uniformly with `seed`.
    /// The survivors keep corpus order.
    pub fn remove_fraction(&self, fraction: f64, seed: u64) -> Corpus {
        let n = self.len();
        let remove = ((fraction.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
        let mut rng = seed::rng(seed);
        let dropped: HashSet<usize> = sample(&mut rng, n, remove).into_iter().collect();
        let docs = self
            .documents
            .iter()
            .enumerate()
            .filter(|(i, _)| !dropped.contains(i))
            .map(|(_, d)| d.clone())
            .collect();
        Self::from_valid(docs)
    }

    /// Single-label documents of the `n_classes` most frequent classes,
    /// truncated to the first `max_docs` in corpus order.
    pub fn top_classes_subset(&self, n_classes: usize, max_docs: usize) -> Corpus {
        let single = filter_single_label(self);
        let mut ranked: Vec<(String, usize)> = label_histogram(&single).into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let keep: HashSet<String> = ranked.into_iter().take(n_classes).map(|(l, _)| l).collect();
        let docs = single
            .documents
            .into_iter()
            .filter(|d| d.single_label().is_some_and(|l| keep.contains(l)))
            .take(max_docs)
            .collect();
        Self::from_valid(docs)
    }
}

/// Load a corpus file, preserving file order. Blank lines are skipped.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    let io_err = |source| CorpusError::Io { path: path.to_path_buf(), source };
    let file = fs::File::open(path).map_err(io_err)?;
    match format {
        CorpusFormat::JsonLines => read_json_lines(BufReader::new(file), path),
    }
}

fn read_json_lines(reader: impl BufRead, path: &Path) -> Result<Corpus, CorpusError> {
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Record { line: line_no, message: e.to_string() })?;
        if doc.id.is_empty() {
            return Err(CorpusError::EmptyId { line: line_no });
        }
        if !seen.insert(doc.id.clone()) {
            return Err(CorpusError::DuplicateId { line: line_no, id: doc.id });
        }
        documents.push(doc);
    }
    if documents.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(Corpus::from_valid(documents))
}

pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io { path: path.to_path_buf(), source };
    let mut out = BufWriter::new(fs::File::create(path).map_err(io_err)?);
    for doc in &corpus.documents {
        let line = serde_json::to_string(doc).expect("document serializes");
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn filter_single_label(corpus: &Corpus) -> Corpus {
    corpus.retain(|d| d.labels.len() == 1)
}

/// Number of documents carrying each label.
pub fn label_histogram(corpus: &Corpus) -> BTreeMap<String, usize> {
    let mut hist = BTreeMap::new();
    for doc in &corpus.documents {
        for label in &doc.labels {
            *hist.entry(label.clone()).or_insert(0) += 1;
        }
    }
    hist
}
