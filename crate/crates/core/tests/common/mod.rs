//! Seeded synthetic corpora for integration tests.
#![allow(dead_code)]

use rand::Rng;
use topicsim::corpus::{Corpus, Document};
use topicsim::seed;

const CONSONANTS: &[u8] = b"bcdfghjklmnprtv";
const VOWELS: &[u8] = b"aiou";
const STOP: &[&str] = &["the", "and", "of", "for", "with", "that", "this", "from", "was", "are"];

/// Pseudo-word for `index`: three consonant-vowel syllables, untouched by
/// the Porter stemmer and never a stop word.
pub fn word(index: usize) -> String {
    let base = CONSONANTS.len() * VOWELS.len();
    let mut i = index;
    let mut s = String::new();
    for _ in 0..3 {
        let syl = i % base;
        i /= base;
        s.push(CONSONANTS[syl / VOWELS.len()] as char);
        s.push(VOWELS[syl % VOWELS.len()] as char);
    }
    assert_eq!(i, 0, "word index too large");
    s
}

fn zipf(rng: &mut impl Rng, n: usize) -> usize {
    // Inverse-CDF draw from weights 1/(r+1).
    let h: f64 = (1..=n).map(|r| 1.0 / r as f64).sum();
    let mut u = rng.random::<f64>() * h;
    for r in 0..n {
        u -= 1.0 / (r + 1) as f64;
        if u <= 0.0 {
            return r;
        }
    }
    n - 1
}

#[derive(Clone, Debug)]
pub struct SyntheticSpec {
    pub n_docs: usize,
    pub n_classes: usize,
    pub class_vocab: usize,
    pub shared_vocab: usize,
    pub rare_pool: usize,
    pub doc_len: (usize, usize),
    /// Share of tokens drawn from the document's class vocabulary.
    pub class_share: f64,
    /// Classes sizes fall off geometrically with this ratio.
    pub class_decay: f64,
}

impl SyntheticSpec {
    /// Reuters-shaped: skewed class sizes, a shared background vocabulary,
    /// stop words and a long tail of rare terms.
    pub fn reuters_like(n_docs: usize, n_classes: usize) -> Self {
        Self {
            n_docs,
            n_classes,
            class_vocab: 60,
            shared_vocab: 400,
            rare_pool: 20_000,
            doc_len: (30, 90),
            class_share: 0.45,
            class_decay: 0.85,
        }
    }
}

pub fn synthetic_corpus(spec: &SyntheticSpec, seed_value: u64) -> Corpus {
    let mut rng = seed::rng(seed_value);
    let weights: Vec<f64> = (0..spec.n_classes).map(|c| spec.class_decay.powi(c as i32)).collect();
    let total: f64 = weights.iter().sum();
    let shared_offset = spec.n_classes * spec.class_vocab;
    let rare_offset = shared_offset + spec.shared_vocab;
    let docs = (0..spec.n_docs)
        .map(|i| {
            let mut u = rng.random::<f64>() * total;
            let mut class = spec.n_classes - 1;
            for (c, w) in weights.iter().enumerate() {
                u -= w;
                if u <= 0.0 {
                    class = c;
                    break;
                }
            }
            let len = rng.random_range(spec.doc_len.0..=spec.doc_len.1);
            let mut tokens = Vec::with_capacity(len + 4);
            for _ in 0..len {
                let r = rng.random::<f64>();
                if r < spec.class_share {
                    tokens.push(word(class * spec.class_vocab + zipf(&mut rng, spec.class_vocab)));
                } else if r < 0.9 {
                    tokens.push(word(shared_offset + zipf(&mut rng, spec.shared_vocab)));
                } else {
                    tokens.push(STOP[rng.random_range(0..STOP.len())].to_string());
                }
            }
            for _ in 0..rng.random_range(1..=3) {
                tokens.push(word(rare_offset + rng.random_range(0..spec.rare_pool)));
            }
            Document::new(format!("doc{i:05}"), tokens.join(" "), vec![format!("class{class:02}")])
        })
        .collect();
    Corpus::new(docs).unwrap()
}

/// Two classes with disjoint vocabularies of `vocab` words each.
pub fn disjoint_corpus(docs_per_class: usize, vocab: usize, doc_len: usize, seed_value: u64) -> Corpus {
    let mut rng = seed::rng(seed_value);
    let docs = (0..2 * docs_per_class)
        .map(|i| {
            let class = i % 2;
            let text: Vec<String> = (0..doc_len).map(|_| word(class * vocab + rng.random_range(0..vocab))).collect();
            Document::new(format!("d{i:04}"), text.join(" "), vec![format!("c{class}")])
        })
        .collect();
    Corpus::new(docs).unwrap()
}
