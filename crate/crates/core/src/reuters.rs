//! Conversion of the Reuters-21578 distribution into the JSON Lines corpus
//! format.
//!
//! Two source layouts are understood:
//!
//! * the original SGML release (`reut2-000.sgm` .. `reut2-021.sgm`), reduced
//!   to the ModApte split: `TOPICS="YES"` train/test stories, categories that
//!   occur in both halves, stories left with at least one such category
//!   (10,788 documents over 90 categories);
//! * the NLTK packaging (`cats.txt` plus `training/` and `test/` files), which
//!   already is that ModApte subset.
//!
//! Document ids follow the NLTK convention, `training/<NEWID>` or
//! `test/<NEWID>`.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, Document};

#[derive(Debug, Error)]
pub enum ReutersError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} contains neither reut2-*.sgm files nor cats.txt")]
    UnknownLayout(PathBuf),
    #[error("cats.txt line {line}: {message}")]
    Cats { line: usize, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Which parts of a story make up the document text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextParts {
    #[default]
    TitleAndBody,
    BodyOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Story {
    new_id: String,
    split: String,
    has_topics: bool,
    topics: Vec<String>,
    title: String,
    body: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReutersError + '_ {
    move |source| ReutersError::Io { path: path.to_path_buf(), source }
}

/// Convert a Reuters-21578 directory into a corpus (multi-label documents
/// are kept; apply [`crate::corpus::filter_single_label`] for the
/// single-label subset).
pub fn convert_reuters(src: &Path, parts: TextParts) -> Result<Corpus, ReutersError> {
    if src.join("cats.txt").is_file() {
        return convert_nltk(src, parts);
    }
    let mut sgm: Vec<PathBuf> = fs::read_dir(src)
        .map_err(io_err(src))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("reut2-") && n.ends_with(".sgm"))
        })
        .collect();
    if sgm.is_empty() {
        return Err(ReutersError::UnknownLayout(src.to_path_buf()));
    }
    sgm.sort();
    let mut stories = Vec::new();
    for path in &sgm {
        let bytes = fs::read(path).map_err(io_err(path))?;
        stories.extend(parse_sgml(&String::from_utf8_lossy(&bytes)));
    }
    Ok(Corpus::new(modapte(stories, parts))?)
}

fn parse_sgml(text: &str) -> Vec<Story> {
    let block = Regex::new(r"(?s)<REUTERS([^>]*)>(.*?)</REUTERS>").unwrap();
    let attr = Regex::new(r#"([A-Z]+)="([^"]*)""#).unwrap();
    let topics = Regex::new(r"(?s)<TOPICS>(.*?)</TOPICS>").unwrap();
    let d = Regex::new(r"(?s)<D>(.*?)</D>").unwrap();
    let title = Regex::new(r"(?s)<TITLE>(.*?)</TITLE>").unwrap();
    let body = Regex::new(r"(?s)<BODY>(.*?)</BODY>").unwrap();

    block
        .captures_iter(text)
        .map(|cap| {
            let attrs: HashMap<&str, &str> = attr
                .captures_iter(&cap[1])
                .map(|a| (a.get(1).unwrap().as_str(), a.get(2).unwrap().as_str()))
                .collect();
            let inner = &cap[2];
            let topic_list = topics
                .captures(inner)
                .map(|t| d.captures_iter(&t[1]).map(|x| x[1].trim().to_string()).collect())
                .unwrap_or_default();
            let grab = |re: &Regex| re.captures(inner).map(|c| decode_entities(&c[1])).unwrap_or_default();
            Story {
                new_id: attrs.get("NEWID").copied().unwrap_or_default().to_string(),
                split: attrs.get("LEWISSPLIT").copied().unwrap_or_default().to_string(),
                has_topics: attrs.get("TOPICS").copied() == Some("YES"),
                topics: topic_list,
                title: grab(&title),
                body: grab(&body),
            }
        })
        .collect()
}

fn decode_entities(s: &str) -> String {
    let numeric = Regex::new(r"&#(\d+);").unwrap();
    let s = numeric.replace_all(s, |c: &regex::Captures| {
        c[1].parse::<u32>()
            .ok()
            .and_then(char::from_u32)
            .filter(|ch| !ch.is_control() || ch.is_whitespace())
            .map(String::from)
            .unwrap_or_default()
    });
    s.replace("&lt;", "<").replace("&gt;", ">").replace("&quot;", "\"").replace("&amp;", "&")
}

fn modapte(stories: Vec<Story>, parts: TextParts) -> Vec<Document> {
    let usable: Vec<Story> = stories
        .into_iter()
        .filter(|s| s.has_topics && (s.split == "TRAIN" || s.split == "TEST"))
        .collect();
    let in_split = |split: &str| -> BTreeSet<String> {
        usable.iter().filter(|s| s.split == split).flat_map(|s| s.topics.iter().cloned()).collect()
    };
    let train = in_split("TRAIN");
    let test = in_split("TEST");
    let categories: BTreeSet<&String> = train.intersection(&test).collect();

    usable
        .iter()
        .filter_map(|s| {
            let labels: Vec<String> = s.topics.iter().filter(|t| categories.contains(t)).cloned().collect();
            if labels.is_empty() {
                return None;
            }
            let prefix = if s.split == "TRAIN" { "training" } else { "test" };
            let text = match parts {
                TextParts::TitleAndBody if !s.title.is_empty() => format!("{}\n{}", s.title.trim(), s.body.trim()),
                _ => s.body.trim().to_string(),
            };
            Some(Document::new(format!("{prefix}/{}", s.new_id), text, labels))
        })
        .collect()
}

fn convert_nltk(src: &Path, parts: TextParts) -> Result<Corpus, ReutersError> {
    let cats_path = src.join("cats.txt");
    let cats = fs::read_to_string(&cats_path).map_err(io_err(&cats_path))?;
    let mut documents = Vec::new();
    for (i, line) in cats.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let Some(id) = fields.next() else { continue };
        let labels: Vec<String> = fields.map(str::to_string).collect();
        if labels.is_empty() {
            return Err(ReutersError::Cats { line: i + 1, message: format!("{id} has no categories") });
        }
        let path = src.join(id);
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        let raw = String::from_utf8_lossy(&bytes);
        let text = match parts {
            TextParts::TitleAndBody => raw.trim().to_string(),
            TextParts::BodyOnly => raw.trim().split_once('\n').map(|(_, b)| b.trim()).unwrap_or("").to_string(),
        };
        documents.push(Document::new(id, text, labels));
    }
    // cats.txt lists test before training; order by split then numeric id.
    documents.sort_by_key(|d| {
        let (split, num) = d.id.split_once('/').unwrap_or(("", &d.id));
        (split != "training", num.parse::<u64>().unwrap_or(u64::MAX), d.id.clone())
    });
    Ok(Corpus::new(documents)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SGML: &str = r#"<!DOCTYPE lewis SYSTEM "lewis.dtd">
<REUTERS TOPICS="YES" LEWISSPLIT="TRAIN" CGISPLIT="TRAINING-SET" OLDID="5544" NEWID="1">
<DATE>26-FEB-1987</DATE>
<TOPICS><D>cocoa</D></TOPICS>
<TEXT>&#2;
<TITLE>BAHIA COCOA REVIEW</TITLE>
<BODY>Showers continued &lt;throughout&gt; the week.
&#3;</BODY></TEXT>
</REUTERS>
<REUTERS TOPICS="YES" LEWISSPLIT="TEST" CGISPLIT="TRAINING-SET" OLDID="1" NEWID="2">
<TOPICS><D>cocoa</D><D>grain</D></TOPICS>
<TEXT><TITLE>COCOA AND GRAIN</TITLE><BODY>Body two.</BODY></TEXT>
</REUTERS>
<REUTERS TOPICS="YES" LEWISSPLIT="TRAIN" CGISPLIT="TRAINING-SET" OLDID="2" NEWID="3">
<TOPICS><D>grain</D></TOPICS>
<TEXT><TITLE>GRAIN ONLY</TITLE><BODY>Train only category.</BODY></TEXT>
</REUTERS>
<REUTERS TOPICS="NO" LEWISSPLIT="TRAIN" CGISPLIT="TRAINING-SET" OLDID="3" NEWID="4">
<TOPICS></TOPICS>
<TEXT><BODY>Unused.</BODY></TEXT>
</REUTERS>
<REUTERS TOPICS="YES" LEWISSPLIT="NOT-USED" CGISPLIT="TRAINING-SET" OLDID="4" NEWID="5">
<TOPICS><D>cocoa</D></TOPICS>
<TEXT><BODY>Not used.</BODY></TEXT>
</REUTERS>
"#;

    #[test]
    fn sgml_modapte_selection() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("reut2-000.sgm"), SGML).unwrap();
        let corpus = convert_reuters(dir.path(), TextParts::TitleAndBody).unwrap();
        let ids: Vec<_> = corpus.ids().collect();
        // grain only occurs in TEST once and TRAIN once -> kept; both splits.
        assert_eq!(ids, ["training/1", "test/2", "training/3"]);
        let first = &corpus.documents()[0];
        assert_eq!(first.labels, ["cocoa"]);
        assert!(first.text.starts_with("BAHIA COCOA REVIEW\nShowers continued <throughout>"));
        assert_eq!(corpus.documents()[1].labels, ["cocoa", "grain"]);

        let body = convert_reuters(dir.path(), TextParts::BodyOnly).unwrap();
        assert!(body.documents()[0].text.starts_with("Showers"));
    }

    #[test]
    fn categories_need_both_splits() {
        let stories = parse_sgml(SGML.replace("<D>cocoa</D><D>grain</D>", "<D>cocoa</D>").as_str());
        let docs = modapte(stories, TextParts::BodyOnly);
        assert_eq!(docs.iter().map(|d| d.id.as_str()).collect::<Vec<_>>(), ["training/1", "test/2"]);
    }

    #[test]
    fn nltk_layout() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("training")).unwrap();
        fs::create_dir(dir.path().join("test")).unwrap();
        fs::write(dir.path().join("cats.txt"), "test/14826 trade\ntraining/10 acq earn\ntraining/9 earn\n").unwrap();
        fs::write(dir.path().join("test/14826"), "ASIAN EXPORTERS FEAR\n  Mounting trade friction.\n").unwrap();
        fs::write(dir.path().join("training/10"), "TITLE\nbody ten").unwrap();
        fs::write(dir.path().join("training/9"), "TITLE\nbody nine").unwrap();
        let corpus = convert_reuters(dir.path(), TextParts::BodyOnly).unwrap();
        assert_eq!(corpus.ids().collect::<Vec<_>>(), ["training/9", "training/10", "test/14826"]);
        assert_eq!(corpus.documents()[2].text, "Mounting trade friction.");
        assert_eq!(corpus.documents()[1].labels, ["acq", "earn"]);
    }

    #[test]
    fn unknown_layout_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(convert_reuters(dir.path(), TextParts::default()), Err(ReutersError::UnknownLayout(_))));
    }
}
