use std::collections::BTreeSet;

use super::porter;

/// Lowercase 1-gram tokens: maximal runs of alphanumeric characters, keeping
/// those at least `min_len` characters long and, when `drop_numeric` is set,
/// discarding tokens made only of digits.
pub fn tokenize(text: &str, min_len: usize, drop_numeric: bool) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| t.chars().count() >= min_len)
        .filter(|t| !(drop_numeric && t.chars().all(|c| c.is_numeric())))
        .map(str::to_lowercase)
        .collect()
}

pub fn apply_stop_filter(tokens: Vec<String>, stoplist: &BTreeSet<String>) -> Vec<String> {
    if stoplist.is_empty() {
        return tokens;
    }
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

pub fn stem_tokens(tokens: Vec<String>) -> Vec<String> {
    tokens.into_iter().map(|t| porter::stem(&t)).collect()
}
