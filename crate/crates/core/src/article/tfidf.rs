use std::collections::{BTreeMap, HashSet};

use super::Article;

/// Term weights of one document, ordered by term.
pub type SparseVector = BTreeMap<String, f64>;

/// Terms found in more than this share of documents are dropped.
pub const MAX_DOCUMENT_SHARE: f64 = 0.8;

/// English stop words (the NLTK list). Contractions appear in their
/// tokenized pieces, e.g. `don` and `t`.
pub const STOP_WORDS: &[&str] = &[
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours", "yourself",
    "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its",
    "itself", "they", "them", "their", "theirs", "themselves", "what", "which", "who", "whom",
    "this", "that", "these", "those", "am", "is", "are", "was", "were", "be", "been", "being",
    "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but",
    "if", "or", "because", "as", "until", "while", "of", "at", "by", "for", "with", "about",
    "against", "between", "into", "through", "during", "before", "after", "above", "below", "to",
    "from", "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then",
    "once", "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few",
    "more", "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so",
    "than", "too", "very", "s", "t", "can", "will", "just", "don", "should", "now", "d", "ll",
    "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn", "hadn", "hasn", "haven",
    "isn", "ma", "mightn", "mustn", "needn", "shan", "shouldn", "wasn", "weren", "won", "wouldn",
];

/// Lowercased maximal alphanumeric runs.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Corpus-level TF-IDF: raw term counts times `ln(N / df)`, stop words and
/// terms present in more than 80% of documents removed.
#[derive(Debug, Clone)]
pub struct TfIdf {
    ids: Vec<String>,
    vectors: Vec<SparseVector>,
}

impl TfIdf {
    pub fn get(&self, article_id: &str) -> Option<&SparseVector> {
        self.ids
            .binary_search_by(|id| id.as_str().cmp(article_id))
            .ok()
            .map(|i| &self.vectors[i])
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SparseVector)> {
        self.ids.iter().map(String::as_str).zip(&self.vectors)
    }
}

pub fn tfidf_vectors(corpus: &[Article]) -> TfIdf {
    let stop: HashSet<&str> = STOP_WORDS.iter().copied().collect();
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.sort_by(|&a, &b| corpus[a].id.cmp(&corpus[b].id));

    let counts: Vec<BTreeMap<String, u32>> = order
        .iter()
        .map(|&i| {
            let mut tf = BTreeMap::new();
            for tok in tokenize(&corpus[i].text()) {
                if !stop.contains(tok.as_str()) {
                    *tf.entry(tok).or_insert(0) += 1;
                }
            }
            tf
        })
        .collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tf in &counts {
        for term in tf.keys() {
            *df.entry(term.as_str()).or_insert(0) += 1;
        }
    }
    let n = corpus.len() as f64;
    let vectors = counts
        .iter()
        .map(|tf| {
            tf.iter()
                .filter_map(|(term, &c)| {
                    let d = df[term.as_str()] as f64;
                    (d <= MAX_DOCUMENT_SHARE * n).then(|| (term.clone(), c as f64 * (n / d).ln()))
                })
                .collect()
        })
        .collect();
    TfIdf {
        ids: order.iter().map(|&i| corpus[i].id.clone()).collect(),
        vectors,
    }
}
