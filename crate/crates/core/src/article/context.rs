use std::collections::HashMap;

use super::SparseVector;
use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextWordConfig {
    n_words: u8,
}

impl ContextWordConfig {
    pub const MAX_WORDS: u8 = 4;

    pub fn new(n_words: u8) -> Result<Self> {
        if n_words > Self::MAX_WORDS {
            return Err(Error::Config(format!(
                "at most {} context words, got {n_words}",
                Self::MAX_WORDS
            )));
        }
        Ok(ContextWordConfig { n_words })
    }

    pub fn n_words(&self) -> usize {
        self.n_words as usize
    }
}

impl Default for ContextWordConfig {
    fn default() -> Self {
        ContextWordConfig { n_words: 2 }
    }
}

/// Lowercased node title -> node. When several nodes share a title the
/// smallest node id wins.
#[derive(Debug, Clone, Default)]
pub struct TitleIndex {
    map: HashMap<String, NodeId>,
}

impl TitleIndex {
    pub fn new(kg: &KnowledgeGraph) -> Self {
        let mut map = HashMap::new();
        for n in kg.nodes() {
            map.entry(kg.title(n).to_lowercase()).or_insert(n);
        }
        TitleIndex { map }
    }

    pub fn lookup(&self, term: &str) -> Option<NodeId> {
        self.map.get(&term.to_lowercase()).copied()
    }
}

/// Highest-weighted terms (ties lexicographic) whose text equals a node
/// title, up to `cfg.n_words` of them.
pub fn augment_context_words(weights: &SparseVector, titles: &TitleIndex, cfg: ContextWordConfig) -> Vec<NodeId> {
    if cfg.n_words() == 0 {
        return Vec::new();
    }
    let mut terms: Vec<(&String, f64)> = weights.iter().map(|(t, &w)| (t, w)).collect();
    terms.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut out = Vec::with_capacity(cfg.n_words());
    for (term, _) in terms {
        if let Some(n) = titles.lookup(term) {
            if !out.contains(&n) {
                out.push(n);
                if out.len() == cfg.n_words() {
                    break;
                }
            }
        }
    }
    out
}
