use std::collections::BTreeSet;

use super::{EntityAnnotation, EntityType};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreeningConfig {
    pub drop_types: BTreeSet<EntityType>,
    /// `None` keeps every surviving entity.
    top_k: Option<usize>,
}

impl ScreeningConfig {
    pub fn new(drop_types: impl IntoIterator<Item = EntityType>, top_k: Option<usize>) -> Result<Self> {
        if top_k == Some(0) {
            return Err(Error::Config("top-k must be at least 1".into()));
        }
        Ok(ScreeningConfig {
            drop_types: drop_types.into_iter().collect(),
            top_k,
        })
    }

    /// No type filtering, no truncation.
    pub fn keep_all() -> Self {
        ScreeningConfig {
            drop_types: BTreeSet::new(),
            top_k: None,
        }
    }

    pub fn top_k(&self) -> Option<usize> {
        self.top_k
    }
}

impl Default for ScreeningConfig {
    fn default() -> Self {
        ScreeningConfig {
            drop_types: [EntityType::Loc, EntityType::Gpe].into_iter().collect(),
            top_k: Some(5),
        }
    }
}

/// Drops unwanted types, stable-sorts by count (descending) then earliest
/// offset, and keeps the first `top_k`.
pub fn screen_entities(annotations: &[EntityAnnotation], cfg: &ScreeningConfig) -> Vec<EntityAnnotation> {
    let mut kept: Vec<EntityAnnotation> = annotations
        .iter()
        .filter(|a| !cfg.drop_types.contains(&a.entity_type))
        .cloned()
        .collect();
    kept.sort_by(|a, b| b.count.cmp(&a.count).then(a.first_offset.cmp(&b.first_offset)));
    if let Some(k) = cfg.top_k {
        kept.truncate(k);
    }
    kept
}
