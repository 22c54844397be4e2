//! Exact-match surface-form linker. Only good enough for building fixtures.

use super::{Article, EntityAnnotation, EntityType};

#[derive(Debug, Clone, Default)]
pub struct GazetteerLinker {
    entries: Vec<(String, String, EntityType)>,
}

impl GazetteerLinker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, surface: &str, entity_id: &str, ty: EntityType) -> Self {
        self.add(surface, entity_id, ty);
        self
    }

    pub fn add(&mut self, surface: &str, entity_id: &str, ty: EntityType) {
        self.entries.push((surface.to_string(), entity_id.to_string(), ty));
    }

    /// Case-sensitive, word-bounded matches over title and body. Offsets are
    /// in characters. Several surface forms of one entity are merged.
    pub fn link(&self, article: &Article) -> Vec<EntityAnnotation> {
        let text = article.text();
        let mut out: Vec<EntityAnnotation> = Vec::new();
        for (surface, entity_id, ty) in &self.entries {
            let hits = find_word_bounded(&text, surface);
            let Some(&first) = hits.first() else {
                continue;
            };
            let first_offset = text[..first].chars().count() as u64;
            match out.iter_mut().find(|a| &a.entity_id == entity_id) {
                Some(a) => {
                    a.count += hits.len() as u32;
                    if first_offset < a.first_offset {
                        a.first_offset = first_offset;
                        a.mention = surface.clone();
                    }
                }
                None => out.push(EntityAnnotation {
                    article_id: article.id.clone(),
                    mention: surface.clone(),
                    entity_id: entity_id.clone(),
                    entity_type: *ty,
                    count: hits.len() as u32,
                    first_offset,
                }),
            }
        }
        out.sort_by_key(|a| a.first_offset);
        out
    }
}

fn find_word_bounded(text: &str, needle: &str) -> Vec<usize> {
    if needle.is_empty() {
        return Vec::new();
    }
    let is_word = |c: Option<char>| c.is_some_and(char::is_alphanumeric);
    text.match_indices(needle)
        .map(|(i, _)| i)
        .filter(|&i| {
            let before = text[..i].chars().next_back();
            let after = text[i + needle.len()..].chars().next();
            !is_word(before) && !is_word(after)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_offsets() {
        let linker = GazetteerLinker::new()
            .with("Apple", "m.apple", EntityType::Org)
            .with("Apple Inc.", "m.apple", EntityType::Org)
            .with("Cook", "m.cook", EntityType::Per);
        let a = Article::new("x", "Apple Inc. news", "Cook said Apple grew. Pineapple is a fruit.");
        let anns = linker.link(&a);
        assert_eq!(anns.len(), 2);
        assert_eq!(anns[0].entity_id, "m.apple");
        // "Apple" twice plus "Apple Inc." once.
        assert_eq!(anns[0].count, 3);
        assert_eq!(anns[0].first_offset, 0);
        assert_eq!(anns[1].entity_id, "m.cook");
        assert_eq!(anns[1].first_offset, 16);
    }
}
